#include "multiqueue/quality/log_io.hpp"

#include <array>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace multiqueue::quality {

namespace {

template <typename T>
void put_le(char* out, T value) {
    for (std::size_t i = 0; i < sizeof(T); ++i) {
        out[i] = static_cast<char>(static_cast<std::uint64_t>(value) >> (8 * i) & 0xff);
    }
}

template <typename T>
T get_le(char const* in) {
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
        v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[i])) << (8 * i);
    }
    return static_cast<T>(v);
}

char kind_letter(OpKind kind) {
    switch (kind) {
        case OpKind::insert:
            return 'I';
        case OpKind::delete_success:
            return 'D';
        case OpKind::delete_failed:
            return 'F';
    }
    return '?';
}

}  // namespace

void write_binary_log(std::ostream& out, std::span<OpRecord const> records) {
    std::array<char, log_header_size> header{};
    std::memcpy(header.data(), log_magic, sizeof(log_magic));
    put_le<std::uint64_t>(header.data() + 8, records.size());
    out.write(header.data(), header.size());
    std::array<char, log_record_size> buf{};
    for (OpRecord const& r : records) {
        put_le<std::uint8_t>(buf.data(), static_cast<std::uint8_t>(r.kind));
        put_le<std::uint16_t>(buf.data() + 1, r.thread_id);
        put_le<std::uint64_t>(buf.data() + 3, r.key);
        put_le<std::uint64_t>(buf.data() + 11, r.value);
        put_le<std::uint64_t>(buf.data() + 19, r.timestamp);
        out.write(buf.data(), buf.size());
    }
    if (!out) {
        throw LogFormatError("failed to write binary log");
    }
}

OpLog read_binary_log(std::istream& in) {
    std::array<char, log_header_size> header{};
    if (!in.read(header.data(), header.size()) || std::memcmp(header.data(), log_magic, sizeof(log_magic)) != 0) {
        throw LogFormatError("missing MQLOG1 header");
    }
    auto const count = get_le<std::uint64_t>(header.data() + 8);
    OpLog records;
    std::array<char, log_record_size> buf{};
    for (std::uint64_t i = 0; i < count; ++i) {
        if (!in.read(buf.data(), buf.size())) {
            throw LogFormatError("truncated log: expected " + std::to_string(count) + " records, got " +
                                 std::to_string(i));
        }
        auto const kind = get_le<std::uint8_t>(buf.data());
        if (kind > static_cast<std::uint8_t>(OpKind::delete_failed)) {
            throw LogFormatError("record " + std::to_string(i) + ": invalid kind " + std::to_string(kind));
        }
        records.push_back({static_cast<OpKind>(kind), get_le<std::uint16_t>(buf.data() + 1),
                           get_le<std::uint64_t>(buf.data() + 3), get_le<std::uint64_t>(buf.data() + 11),
                           get_le<std::uint64_t>(buf.data() + 19)});
    }
    return records;
}

void write_text_log(std::ostream& out, std::span<OpRecord const> records) {
    for (OpRecord const& r : records) {
        out << kind_letter(r.kind) << ' ' << r.thread_id << ' ' << r.key << ' ' << r.value << ' ' << r.timestamp
            << '\n';
    }
}

OpLog read_text_log(std::istream& in) {
    OpLog records;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.empty() || line[0] == '#') {
            continue;
        }
        std::istringstream fields(line);
        char letter = 0;
        unsigned long thread = 0;
        OpRecord r;
        if (!(fields >> letter >> thread >> r.key >> r.value >> r.timestamp) || thread > 0xffff) {
            throw LogFormatError("line " + std::to_string(line_number) + ": malformed record");
        }
        std::string rest;
        if (fields >> rest) {
            throw LogFormatError("line " + std::to_string(line_number) + ": trailing fields");
        }
        switch (letter) {
            case 'I':
                r.kind = OpKind::insert;
                break;
            case 'D':
                r.kind = OpKind::delete_success;
                break;
            case 'F':
                r.kind = OpKind::delete_failed;
                break;
            default:
                throw LogFormatError("line " + std::to_string(line_number) + ": unknown kind '" + letter + "'");
        }
        r.thread_id = static_cast<std::uint16_t>(thread);
        records.push_back(r);
    }
    return records;
}

OpLog read_log_file(std::filesystem::path const& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw LogFormatError("cannot open " + path.string());
    }
    std::array<char, sizeof(log_magic)> probe{};
    in.read(probe.data(), probe.size());
    bool const binary = in.gcount() == static_cast<std::streamsize>(probe.size()) &&
                        std::memcmp(probe.data(), log_magic, sizeof(log_magic)) == 0;
    in.clear();
    in.seekg(0);
    return binary ? read_binary_log(in) : read_text_log(in);
}

void write_log_file(std::filesystem::path const& path, std::span<OpRecord const> records, bool binary) {
    std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
    if (!out) {
        throw LogFormatError("cannot open " + path.string() + " for writing");
    }
    if (binary) {
        write_binary_log(out, records);
    } else {
        write_text_log(out, records);
    }
}

}  // namespace multiqueue::quality
