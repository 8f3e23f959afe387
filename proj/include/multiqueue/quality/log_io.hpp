#pragma once

#include "multiqueue/quality/replay.hpp"

#include <filesystem>
#include <iosfwd>
#include <span>
#include <stdexcept>

namespace multiqueue::quality {

class LogFormatError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

// Binary layout, all integers little-endian:
//   header (16 bytes): "MQLOG1", 2 zero bytes, u64 record count
//   record (27 bytes): u8 kind, u16 thread_id, u64 key, u64 value, u64 timestamp
inline constexpr char log_magic[6] = {'M', 'Q', 'L', 'O', 'G', '1'};
inline constexpr std::size_t log_header_size = 16;
inline constexpr std::size_t log_record_size = 27;

void write_binary_log(std::ostream& out, std::span<OpRecord const> records);
OpLog read_binary_log(std::istream& in);

// Text form, one record per line: `<I|D|F> <thread> <key> <value> <timestamp>`.
// Blank lines and lines starting with '#' are ignored.
void write_text_log(std::ostream& out, std::span<OpRecord const> records);
OpLog read_text_log(std::istream& in);

// Picks the binary reader if the file starts with the magic, text otherwise.
OpLog read_log_file(std::filesystem::path const& path);
void write_log_file(std::filesystem::path const& path, std::span<OpRecord const> records, bool binary = true);

}  // namespace multiqueue::quality
