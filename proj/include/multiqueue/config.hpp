#pragma once

#include "multiqueue/cache_line.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace multiqueue {

enum class Stickiness { none, simple, swap };

enum class Preset { strict, quality, balanced, fast };

class ConfigError : public std::invalid_argument {
   public:
    using std::invalid_argument::invalid_argument;
};

struct Config {
    std::size_t num_threads = 1;    // p
    std::size_t queue_factor = 2;   // c, the queue array holds c * p queues
    std::size_t candidates = 2;     // d
    Stickiness stickiness = Stickiness::none;
    std::size_t stickiness_period = 1;  // s
    std::size_t insertion_buffer_size = 16;
    std::size_t deletion_buffer_size = 16;
    std::size_t heap_arity = 8;
    std::uint64_t seed = 1;
    // Failed plain deletions retried before delete-with-scan falls back to a
    // linear pass over all queues.
    std::size_t scan_retries = 2;
    std::size_t cache_line_size = build_cache_line_size;
    // Heap capacity reserved per internal queue up front.
    std::size_t reserve_per_queue = 0;

    [[nodiscard]] std::size_t num_queues() const noexcept {
        return queue_factor * num_threads;
    }

    // Throws ConfigError describing the first violated constraint.
    void validate() const;
};

// Stickiness mode, queue factor and period of a named configuration; the
// remaining fields of `base` are kept.
Config apply_preset(Config base, Preset preset);

std::optional<Preset> parse_preset(std::string_view name);
std::optional<Stickiness> parse_stickiness(std::string_view name);
std::string_view to_string(Preset preset);
std::string_view to_string(Stickiness stickiness);

}  // namespace multiqueue
