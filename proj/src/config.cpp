#include "multiqueue/config.hpp"

namespace multiqueue {

void Config::validate() const {
    if (num_threads == 0) {
        throw ConfigError("number of threads must be positive");
    }
    if (queue_factor == 0) {
        throw ConfigError("queue factor must be positive");
    }
    if (stickiness == Stickiness::none && queue_factor <= 1) {
        throw ConfigError("queue factor must be greater than 1 without stickiness");
    }
    if (candidates == 0) {
        throw ConfigError("number of deletion candidates must be at least 1");
    }
    if (candidates > num_queues()) {
        throw ConfigError("more deletion candidates than queues");
    }
    if (stickiness != Stickiness::none && candidates > queue_factor) {
        throw ConfigError("deletion candidates must not exceed the queue factor with stickiness");
    }
    if (stickiness == Stickiness::swap && num_queues() < 2) {
        throw ConfigError("swap stickiness needs at least two queues");
    }
    if (stickiness_period == 0) {
        throw ConfigError("stickiness period must be at least 1");
    }
    if (insertion_buffer_size == 0 || deletion_buffer_size == 0) {
        throw ConfigError("buffer sizes must be positive");
    }
    if (heap_arity < 2) {
        throw ConfigError("heap arity must be at least 2");
    }
    if (!is_power_of_two(cache_line_size) || cache_line_size < 16) {
        throw ConfigError("cache line size must be a power of two >= 16");
    }
}

Config apply_preset(Config base, Preset preset) {
    base.queue_factor = 2;
    switch (preset) {
        case Preset::strict:
            base.stickiness = Stickiness::none;
            base.stickiness_period = 1;
            break;
        case Preset::quality:
            base.stickiness = Stickiness::simple;
            base.stickiness_period = 4;
            break;
        case Preset::balanced:
            base.stickiness = Stickiness::swap;
            base.stickiness_period = 256;
            break;
        case Preset::fast:
            base.stickiness = Stickiness::simple;
            base.stickiness_period = 4096;
            break;
    }
    return base;
}

std::optional<Preset> parse_preset(std::string_view name) {
    if (name == "strict") {
        return Preset::strict;
    }
    if (name == "quality") {
        return Preset::quality;
    }
    if (name == "balanced") {
        return Preset::balanced;
    }
    if (name == "fast") {
        return Preset::fast;
    }
    return std::nullopt;
}

std::optional<Stickiness> parse_stickiness(std::string_view name) {
    if (name == "none") {
        return Stickiness::none;
    }
    if (name == "simple") {
        return Stickiness::simple;
    }
    if (name == "swap") {
        return Stickiness::swap;
    }
    return std::nullopt;
}

std::string_view to_string(Preset preset) {
    switch (preset) {
        case Preset::strict:
            return "strict";
        case Preset::quality:
            return "quality";
        case Preset::balanced:
            return "balanced";
        case Preset::fast:
            return "fast";
    }
    return "unknown";
}

std::string_view to_string(Stickiness stickiness) {
    switch (stickiness) {
        case Stickiness::none:
            return "none";
        case Stickiness::simple:
            return "simple";
        case Stickiness::swap:
            return "swap";
    }
    return "unknown";
}

}  // namespace multiqueue
