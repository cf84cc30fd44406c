#pragma once

#include <functional>
#include <iostream>
#include <mutex>
#include <string>
#include <string_view>
#include <utility>

namespace interfuse::log {

enum class Level { info, warning };

using Sink = std::function<void(Level, std::string_view)>;

namespace detail {

inline std::mutex& sink_mutex() {
    static std::mutex m;
    return m;
}

inline Sink& sink() {
    static Sink s = [](Level level, std::string_view msg) {
        std::cerr << (level == Level::warning ? "warning: " : "info: ") << msg << '\n';
    };
    return s;
}

}  // namespace detail

/// Replace the process-wide sink; returns the previous one.
inline Sink set_sink(Sink s) {
    std::lock_guard lock(detail::sink_mutex());
    return std::exchange(detail::sink(), std::move(s));
}

inline void emit(Level level, std::string_view msg) {
    std::lock_guard lock(detail::sink_mutex());
    if (detail::sink()) detail::sink()(level, msg);
}

inline void warn(std::string_view msg) { emit(Level::warning, msg); }
inline void info(std::string_view msg) { emit(Level::info, msg); }

/// Installs a sink for the lifetime of the object, e.g. to capture warnings in tests.
class ScopedSink {
public:
    explicit ScopedSink(Sink s) : previous_(set_sink(std::move(s))) {}
    ~ScopedSink() { set_sink(std::move(previous_)); }
    ScopedSink(const ScopedSink&) = delete;
    ScopedSink& operator=(const ScopedSink&) = delete;

private:
    Sink previous_;
};

}  // namespace interfuse::log
