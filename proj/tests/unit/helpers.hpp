#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "interfuse/core/log.hpp"
#include "interfuse/core/strings.hpp"

namespace testing {

inline std::string data(const std::string& rel) { return std::string(INTERFUSE_TEST_DATA) + "/" + rel; }

/// Fresh scratch directory under the system temp dir, removed on scope exit.
class TempDir {
public:
    TempDir() {
        static std::atomic<int> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("interfuse_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    [[nodiscard]] std::string file(const std::string& name) const { return (path_ / name).string(); }
    [[nodiscard]] std::string write(const std::string& name, const std::string& content) const {
        const auto p = file(name);
        std::ofstream(p, std::ios::binary) << content;
        return p;
    }
    [[nodiscard]] const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

/// Collects warnings emitted while alive; info messages are dropped.
class WarningCapture {
public:
    WarningCapture()
        : sink_([this](interfuse::log::Level l, std::string_view m) {
              if (l == interfuse::log::Level::warning) messages.emplace_back(m);
          }) {}
    std::vector<std::string> messages;

private:
    interfuse::log::ScopedSink sink_;
};

inline bool contains(const std::string& haystack, const std::string& needle) {
    return haystack.find(needle) != std::string::npos;
}

}  // namespace testing
