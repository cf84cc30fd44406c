#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "interfuse/core/error.hpp"

namespace interfuse::ingest {

struct LineIssue {
    std::size_t line = 0;
    std::string message;
};

/// Accounting for one loader call. Every non-blank input record ends up either
/// accepted or in `errors`, so records_seen == accepted + errors.size().
struct LoadReport {
    std::string path;
    std::size_t records_seen = 0;
    std::size_t accepted = 0;
    std::vector<LineIssue> errors;
    std::vector<std::string> warnings;

    void reject(std::size_t line, std::string message) {
        errors.push_back({line, std::move(message)});
    }

    [[nodiscard]] bool ok() const { return errors.empty(); }

    [[nodiscard]] std::string summary(std::size_t max_lines = 10) const {
        std::string s = path + ": " + std::to_string(errors.size()) + " invalid record(s)";
        for (std::size_t i = 0; i < errors.size() && i < max_lines; ++i) {
            s += "\n  line " + std::to_string(errors[i].line) + ": " + errors[i].message;
        }
        if (errors.size() > max_lines) s += "\n  ...";
        return s;
    }

    void throw_if_failed() const {
        if (!ok()) throw ValidationError(summary());
    }
};

}  // namespace interfuse::ingest
