#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "interfuse/core/error.hpp"
#include "interfuse/core/strings.hpp"

namespace interfuse::fusion {

enum class FusionMode { classical, quantum };

/// Where the upper threshold comes from: a fixed value, or the unweighted
/// text cosine of each (query, document) pair.
enum class UpperMode { fixed, dynamic_text_sim };

/// What the thresholds are compared against: the weighted joints
/// p(T) = w_text * s_text and p(V) = w_image * s_image, or the raw similarities.
enum class ThresholdBasis { weighted_joint, raw_similarity };

enum class MissingPolicy { zero_with_warning, error };

struct FusionConfig {
    double w_text = 0.5;
    double w_image = 0.5;
    double lower_threshold = 0.01;
    std::optional<double> upper_threshold;
    UpperMode upper_mode = UpperMode::dynamic_text_sim;
    FusionMode mode = FusionMode::quantum;
    ThresholdBasis basis = ThresholdBasis::weighted_joint;
    MissingPolicy missing = MissingPolicy::zero_with_warning;

    /// Bag-of-words setting: equal weights, T_L = 0.01, T_U = text cosine.
    static FusionConfig bow_preset() { return FusionConfig{}; }

    /// Dense-embedding setting: w_text = 0.2, w_image = 0.8, T_L = 0.001.
    /// No upper threshold is published for it, so one must be supplied.
    static FusionConfig enhanced_preset(std::optional<double> upper = std::nullopt) {
        FusionConfig c;
        c.w_text = 0.2;
        c.w_image = 0.8;
        c.lower_threshold = 0.001;
        c.upper_mode = UpperMode::fixed;
        c.upper_threshold = upper;
        return c;
    }

    void validate() const {
        auto unit = [](double x) { return std::isfinite(x) && x >= 0.0 && x <= 1.0; };
        if (!unit(w_text) || !unit(w_image)) throw ValidationError("fusion weights must lie in [0, 1]");
        if (std::abs(w_text + w_image - 1.0) > 1e-12) {
            throw ValidationError("fusion weights must sum to 1 (w_text=" + format_real(w_text) +
                                  ", w_image=" + format_real(w_image) + ")");
        }
        if (!std::isfinite(lower_threshold) || lower_threshold < 0.0) {
            throw ValidationError("t_lower must be a non-negative number");
        }
        if (upper_mode == UpperMode::fixed) {
            if (!upper_threshold) throw ValidationError("t_upper is required when the upper threshold is static");
            if (!std::isfinite(*upper_threshold) || *upper_threshold < 0.0) {
                throw ValidationError("t_upper must be a non-negative number");
            }
            if (lower_threshold > *upper_threshold) throw ValidationError("t_lower must not exceed t_upper");
        }
    }
};

inline std::string_view to_string(FusionMode m) { return m == FusionMode::quantum ? "quantum" : "classical"; }

inline FusionMode parse_fusion_mode(std::string_view s) {
    if (s == "quantum") return FusionMode::quantum;
    if (s == "classical") return FusionMode::classical;
    throw UsageError("unknown fusion mode '" + std::string(s) + "' (expected classical or quantum)");
}

/// Applies one key of the configuration vocabulary:
///   preset = bow | enhanced
///   w_text, w_image, t_lower = <real>
///   t_upper = <real> | dynamic
///   mode = classical | quantum
///   threshold_basis = weighted | raw
///   missing = zero | error
inline void apply_setting(FusionConfig& c, std::string_view key, std::string_view value) {
    auto real = [&](std::string_view v) {
        auto x = parse_real(v);
        if (!x) throw ValidationError("config key '" + std::string(key) + "': '" + std::string(v) + "' is not a number");
        return *x;
    };
    auto bad = [&]() {
        return ValidationError("config key '" + std::string(key) + "': invalid value '" + std::string(value) + "'");
    };
    if (key == "preset") {
        if (value == "bow") {
            c = FusionConfig::bow_preset();
        } else if (value == "enhanced") {
            c = FusionConfig::enhanced_preset();
        } else {
            throw bad();
        }
    } else if (key == "w_text") {
        c.w_text = real(value);
    } else if (key == "w_image") {
        c.w_image = real(value);
    } else if (key == "t_lower") {
        c.lower_threshold = real(value);
    } else if (key == "t_upper") {
        if (value == "dynamic") {
            c.upper_mode = UpperMode::dynamic_text_sim;
            c.upper_threshold.reset();
        } else {
            c.upper_mode = UpperMode::fixed;
            c.upper_threshold = real(value);
        }
    } else if (key == "mode") {
        if (value == "quantum") c.mode = FusionMode::quantum;
        else if (value == "classical") c.mode = FusionMode::classical;
        else throw bad();
    } else if (key == "threshold_basis") {
        if (value == "weighted") c.basis = ThresholdBasis::weighted_joint;
        else if (value == "raw") c.basis = ThresholdBasis::raw_similarity;
        else throw bad();
    } else if (key == "missing") {
        if (value == "zero") c.missing = MissingPolicy::zero_with_warning;
        else if (value == "error") c.missing = MissingPolicy::error;
        else throw bad();
    } else {
        throw ValidationError("unknown config key '" + std::string(key) + "'");
    }
}

/// Applies key/value pairs in order, with any `preset` applied first. When
/// exactly one of the two weights is given, the other becomes its complement.
inline FusionConfig apply_settings(FusionConfig base, const std::vector<std::pair<std::string, std::string>>& kv) {
    for (const auto& [k, v] : kv) {
        if (k == "preset") apply_setting(base, k, v);
    }
    bool text_set = false, image_set = false;
    for (const auto& [k, v] : kv) {
        if (k == "preset") continue;
        apply_setting(base, k, v);
        text_set |= k == "w_text";
        image_set |= k == "w_image";
    }
    if (text_set && !image_set) base.w_image = 1.0 - base.w_text;
    if (image_set && !text_set) base.w_text = 1.0 - base.w_image;
    return base;
}

/// Parses "key = value" lines; '#' and ';' start comments; an optional
/// "[fusion]" section header is accepted.
inline std::vector<std::pair<std::string, std::string>> parse_config_text(std::string_view text,
                                                                          const std::string& origin = "config") {
    std::vector<std::pair<std::string, std::string>> out;
    std::size_t line_no = 0;
    for (auto line : split_on(text, '\n')) {
        ++line_no;
        if (auto hash = line.find_first_of("#;"); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line != "[fusion]") {
                throw ValidationError(location(origin, line_no) + ": unknown section " + std::string(line));
            }
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ValidationError(location(origin, line_no) + ": expected 'key = value'");
        }
        out.emplace_back(std::string(trim(line.substr(0, eq))), std::string(trim(line.substr(eq + 1))));
    }
    return out;
}

/// "key=value" command-line override.
inline std::pair<std::string, std::string> parse_override(std::string_view kv) {
    auto eq = kv.find('=');
    if (eq == std::string_view::npos) throw UsageError("override '" + std::string(kv) + "' is not key=value");
    return {std::string(trim(kv.substr(0, eq))), std::string(trim(kv.substr(eq + 1)))};
}

inline FusionConfig load_config(const std::string& path, FusionConfig base = FusionConfig::bow_preset()) {
    return apply_settings(std::move(base), parse_config_text(read_file(path), path));
}

inline std::string describe(const FusionConfig& c) {
    std::string s = "mode=" + std::string(to_string(c.mode)) + " w_text=" + format_real(c.w_text) +
                    " w_image=" + format_real(c.w_image) + " t_lower=" + format_real(c.lower_threshold) +
                    " t_upper=";
    s += c.upper_mode == UpperMode::dynamic_text_sim ? std::string("dynamic")
         : c.upper_threshold                         ? format_real(*c.upper_threshold)
                                                     : std::string("unset");
    s += c.basis == ThresholdBasis::weighted_joint ? " threshold_basis=weighted" : " threshold_basis=raw";
    return s;
}

}  // namespace interfuse::fusion
