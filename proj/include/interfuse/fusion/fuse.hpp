#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "interfuse/core/error.hpp"
#include "interfuse/eval/run.hpp"
#include "interfuse/fusion/config.hpp"

namespace interfuse::fusion {

/// Per-document fusion input: text similarity p(R|T), image similarity
/// p(R|V), and the unweighted text cosine that the dynamic upper threshold uses.
struct FusionInput {
    double s_text = 0.0;
    double s_image = 0.0;
    std::optional<double> raw_text_sim;
};

enum class Rule { R1, R2, R3, R4, none };

inline std::string_view to_string(Rule r) {
    switch (r) {
        case Rule::R1: return "R1";
        case Rule::R2: return "R2";
        case Rule::R3: return "R3";
        case Rule::R4: return "R4";
        case Rule::none: return "none";
    }
    return "none";
}

/// The rule table's outcome for one document. cos_theta is +1 for R1 (the
/// modalities reinforce), -1 for R2..R4 (they conflict) and 0 otherwise.
struct InterferenceDecision {
    int cos_theta = 0;
    Rule fired_rule = Rule::none;
    double p_text = 0.0;   // w_text * s_text
    double p_image = 0.0;  // w_image * s_image
    double upper_threshold = 0.0;
};

inline int cos_theta_of(Rule r) {
    switch (r) {
        case Rule::R1: return +1;
        case Rule::R2:
        case Rule::R3:
        case Rule::R4: return -1;
        case Rule::none: return 0;
    }
    return 0;
}

struct FusedScore {
    std::string doc_id;
    double score = 0.0;
    InterferenceDecision decision;
};

namespace detail {

inline void check_input(const FusionInput& in) {
    auto unit = [](double x) { return std::isfinite(x) && x >= 0.0 && x <= 1.0; };
    if (!unit(in.s_text) || !unit(in.s_image)) {
        throw ValidationError("fusion input scores must lie in [0, 1] (text=" + format_real(in.s_text) +
                              ", image=" + format_real(in.s_image) + ")");
    }
    if (in.raw_text_sim && !unit(*in.raw_text_sim)) throw ValidationError("raw text similarity must lie in [0, 1]");
}

}  // namespace detail

/// Plain rule table over already-weighted (or raw) probabilities. Strict
/// comparisons throughout; rules are tried R1..R4 and the first match wins.
inline Rule fire_rule(double p_text, double p_image, double lower, double upper) {
    if (p_text > upper && p_image > lower) return Rule::R1;
    if (p_text > upper && p_image < lower) return Rule::R2;
    if (p_text < lower && p_image > upper) return Rule::R3;
    if (p_text < upper && p_image < lower) return Rule::R4;
    return Rule::none;
}

/// Law of total probability: w_text * s_text + w_image * s_image.
inline double classical_fuse(const FusionInput& in, const FusionConfig& cfg) {
    detail::check_input(in);
    return cfg.w_text * in.s_text + cfg.w_image * in.s_image;
}

inline double resolve_upper_threshold(const FusionInput& in, const FusionConfig& cfg) {
    if (cfg.upper_mode == UpperMode::dynamic_text_sim) {
        if (!in.raw_text_sim) throw ValidationError("dynamic upper threshold needs the raw text similarity");
        return *in.raw_text_sim;
    }
    if (!cfg.upper_threshold) throw ValidationError("upper threshold is not set");
    return *cfg.upper_threshold;
}

inline InterferenceDecision decide_interference(const FusionInput& in, const FusionConfig& cfg) {
    detail::check_input(in);
    InterferenceDecision d;
    d.p_text = cfg.w_text * in.s_text;
    d.p_image = cfg.w_image * in.s_image;
    d.upper_threshold = resolve_upper_threshold(in, cfg);
    const bool raw = cfg.basis == ThresholdBasis::raw_similarity;
    d.fired_rule = fire_rule(raw ? in.s_text : d.p_text, raw ? in.s_image : d.p_image, cfg.lower_threshold,
                             d.upper_threshold);
    d.cos_theta = cos_theta_of(d.fired_rule);
    return d;
}

/// p(T) + p(V) + 2 sqrt(p(T) p(V)) cos(theta).
inline double interference_score(double p_text, double p_image, int cos_theta) {
    const double radicand = p_text * p_image;
    if (!(radicand >= 0.0)) throw Error("interference_score: negative radicand");
    return p_text + p_image + 2.0 * std::sqrt(radicand) * static_cast<double>(cos_theta);
}

inline FusedScore quantum_fuse(const FusionInput& in, const FusionConfig& cfg, std::string doc_id = {}) {
    auto d = decide_interference(in, cfg);
    const double score = interference_score(d.p_text, d.p_image, d.cos_theta);
    return {std::move(doc_id), score, d};
}

/// Fuses by cfg.mode. In classical mode the decision carries the weighted
/// joints but no interference (rule none, cos theta 0).
inline FusedScore fuse(const FusionInput& in, const FusionConfig& cfg, std::string doc_id = {}) {
    if (cfg.mode == FusionMode::quantum) return quantum_fuse(in, cfg, std::move(doc_id));
    InterferenceDecision d;
    d.p_text = cfg.w_text * in.s_text;
    d.p_image = cfg.w_image * in.s_image;
    if (cfg.upper_mode == UpperMode::fixed && cfg.upper_threshold) d.upper_threshold = *cfg.upper_threshold;
    else if (in.raw_text_sim) d.upper_threshold = *in.raw_text_sim;
    return {std::move(doc_id), classical_fuse(in, cfg), d};
}

/// Descending by score, ties by ascending doc id.
inline eval::Ranking rank(std::vector<FusedScore> fused) {
    std::sort(fused.begin(), fused.end(), [](const FusedScore& a, const FusedScore& b) {
        return a.score != b.score ? a.score > b.score : a.doc_id < b.doc_id;
    });
    eval::Ranking out;
    out.reserve(fused.size());
    for (auto& f : fused) out.push_back({std::move(f.doc_id), f.score});
    return out;
}

}  // namespace interfuse::fusion
