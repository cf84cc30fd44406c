#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "interfuse/core/error.hpp"
#include "interfuse/core/log.hpp"
#include "interfuse/core/numeric.hpp"
#include "interfuse/ingest/vectors.hpp"
#include "interfuse/visual/descriptors.hpp"
#include "interfuse/visual/kmeans.hpp"

namespace interfuse::visual {

/// Visual-word counts of one image, L2-normalized (all-zero for an image
/// without descriptors).
struct VisualHistogram {
    std::string image_id;
    std::vector<double> weights;
};

/// Assigns every descriptor to its nearest visual word and normalizes the counts.
inline VisualHistogram quantize(const DescriptorSet& image, const Codebook& cb) {
    if (image.dim() != cb.dim()) {
        throw ValidationError("quantize: image '" + image.image_id() + "' has descriptor dim " +
                              std::to_string(image.dim()) + ", codebook dim " + std::to_string(cb.dim()));
    }
    VisualHistogram h{image.image_id(), std::vector<double>(cb.size(), 0.0)};
    if (image.empty()) {
        log::warn("quantize: image '" + image.image_id() + "' has no descriptors; histogram is all-zero");
        return h;
    }
    for (std::size_t i = 0; i < image.size(); ++i) h.weights[cb.nearest(image.row(i))] += 1.0;
    double sq = 0.0;
    for (double c : h.weights) sq += c * c;
    const double norm = std::sqrt(sq);
    for (double& c : h.weights) c /= norm;
    return h;
}

inline ingest::DenseVector to_dense(const VisualHistogram& h) {
    return {h.image_id, std::vector<float>(h.weights.begin(), h.weights.end())};
}

/// Cosine similarity clamped to [0, 1]; 0 when either vector is zero.
/// Negative cosines map to 0 so the result can serve as a probability.
template <class T, class U>
double image_score(std::span<const T> query, std::span<const U> doc) {
    if (query.size() != doc.size()) {
        throw ValidationError("image_score: dimension mismatch (" + std::to_string(query.size()) + " vs " +
                              std::to_string(doc.size()) + ")");
    }
    double dot = 0.0, qq = 0.0, dd = 0.0;
    for (std::size_t i = 0; i < query.size(); ++i) {
        const double a = static_cast<double>(query[i]);
        const double b = static_cast<double>(doc[i]);
        dot += a * b;
        qq += a * a;
        dd += b * b;
    }
    if (qq == 0.0 || dd == 0.0) return 0.0;
    return std::clamp(dot / (std::sqrt(qq) * std::sqrt(dd)), 0.0, 1.0);
}

inline double image_score(const std::vector<float>& query, const std::vector<float>& doc) {
    return image_score(std::span<const float>(query), std::span<const float>(doc));
}

inline double image_score(const std::vector<double>& query, const std::vector<double>& doc) {
    return image_score(std::span<const double>(query), std::span<const double>(doc));
}

enum class Aggregate { max, mean };

inline Aggregate parse_aggregate(std::string_view tag) {
    if (tag == "max") return Aggregate::max;
    if (tag == "mean") return Aggregate::mean;
    throw UsageError("unknown aggregate mode '" + std::string(tag) + "' (expected max or mean)");
}

/// Combines the per-sample-image scores of one multi-image query.
inline double aggregate_query_images(std::span<const double> per_image_scores, Aggregate mode = Aggregate::max) {
    if (per_image_scores.empty()) throw ValidationError("aggregate_query_images: no per-image scores");
    for (double s : per_image_scores) {
        if (!(s >= 0.0 && s <= 1.0)) throw ValidationError("aggregate_query_images: score outside [0, 1]");
    }
    if (mode == Aggregate::max) return *std::max_element(per_image_scores.begin(), per_image_scores.end());
    return mean(per_image_scores);
}

}  // namespace interfuse::visual
