#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "interfuse/core/error.hpp"
#include "interfuse/ingest/vectors.hpp"
#include "interfuse/visual/descriptors.hpp"

namespace interfuse::visual {

/// K visual words of a fixed dimension. Centroids are kept at single
/// precision so a codebook written to an IFV1 file reloads bit-identically.
class Codebook {
public:
    Codebook(std::size_t dim, std::vector<float> centroids, std::uint64_t seed = 0)
        : dim_(dim), centroids_(std::move(centroids)), seed_(seed) {
        if (dim_ == 0 || centroids_.empty() || centroids_.size() % dim_ != 0) {
            throw ValidationError("codebook: centroid storage does not match dimension");
        }
        for (float x : centroids_) {
            if (!std::isfinite(x)) throw ValidationError("codebook: non-finite centroid component");
        }
    }

    [[nodiscard]] std::size_t size() const { return centroids_.size() / dim_; }
    [[nodiscard]] std::size_t dim() const { return dim_; }
    [[nodiscard]] std::uint64_t seed() const { return seed_; }
    [[nodiscard]] std::span<const float> centroid(std::size_t k) const {
        return std::span<const float>(centroids_).subspan(k * dim_, dim_);
    }

    /// Index of the nearest centroid (squared Euclidean), ties to the lowest index.
    [[nodiscard]] std::size_t nearest(std::span<const float> x) const {
        std::size_t best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < size(); ++k) {
            const double d = squared_distance(x, centroid(k));
            if (d < best_d) {
                best_d = d;
                best = k;
            }
        }
        return best;
    }

    [[nodiscard]] std::vector<ingest::DenseVector> to_vectors() const {
        std::vector<ingest::DenseVector> out;
        for (std::size_t k = 0; k < size(); ++k) {
            auto c = centroid(k);
            out.push_back({"centroid_" + std::to_string(k), std::vector<float>(c.begin(), c.end())});
        }
        return out;
    }

    static Codebook from_vectors(const std::vector<ingest::DenseVector>& vectors) {
        if (vectors.empty()) throw ValidationError("codebook file holds no centroids");
        const std::size_t dim = ingest::common_dim(vectors);
        std::vector<float> c;
        for (const auto& v : vectors) c.insert(c.end(), v.values.begin(), v.values.end());
        return Codebook(dim, std::move(c));
    }

    bool operator==(const Codebook& o) const { return dim_ == o.dim_ && centroids_ == o.centroids_; }

    static double squared_distance(std::span<const float> a, std::span<const float> b) {
        double acc = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
            acc += d * d;
        }
        return acc;
    }

private:
    std::size_t dim_;
    std::vector<float> centroids_;
    std::uint64_t seed_;
};

struct KMeansOptions {
    std::size_t k = 1000;
    std::uint64_t seed = 0;
    std::size_t max_iters = 100;
};

struct KMeansResult {
    Codebook codebook;
    /// Sum of squared distances to assigned centroids, after each update step.
    std::vector<double> inertia;
    std::size_t iterations = 0;
    bool converged = false;
};

namespace detail {

// Uniform in [0, 1) from the top 53 bits; std distributions are not
// reproducible across standard library implementations.
inline double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline double sq_dist(std::span<const float> x, std::span<const double> c) {
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = static_cast<double>(x[i]) - c[i];
        acc += d * d;
    }
    return acc;
}

}  // namespace detail

/// k-means++ seeding followed by Lloyd iterations until the assignment stops
/// changing or max_iters assignment steps have run. A cluster left empty is
/// re-seeded with the point farthest from its current centroid.
inline KMeansResult learn_codebook(const std::vector<DescriptorSet>& train, const KMeansOptions& opt) {
    if (opt.k == 0) throw ValidationError("codebook size K must be positive");
    if (opt.max_iters == 0) throw ValidationError("max_iters must be positive");
    std::vector<std::span<const float>> points;
    std::size_t dim = 0;
    for (const auto& s : train) {
        if (dim == 0) dim = s.dim();
        if (s.dim() != dim) throw ValidationError("descriptor sets have inconsistent dimensions");
        for (std::size_t i = 0; i < s.size(); ++i) points.push_back(s.row(i));
    }
    const std::size_t n = points.size();
    const std::size_t K = opt.k;
    if (n < K) {
        throw ValidationError("k-means needs at least K=" + std::to_string(K) + " descriptors, got " +
                              std::to_string(n));
    }

    std::mt19937_64 rng(opt.seed);
    std::vector<double> centroids(K * dim);
    auto centroid = [&](std::size_t k) { return std::span<double>(centroids).subspan(k * dim, dim); };
    auto set_centroid = [&](std::size_t k, std::span<const float> x) {
        auto c = centroid(k);
        for (std::size_t i = 0; i < dim; ++i) c[i] = x[i];
    };

    // k-means++ seeding.
    std::vector<double> d2(n, std::numeric_limits<double>::infinity());
    set_centroid(0, points[static_cast<std::size_t>(detail::uniform01(rng) * static_cast<double>(n))]);
    for (std::size_t k = 1; k < K; ++k) {
        double total = 0.0;
        for (std::size_t p = 0; p < n; ++p) {
            d2[p] = std::min(d2[p], detail::sq_dist(points[p], centroid(k - 1)));
            total += d2[p];
        }
        std::size_t pick = n - 1;
        if (total > 0.0) {
            const double target = detail::uniform01(rng) * total;
            double cum = 0.0;
            for (std::size_t p = 0; p < n; ++p) {
                if (d2[p] == 0.0) continue;
                pick = p;
                cum += d2[p];
                if (cum > target) break;
            }
        } else {
            pick = static_cast<std::size_t>(detail::uniform01(rng) * static_cast<double>(n));
        }
        set_centroid(k, points[pick]);
    }

    std::vector<std::size_t> labels(n, K), previous;
    std::vector<double> dist(n);
    std::vector<std::size_t> counts(K);
    KMeansResult result{Codebook(dim, std::vector<float>(dim, 0.0f)), {}, 0, false};

    for (std::size_t iter = 0; iter < opt.max_iters; ++iter) {
        previous = labels;
        std::fill(counts.begin(), counts.end(), 0);
        for (std::size_t p = 0; p < n; ++p) {
            std::size_t best = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (std::size_t k = 0; k < K; ++k) {
                const double d = detail::sq_dist(points[p], centroid(k));
                if (d < best_d) {
                    best_d = d;
                    best = k;
                }
            }
            labels[p] = best;
            dist[p] = best_d;
            ++counts[best];
        }
        ++result.iterations;
        if (labels == previous) {
            result.converged = true;
            break;
        }

        for (std::size_t k = 0; k < K; ++k) {
            if (counts[k] != 0) continue;
            std::size_t far = n;
            for (std::size_t p = 0; p < n; ++p) {
                if (counts[labels[p]] > 1 && (far == n || dist[p] > dist[far])) far = p;
            }
            --counts[labels[far]];
            labels[far] = k;
            counts[k] = 1;
            dist[far] = 0.0;
            set_centroid(k, points[far]);
        }

        std::fill(centroids.begin(), centroids.end(), 0.0);
        for (std::size_t p = 0; p < n; ++p) {
            auto c = centroid(labels[p]);
            for (std::size_t i = 0; i < dim; ++i) c[i] += points[p][i];
        }
        for (std::size_t k = 0; k < K; ++k) {
            auto c = centroid(k);
            for (auto& x : c) x /= static_cast<double>(counts[k]);
        }

        double inertia = 0.0;
        for (std::size_t p = 0; p < n; ++p) inertia += detail::sq_dist(points[p], centroid(labels[p]));
        result.inertia.push_back(inertia);
    }

    std::vector<float> rounded(centroids.begin(), centroids.end());
    result.codebook = Codebook(dim, std::move(rounded), opt.seed);
    return result;
}

}  // namespace interfuse::visual
