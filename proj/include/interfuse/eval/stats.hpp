#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "interfuse/core/error.hpp"
#include "interfuse/core/numeric.hpp"
#include "interfuse/eval/metrics.hpp"

namespace interfuse::eval {

struct PairedTTest {
    double mean_diff = 0.0;  // mean of (b - a)
    double sd_diff = 0.0;
    double t = 0.0;
    double df = 0.0;
    double p_value = 1.0;  // two-tailed
};

/// Paired two-tailed Student t-test on b - a. When every difference is
/// identical the statistic degenerates: p = 1 for zero differences ("no
/// difference"), p = 0 otherwise.
inline PairedTTest paired_t_test(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw ValidationError("paired_t_test: samples differ in length");
    if (a.size() < 2) throw ValidationError("paired_t_test: need at least 2 paired samples");
    std::vector<double> d(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) d[i] = b[i] - a[i];
    PairedTTest r;
    const double n = static_cast<double>(d.size());
    r.df = n - 1.0;
    r.mean_diff = mean(d);
    r.sd_diff = sample_sd(d);
    if (r.sd_diff == 0.0) {
        if (r.mean_diff == 0.0) {
            r.t = 0.0;
            r.p_value = 1.0;
        } else {
            r.t = std::copysign(std::numeric_limits<double>::infinity(), r.mean_diff);
            r.p_value = 0.0;
        }
        return r;
    }
    r.t = r.mean_diff / (r.sd_diff / std::sqrt(n));
    boost::math::students_t dist(r.df);
    r.p_value = std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(r.t))));
    return r;
}

struct WilcoxonTest {
    enum class Method { exact, permutation, normal, degenerate };

    double w_plus = 0.0;
    double w_minus = 0.0;
    double statistic = 0.0;  // min(w_plus, w_minus)
    double z = std::numeric_limits<double>::quiet_NaN();
    double p_value = 1.0;  // two-tailed
    std::size_t nonzero = 0;
    Method method = Method::degenerate;
};

namespace detail {

// Average ranks of |d| over the nonzero differences.
inline std::vector<double> average_ranks(const std::vector<double>& absd) {
    std::vector<std::size_t> order(absd.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return absd[x] < absd[y]; });
    std::vector<double> ranks(absd.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && absd[order[j + 1]] == absd[order[i]]) ++j;
        const double avg = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = avg;
        i = j + 1;
    }
    return ranks;
}

}  // namespace detail

/// Two-sided Wilcoxon signed-rank test on b - a. Zero differences are
/// dropped before ranking and ties get average ranks. The p-value comes from
/// the exact null distribution when there are no ties or zeros (n <= 50), an
/// exhaustive sign-flip enumeration for n <= 13 otherwise, and the
/// tie-corrected normal approximation (no continuity correction) beyond that.
inline WilcoxonTest wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw ValidationError("wilcoxon: samples differ in length");
    if (a.empty()) throw ValidationError("wilcoxon: no paired samples");
    const std::size_t n_total = a.size();
    std::vector<double> d, absd;
    std::size_t zeros = 0;
    for (std::size_t i = 0; i < n_total; ++i) {
        const double x = b[i] - a[i];
        if (x == 0.0) {
            ++zeros;
            continue;
        }
        d.push_back(x);
        absd.push_back(std::abs(x));
    }
    WilcoxonTest r;
    r.nonzero = d.size();
    if (d.empty()) return r;

    const auto ranks = detail::average_ranks(absd);
    for (std::size_t i = 0; i < d.size(); ++i) (d[i] > 0 ? r.w_plus : r.w_minus) += ranks[i];
    r.statistic = std::min(r.w_plus, r.w_minus);

    std::vector<double> sorted = absd;
    std::sort(sorted.begin(), sorted.end());
    const bool ties = std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end();
    const std::size_t m = d.size();
    const double mn = static_cast<double>(m) * static_cast<double>(m + 1) / 4.0;

    if (n_total <= 50 && !ties && zeros == 0) {
        // Null distribution of W+ over subsets of {1..m}.
        const std::size_t max_sum = m * (m + 1) / 2;
        std::vector<double> count(max_sum + 1, 0.0);
        count[0] = 1.0;
        for (std::size_t k = 1; k <= m; ++k) {
            for (std::size_t s = max_sum; s >= k; --s) count[s] += count[s - k];
        }
        const double total = std::ldexp(1.0, static_cast<int>(m));
        const auto w = static_cast<std::size_t>(std::llround(r.w_plus));
        double le = 0.0, ge = 0.0;
        for (std::size_t s = 0; s <= max_sum; ++s) {
            if (s <= w) le += count[s];
            if (s >= w) ge += count[s];
        }
        r.p_value = std::clamp(2.0 * std::min(le, ge) / total, 0.0, 1.0);
        r.method = WilcoxonTest::Method::exact;
        return r;
    }
    if (n_total <= 13) {
        const std::uint32_t combos = 1u << m;
        double le = 0.0, ge = 0.0;
        // Relative tolerance for comparing sums of half-integer ranks.
        const double eps = 1e-12 * std::max(1.0, r.w_plus);
        for (std::uint32_t mask = 0; mask < combos; ++mask) {
            double s = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                if (mask & (1u << i)) s += ranks[i];
            }
            if (s <= r.w_plus + eps) le += 1.0;
            if (s >= r.w_plus - eps) ge += 1.0;
        }
        r.p_value = std::clamp(2.0 * std::min(le, ge) / static_cast<double>(combos), 0.0, 1.0);
        r.method = WilcoxonTest::Method::permutation;
        return r;
    }
    double tie_term = 0.0;
    for (std::size_t i = 0; i < sorted.size();) {
        std::size_t j = i;
        while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
        const double t = static_cast<double>(j - i);
        tie_term += t * t * t - t;
        i = j;
    }
    const double var = static_cast<double>(m) * static_cast<double>(m + 1) * static_cast<double>(2 * m + 1) / 24.0 -
                       tie_term / 48.0;
    const double se = std::sqrt(var);
    r.z = (r.w_plus - mn) / se;
    r.p_value = std::min(1.0, std::erfc(std::abs(r.z) / std::sqrt(2.0)));
    r.method = WilcoxonTest::Method::normal;
    return r;
}

struct RunComparison {
    Metric metric = Metric::average_precision;
    std::vector<std::string> query_ids;
    std::vector<double> a;
    std::vector<double> b;
    double mean_a = 0.0;
    double mean_b = 0.0;
    double sd_a = 0.0;
    double sd_b = 0.0;
    PairedTTest t_test;
    WilcoxonTest wilcoxon;

    /// "b>a", "a>b", or "none" by the sign of the mean difference.
    [[nodiscard]] std::string direction() const {
        if (mean_b > mean_a) return "b>a";
        if (mean_a > mean_b) return "a>b";
        return "none";
    }
};

/// Pairs per-query values of one metric across two reports and tests the
/// difference. Both reports must cover the same evaluated queries.
inline RunComparison compare_runs(const MetricReport& a, const MetricReport& b, Metric metric) {
    RunComparison c;
    c.metric = metric;
    c.query_ids = a.evaluated_ids();
    if (c.query_ids != b.evaluated_ids()) throw ValidationError("compare_runs: the runs cover different query sets");
    if (c.query_ids.size() < 2) throw ValidationError("compare_runs: need at least 2 evaluated queries");
    c.a = a.values(metric);
    c.b = b.values(metric);
    c.mean_a = mean(c.a);
    c.mean_b = mean(c.b);
    c.sd_a = sample_sd(c.a);
    c.sd_b = sample_sd(c.b);
    c.t_test = paired_t_test(c.a, c.b);
    c.wilcoxon = wilcoxon_signed_rank(c.a, c.b);
    return c;
}

inline std::string_view to_string(WilcoxonTest::Method m) {
    switch (m) {
        case WilcoxonTest::Method::exact: return "exact";
        case WilcoxonTest::Method::permutation: return "permutation";
        case WilcoxonTest::Method::normal: return "normal";
        case WilcoxonTest::Method::degenerate: return "degenerate";
    }
    return "?";
}

/// Per-query paired values of every metric, one row per query (gnuplot-ready).
inline void write_comparison_csv(const MetricReport& a, const MetricReport& b, const std::string& path) {
    const auto ids = a.evaluated_ids();
    if (ids != b.evaluated_ids()) throw ValidationError("compare: the runs cover different query sets");
    auto out = open_output(path, std::ios::out | std::ios::binary);
    out << "query_id";
    for (auto m : kAllMetrics) out << ',' << to_string(m) << "_a," << to_string(m) << "_b";
    out << '\n';
    std::vector<std::vector<double>> va, vb;
    for (auto m : kAllMetrics) {
        va.push_back(a.values(m));
        vb.push_back(b.values(m));
    }
    for (std::size_t q = 0; q < ids.size(); ++q) {
        out << ids[q];
        for (std::size_t m = 0; m < va.size(); ++m) out << ',' << format_real(va[m][q]) << ',' << format_real(vb[m][q]);
        out << '\n';
    }
    if (!out) throw IoError("write failed: " + path);
}

inline void write_comparison_summary_csv(const std::vector<RunComparison>& rows, const std::string& path) {
    auto out = open_output(path, std::ios::out | std::ios::binary);
    out << "metric,queries,mean_a,mean_b,sd_a,sd_b,mean_diff,t,p_value_t,w_statistic,p_value_wilcoxon,"
           "wilcoxon_method,direction\n";
    for (const auto& c : rows) {
        out << to_string(c.metric) << ',' << c.query_ids.size() << ',' << format_real(c.mean_a) << ','
            << format_real(c.mean_b) << ',' << format_real(c.sd_a) << ',' << format_real(c.sd_b) << ','
            << format_real(c.t_test.mean_diff) << ',' << format_real(c.t_test.t) << ','
            << format_real(c.t_test.p_value) << ',' << format_real(c.wilcoxon.statistic) << ','
            << format_real(c.wilcoxon.p_value) << ',' << to_string(c.wilcoxon.method) << ',' << c.direction() << '\n';
    }
    if (!out) throw IoError("write failed: " + path);
}

}  // namespace interfuse::eval
