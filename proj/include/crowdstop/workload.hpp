#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "crowdstop/core.hpp"
#include "crowdstop/rng.hpp"

namespace crowdstop {

// ---------------------------------------------------------------------------
// Uniform-bias workload: two-answer HITs whose bias is drawn uniformly from
// [bias_low, bias_high]. Answer 0 is always the correct one, with
// truth = [(1+b)/2, (1-b)/2].
// ---------------------------------------------------------------------------

struct UniformBiasSpec {
    int n_hits = 10000;
    double bias_low = 0.1;
    double bias_high = 0.6;
};

inline void validate(const UniformBiasSpec& spec) {
    if (spec.n_hits < 1) {
        throw std::invalid_argument("UniformBiasSpec: n_hits must be >= 1");
    }
    if (!(spec.bias_low >= 0.0 && spec.bias_high <= 1.0 && spec.bias_low <= spec.bias_high)) {
        throw std::invalid_argument("UniformBiasSpec: need 0 <= bias_low <= bias_high <= 1");
    }
}

inline std::vector<HitSpec> gen_uniform_bias(const UniformBiasSpec& spec, RngStream rng) {
    validate(spec);
    std::vector<HitSpec> hits;
    hits.reserve(static_cast<std::size_t>(spec.n_hits));
    for (int i = 0; i < spec.n_hits; ++i) {
        RngStream sub = rng.child(static_cast<std::uint64_t>(i));
        const double b = spec.bias_low + (spec.bias_high - spec.bias_low) * sub.uniform01();
        hits.emplace_back(static_cast<std::uint64_t>(i),
                          std::vector<double>{(1.0 + b) / 2.0, (1.0 - b) / 2.0});
    }
    return hits;
}

// ---------------------------------------------------------------------------
// Group-table workload: 9 worker groups x 9 HIT groups. Cell (i, j) of the
// shipped diff table is the percent-point excess error of worker group i
// (i = 1..8) over group 0 on HIT group j; group 0's own error column is a
// user-supplied baseline. Worker groups map to coarse quality classes
// three at a time (0-2 good, 3-5 average, 6-8 bad).
// ---------------------------------------------------------------------------

inline constexpr int kNumWorkerGroups = 9;
inline constexpr int kNumHitGroups = 9;

// Percent-point error differences, [hit_group][worker_group - 1].
inline constexpr std::array<std::array<double, 8>, 9> kGroupDiffTable = {{
    {0, 0, 0, 1, 1, 1, 2, 4},
    {1, 1, 2, 2, 3, 4, 6, 15},
    {1, 3, 3, 4, 6, 8, 11, 20},
    {1, 4, 4, 7, 7, 11, 16, 27},
    {4, 7, 8, 12, 13, 17, 23, 36},
    {5, 9, 11, 14, 18, 20, 26, 43},
    {7, 11, 15, 18, 22, 25, 30, 47},
    {11, 14, 19, 21, 25, 26, 33, 48},
    {19, 24, 27, 29, 31, 35, 39, 50},
}};

// Stand-in baseline for worker group 0: error 0.02 + 0.03*j on HIT group j.
// Not measured data; chosen so per-HIT biases span a wide realistic range.
inline constexpr std::array<double, 9> kDefaultBaselineCol = {
    0.02, 0.05, 0.08, 0.11, 0.14, 0.17, 0.20, 0.23, 0.26};

struct GroupTableSpec {
    std::array<std::array<double, 8>, 9> diff_table = kGroupDiffTable;
    std::array<double, 9> baseline_col = kDefaultBaselineCol;
    int n_hits = 10000;
    int n_workers = 1000;
};

inline void validate(const GroupTableSpec& spec) {
    if (spec.n_hits < 1 || spec.n_workers < 1) {
        throw std::invalid_argument("GroupTableSpec: n_hits and n_workers must be >= 1");
    }
    for (double b : spec.baseline_col) {
        if (!(b >= 0.0 && b <= 0.5)) {
            throw std::invalid_argument("GroupTableSpec: baseline errors must be in [0, 0.5]");
        }
    }
}

inline QualityClass class_for_group(int worker_group) noexcept {
    if (worker_group <= 2) return QualityClass::Good;
    if (worker_group <= 5) return QualityClass::Average;
    return QualityClass::Bad;
}

struct TableWorker {
    int group = 0;
    QualityClass cls = QualityClass::Average;
};

// Generated table workload. error_rate[i][j] is the probability that a
// group-i worker answers a group-j HIT incorrectly, clamped to [0, 0.5]
// (a 0.5 cell is a coin-flip worker, never an answer-inverting one).
struct TableWorkload {
    std::vector<HitSpec> hits;
    std::vector<int> hit_group;
    std::vector<TableWorker> workers;
    std::array<std::array<double, 9>, 9> error_rate{};

    double error_for(std::size_t worker, std::size_t hit) const {
        return error_rate[static_cast<std::size_t>(workers[worker].group)]
                         [static_cast<std::size_t>(hit_group[hit])];
    }
};

namespace detail {

// Fisher-Yates; assignment of ids to groups should not be positional.
inline void shuffle_indices(std::vector<int>& v, RngStream& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng.uniform_below(i));
        std::swap(v[i - 1], v[j]);
    }
}

// Split n ids evenly across k groups (sizes differ by at most one),
// randomizing which ids land in which group.
inline std::vector<int> uniform_groups(int n, int k, RngStream rng) {
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    shuffle_indices(order, rng);
    std::vector<int> group(static_cast<std::size_t>(n));
    for (int pos = 0; pos < n; ++pos) {
        group[static_cast<std::size_t>(order[static_cast<std::size_t>(pos)])] =
            static_cast<int>((static_cast<long long>(pos) * k) / n);
    }
    return group;
}

}  // namespace detail

inline TableWorkload gen_group_table(const GroupTableSpec& spec, RngStream rng) {
    validate(spec);
    TableWorkload wl;

    for (int j = 0; j < kNumHitGroups; ++j) {
        wl.error_rate[0][static_cast<std::size_t>(j)] =
            spec.baseline_col[static_cast<std::size_t>(j)];
        for (int i = 1; i < kNumWorkerGroups; ++i) {
            const double err = spec.baseline_col[static_cast<std::size_t>(j)] +
                               spec.diff_table[static_cast<std::size_t>(j)]
                                              [static_cast<std::size_t>(i - 1)] /
                                   100.0;
            wl.error_rate[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                std::clamp(err, 0.0, 0.5);
        }
    }

    const std::vector<int> worker_groups =
        detail::uniform_groups(spec.n_workers, kNumWorkerGroups, rng.child(0));
    wl.workers.reserve(static_cast<std::size_t>(spec.n_workers));
    std::array<int, 9> group_count{};
    for (int w = 0; w < spec.n_workers; ++w) {
        const int g = worker_groups[static_cast<std::size_t>(w)];
        wl.workers.push_back({g, class_for_group(g)});
        group_count[static_cast<std::size_t>(g)] += 1;
    }

    // Marginal distribution of a uniformly drawn worker's answer per HIT
    // group; doubles as the HIT's truth vector (answer 0 correct).
    std::array<double, 9> mean_error{};
    for (int j = 0; j < kNumHitGroups; ++j) {
        double acc = 0.0;
        for (int i = 0; i < kNumWorkerGroups; ++i) {
            acc += wl.error_rate[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] *
                   group_count[static_cast<std::size_t>(i)];
        }
        mean_error[static_cast<std::size_t>(j)] = acc / spec.n_workers;
    }

    wl.hit_group = detail::uniform_groups(spec.n_hits, kNumHitGroups, rng.child(1));
    wl.hits.reserve(static_cast<std::size_t>(spec.n_hits));
    for (int h = 0; h < spec.n_hits; ++h) {
        const double e = mean_error[static_cast<std::size_t>(wl.hit_group[static_cast<std::size_t>(h)])];
        wl.hits.emplace_back(static_cast<std::uint64_t>(h),
                             std::vector<double>{1.0 - e, e});
    }
    return wl;
}

// ---------------------------------------------------------------------------
// Worker quality distribution for routing experiments. Parametric mode draws
// success rate = 0.5 + 0.5 * Beta(a, b) (right-skewed mass near high
// competence); Table mode inverse-CDF samples a user-supplied quantile
// curve. Either way rates are clamped into (0.5, 1], so the majority answer
// is always the correct one.
// ---------------------------------------------------------------------------

struct QualityDistSpec {
    enum class Mode { Parametric, Table };
    Mode mode = Mode::Parametric;
    int n_workers = 1000;
    int beta_a = 5;
    int beta_b = 2;
    std::vector<double> table_rates;  // Table mode quantile curve, ascending or not
};

inline void validate(const QualityDistSpec& spec) {
    if (spec.n_workers < 1) {
        throw std::invalid_argument("QualityDistSpec: n_workers must be >= 1");
    }
    if (spec.mode == QualityDistSpec::Mode::Parametric) {
        if (spec.beta_a < 1 || spec.beta_b < 1) {
            throw std::invalid_argument("QualityDistSpec: beta shapes must be >= 1");
        }
    } else if (spec.table_rates.empty()) {
        throw std::invalid_argument("QualityDistSpec: table mode needs at least one rate");
    }
}

inline double quality_dist_mean(const QualityDistSpec& spec) {
    if (spec.mode == QualityDistSpec::Mode::Parametric) {
        return 0.5 + 0.5 * static_cast<double>(spec.beta_a) /
                         (spec.beta_a + spec.beta_b);
    }
    const double sum = std::accumulate(spec.table_rates.begin(), spec.table_rates.end(), 0.0);
    return sum / static_cast<double>(spec.table_rates.size());
}

namespace detail {

// Gamma(k, 1) for integer k as a sum of exponentials; exact and cheap for
// the small shapes used here.
inline double gamma_int(int k, RngStream& rng) {
    double log_prod = 0.0;
    for (int i = 0; i < k; ++i) {
        log_prod += std::log(rng.uniform_open01());
    }
    return -log_prod;
}

inline double clamp_success_rate(double r) {
    const double lo = std::nextafter(0.5, 1.0);
    return std::clamp(r, lo, 1.0);
}

}  // namespace detail

inline std::vector<double> sample_quality(const QualityDistSpec& spec, RngStream rng) {
    validate(spec);
    std::vector<double> rates;
    rates.reserve(static_cast<std::size_t>(spec.n_workers));
    for (int w = 0; w < spec.n_workers; ++w) {
        RngStream sub = rng.child(static_cast<std::uint64_t>(w));
        double rate;
        if (spec.mode == QualityDistSpec::Mode::Parametric) {
            const double ga = detail::gamma_int(spec.beta_a, sub);
            const double gb = detail::gamma_int(spec.beta_b, sub);
            rate = 0.5 + 0.5 * ga / (ga + gb);
        } else {
            const std::size_t n = spec.table_rates.size();
            const auto idx = static_cast<std::size_t>(sub.uniform01() * static_cast<double>(n));
            rate = spec.table_rates[std::min(idx, n - 1)];
        }
        rates.push_back(detail::clamp_success_rate(rate));
    }
    return rates;
}

// ---------------------------------------------------------------------------
// Answer samplers
// ---------------------------------------------------------------------------

// Error-rate mode (two-answer HITs): correct answer with probability
// 1 - error_rate, the other answer otherwise.
inline AnswerId sample_answer(const HitSpec& hit, double error_rate, RngStream& rng) {
    if (hit.answer_count() != 2) {
        throw std::invalid_argument("sample_answer: error-rate mode needs a 2-answer HIT");
    }
    if (!(error_rate >= 0.0 && error_rate <= 1.0)) {
        throw std::invalid_argument("sample_answer: error_rate must be in [0, 1]");
    }
    const AnswerId correct = hit.correct_answer();
    if (rng.uniform01() < error_rate) {
        return AnswerId{1u - correct.value};
    }
    return correct;
}

// Distribution mode: an IID draw from the HIT's truth vector.
inline AnswerId sample_answer(const HitSpec& hit, RngStream& rng) {
    const double u = rng.uniform01();
    double cum = 0.0;
    const auto& truth = hit.truth();
    for (std::uint32_t i = 0; i + 1 < truth.size(); ++i) {
        cum += truth[i];
        if (u < cum) return AnswerId{i};
    }
    return AnswerId{static_cast<std::uint32_t>(truth.size() - 1)};
}

}  // namespace crowdstop
