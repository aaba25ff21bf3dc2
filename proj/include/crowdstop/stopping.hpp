#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>

#include "crowdstop/core.hpp"
#include "crowdstop/rng.hpp"

namespace crowdstop {

// Accumulate one weighted vote. Keeps votes, the weight 1-norm and the
// squared 2-norm consistent by construction.
inline void observe(Tally& tally, AnswerId answer, double weight) {
    if (!(weight > 0.0) || !std::isfinite(weight)) {
        throw std::invalid_argument("observe: weight must be finite and > 0");
    }
    if (answer.value >= tally.answer_count()) {
        throw std::invalid_argument("observe: answer out of range");
    }
    tally.votes[answer.value] += weight;
    tally.rounds += 1;
    tally.weight_sum += weight;
    tally.weight_sq_sum += weight * weight;
}

// Confidence width for round t. TimeVarying returns sqrt(log(t^2/delta)),
// clamped to 0 when the log argument is <= 1 so the schedule stays
// well-defined at t = 1 with large delta.
inline double effective_c(const RuleParams& params, int t) {
    if (t < 1) {
        throw std::invalid_argument("effective_c: t must be >= 1");
    }
    if (params.c_mode == CMode::Fixed) return params.c;
    const double arg = static_cast<double>(t) * static_cast<double>(t) / params.delta;
    if (arg <= 1.0) return 0.0;
    return std::sqrt(std::log(arg));
}

// raw is the real-valued stop threshold C_t * sqrt(sum w^2) - eps * sum w;
// rounded is what the vote gap is actually compared against. For positive
// raw, rounded is floor(raw) or ceil(raw) with E[rounded] = raw; for
// raw <= 0 no randomness is spent and any nonnegative gap stops the run.
struct ThresholdDraw {
    double raw = 0.0;
    double rounded = 0.0;
};

inline double threshold_raw(const Tally& tally, const RuleParams& params) {
    if (tally.rounds < 1) {
        throw std::invalid_argument("threshold: tally has no observations");
    }
    return effective_c(params, tally.rounds) * std::sqrt(tally.weight_sq_sum) -
           params.epsilon * tally.weight_sum;
}

inline ThresholdDraw threshold(const Tally& tally, const RuleParams& params,
                               RngStream& rng) {
    const double raw = threshold_raw(tally, params);
    if (params.rounding == Rounding::Exact || raw <= 0.0) {
        return {raw, raw};
    }
    const double fl = std::floor(raw);
    const double frac = raw - fl;
    if (frac == 0.0) {
        return {raw, raw};
    }
    // ceil with probability frac, floor otherwise
    return {raw, rng.uniform01() < frac ? fl + 1.0 : fl};
}

namespace detail {

// Top and second-largest weighted vote plus the count of maximizers.
struct VoteGap {
    double top = 0.0;
    double second = 0.0;
    std::uint32_t n_max = 0;
};

inline VoteGap scan_votes(const Tally& tally) {
    VoteGap g;
    g.top = -1.0;
    g.second = -1.0;
    for (double v : tally.votes) {
        if (v > g.top) {
            g.second = g.top;
            g.top = v;
        } else if (v > g.second) {
            g.second = v;
        }
    }
    g.n_max = 0;
    for (double v : tally.votes) {
        if (v == g.top) ++g.n_max;
    }
    return g;
}

inline AnswerId nth_maximizer(const Tally& tally, double top, std::uint32_t n) {
    std::uint32_t seen = 0;
    for (std::uint32_t i = 0; i < tally.answer_count(); ++i) {
        if (tally.votes[i] == top && seen++ == n) return AnswerId{i};
    }
    return AnswerId{0};  // unreachable for n < n_max
}

}  // namespace detail

// One stop-or-continue check. Stops when the top-two weighted vote gap
// reaches the (rounded) threshold, or unconditionally at max_rounds.
// Selection is the weighted-vote maximizer; ties are broken by a seeded
// uniform draw among all maximizers.
//
// Randomness contract (relied on by reproducibility tests): one uniform is
// consumed by the threshold iff raw > 0 with a nonzero fractional part and
// rounding is Randomized; one more iff the rule stops with tied maximizers.
inline Decision decide(const Tally& tally, const RuleParams& params, RngStream& rng) {
    const ThresholdDraw draw = threshold(tally, params, rng);
    const detail::VoteGap g = detail::scan_votes(tally);
    const double gap = g.top - g.second;
    if (gap < draw.rounded && tally.rounds < params.max_rounds) {
        return {};
    }
    const std::uint32_t pick =
        g.n_max > 1 ? static_cast<std::uint32_t>(rng.uniform_below(g.n_max)) : 0;
    return {true, detail::nth_maximizer(tally, g.top, pick)};
}

struct VoteCast {
    AnswerId answer{};
    double weight = 1.0;
};

struct RunOutcome {
    AnswerId selected{};
    int cost = 0;  // stopping round
};

// Fold observe + decide over an answer stream until the rule stops.
// `stream` is called with the 1-based round number and must keep yielding
// votes through max_rounds; the backstop guarantees termination by then.
template <typename Stream>
RunOutcome run_hit(const HitSpec& hit, Stream&& stream, const RuleParams& params,
                   RngStream& rng) {
    validate(params);
    Tally tally(hit.answer_count());
    for (int t = 1;; ++t) {
        const VoteCast cast = stream(t);
        observe(tally, cast.answer, cast.weight);
        const Decision d = decide(tally, params, rng);
        if (d.stop) {
            return {d.selected, tally.rounds};
        }
    }
}

}  // namespace crowdstop
