#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace crowdstop {

// Index into a HIT's answer set.
struct AnswerId {
    std::uint32_t value = 0;

    friend constexpr bool operator==(AnswerId, AnswerId) noexcept = default;
};

// Coarse worker quality score. Total order: Good > Average > Bad.
enum class QualityClass { Good, Average, Bad };

inline constexpr std::array<QualityClass, 3> kQualityClasses = {
    QualityClass::Good, QualityClass::Average, QualityClass::Bad};

constexpr std::size_t class_rank(QualityClass q) noexcept {
    return static_cast<std::size_t>(q);
}

inline std::string_view class_name(QualityClass q) noexcept {
    switch (q) {
    case QualityClass::Good: return "good";
    case QualityClass::Average: return "average";
    case QualityClass::Bad: return "bad";
    }
    return "average";
}

// A multiple-choice task with a ground-truth answer distribution.
// `truth` is the probability of each answer under the simulated crowd;
// invalid vectors are rejected at construction rather than renormalized.
class HitSpec {
public:
    HitSpec(std::uint64_t id, std::vector<double> truth)
        : id_(id), truth_(std::move(truth)) {
        if (truth_.size() < 2) {
            throw std::invalid_argument("HitSpec: need at least 2 answers");
        }
        double sum = 0.0;
        for (double p : truth_) {
            if (!(p >= 0.0) || !std::isfinite(p)) {
                throw std::invalid_argument("HitSpec: truth entries must be finite and >= 0");
            }
            sum += p;
        }
        if (std::fabs(sum - 1.0) > 1e-9) {
            throw std::invalid_argument("HitSpec: truth must sum to 1 (got " +
                                        std::to_string(sum) + ")");
        }
    }

    std::uint64_t id() const noexcept { return id_; }
    std::uint32_t answer_count() const noexcept {
        return static_cast<std::uint32_t>(truth_.size());
    }
    const std::vector<double>& truth() const noexcept { return truth_; }

    // First maximizer of the truth vector. With tied maxima the choice is
    // positional; tied-truth HITs have no meaningful correct answer anyway.
    AnswerId correct_answer() const noexcept {
        std::uint32_t best = 0;
        for (std::uint32_t i = 1; i < truth_.size(); ++i) {
            if (truth_[i] > truth_[best]) best = i;
        }
        return AnswerId{best};
    }

private:
    std::uint64_t id_;
    std::vector<double> truth_;
};

// Difference between the largest and second-largest truth probability.
// Large values mean easy HITs; 0 means the top answers are indistinguishable.
inline double bias_of(const HitSpec& hit) {
    double top = -1.0;
    double second = -1.0;
    for (double p : hit.truth()) {
        if (p > top) {
            second = top;
            top = p;
        } else if (p > second) {
            second = p;
        }
    }
    return top - second;
}

// Running vote state for one HIT. votes[a] is the total weight behind
// answer a; weight_sum and weight_sq_sum are the 1-norm and squared 2-norm
// of the weight sequence so far. Mutated only through observe().
struct Tally {
    std::vector<double> votes;
    int rounds = 0;
    double weight_sum = 0.0;
    double weight_sq_sum = 0.0;

    explicit Tally(std::uint32_t answer_count) : votes(answer_count, 0.0) {
        if (answer_count < 2) {
            throw std::invalid_argument("Tally: need at least 2 answers");
        }
    }

    std::uint32_t answer_count() const noexcept {
        return static_cast<std::uint32_t>(votes.size());
    }
};

enum class CMode { Fixed, TimeVarying };

// Threshold evaluation: Randomized rounds the real-valued threshold to a
// neighboring integer in proportion to its fractional part; Exact compares
// against the raw value directly (useful for derandomized analysis).
enum class Rounding { Randomized, Exact };

// Parameters of one stopping-rule instance. In Fixed mode `c` is used
// verbatim; in TimeVarying mode `c` is ignored and the round-t confidence
// width is sqrt(log(t^2 / delta)). max_rounds is a hard termination
// backstop: decaying weight schemes bound the vote norms, so without it a
// run could continue forever.
struct RuleParams {
    double c = 2.0;
    double epsilon = 0.0;
    CMode c_mode = CMode::Fixed;
    double delta = 0.01;
    int max_rounds = 60;
    Rounding rounding = Rounding::Randomized;
};

inline void validate(const RuleParams& p) {
    if (!(p.c >= 0.0) || !std::isfinite(p.c)) {
        throw std::invalid_argument("RuleParams: c must be finite and >= 0");
    }
    if (!(p.epsilon >= 0.0 && p.epsilon < 1.0)) {
        throw std::invalid_argument("RuleParams: epsilon must be in [0, 1)");
    }
    if (p.c_mode == CMode::TimeVarying && !(p.delta > 0.0 && p.delta < 1.0)) {
        throw std::invalid_argument("RuleParams: delta must be in (0, 1)");
    }
    if (p.max_rounds < 1) {
        throw std::invalid_argument("RuleParams: max_rounds must be >= 1");
    }
}

// Per-round outcome: continue, or stop with the selected answer.
// A Stop always carries a maximizer of the current weighted vote.
struct Decision {
    bool stop = false;
    AnswerId selected{};
};

}  // namespace crowdstop
