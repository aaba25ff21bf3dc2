#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "crowdstop/core.hpp"
#include "crowdstop/rng.hpp"
#include "crowdstop/stopping.hpp"
#include "crowdstop/weights.hpp"
#include "crowdstop/workload.hpp"

namespace crowdstop {

// Per-worker routing state: HITs with a finalized gold answer that the
// worker took part in, and how many of those she agreed with.
struct WorkerStats {
    int answered = 0;  // t_i
    int matched = 0;   // t_i^+

    friend constexpr bool operator==(WorkerStats, WorkerStats) noexcept = default;
};

// Exploitation plus exploration score: matched/answered + 1/sqrt(answered).
// Unseen workers score the initialization value 2, which also bounds the
// index from above for every reachable state.
inline double index_of(const WorkerStats& s) {
    if (s.answered == 0) return 2.0;
    return static_cast<double>(s.matched) / static_cast<double>(s.answered) +
           1.0 / std::sqrt(static_cast<double>(s.answered));
}

inline WorkerStats record_outcome(WorkerStats s, bool matched_majority) noexcept {
    s.answered += 1;
    if (matched_majority) s.matched += 1;
    return s;
}

enum class RoutingPolicy { IndexBased, Random };

// A simulated worker available to the routing pipeline. The quality class
// matters only when a WeightScheme is supplied; the index policy always
// works from the raw stats.
struct Worker {
    double success_rate = 1.0;
    QualityClass cls = QualityClass::Average;
    WorkerStats stats;
};

// Pick the next worker. IndexBased takes an argmax of the index with a
// seeded uniform draw among ties; Random draws uniformly. `is_excluded`
// marks workers that already answered the current HIT.
//
// Randomness: Random always consumes one draw; IndexBased consumes one
// draw only when the argmax is tied.
template <typename Excluded>
std::size_t pick_worker(RoutingPolicy policy, const std::vector<Worker>& pool,
                        Excluded&& is_excluded, RngStream& rng) {
    if (policy == RoutingPolicy::Random) {
        std::size_t count = 0;
        for (std::size_t i = 0; i < pool.size(); ++i) {
            if (!is_excluded(i)) ++count;
        }
        if (count == 0) {
            throw std::invalid_argument("pick_worker: no candidates left");
        }
        std::size_t target = static_cast<std::size_t>(rng.uniform_below(count));
        for (std::size_t i = 0; i < pool.size(); ++i) {
            if (!is_excluded(i) && target-- == 0) return i;
        }
        throw std::logic_error("pick_worker: candidate scan out of sync");
    }

    double best = -1.0;
    std::size_t n_best = 0;
    for (std::size_t i = 0; i < pool.size(); ++i) {
        if (is_excluded(i)) continue;
        const double idx = index_of(pool[i].stats);
        if (idx > best) {
            best = idx;
            n_best = 1;
        } else if (idx == best) {
            ++n_best;
        }
    }
    if (n_best == 0) {
        throw std::invalid_argument("pick_worker: no candidates left");
    }
    std::size_t target = n_best > 1 ? static_cast<std::size_t>(rng.uniform_below(n_best)) : 0;
    for (std::size_t i = 0; i < pool.size(); ++i) {
        if (!is_excluded(i) && index_of(pool[i].stats) == best && target-- == 0) return i;
    }
    throw std::logic_error("pick_worker: maximizer scan out of sync");
}

inline std::size_t pick_worker(RoutingPolicy policy, const std::vector<Worker>& pool,
                               const std::vector<std::size_t>& excluded, RngStream& rng) {
    return pick_worker(policy, pool,
                       [&](std::size_t i) {
                           for (std::size_t e : excluded) {
                               if (e == i) return true;
                           }
                           return false;
                       },
                       rng);
}

struct GoldParticipant {
    std::size_t worker = 0;
    AnswerId answer{};
};

struct GoldHitRecord {
    std::uint64_t hit_id = 0;
    AnswerId selected{};
    int cost = 0;  // == participants.size()
    std::vector<GoldParticipant> participants;
};

// Run one HIT through the routing pipeline: route workers one at a time
// (each worker answers a given HIT at most once), accumulate their votes,
// and stop per the rule. Only after the gold answer is finalized are the
// participants' stats updated against it.
inline GoldHitRecord process_gold_hit(const HitSpec& hit, std::vector<Worker>& pool,
                                      RoutingPolicy policy, const RuleParams& params,
                                      const WeightScheme* scheme, RngStream& rng) {
    validate(params);
    if (scheme != nullptr) validate(*scheme);
    if (pool.size() < static_cast<std::size_t>(params.max_rounds)) {
        throw std::invalid_argument("process_gold_hit: pool smaller than max_rounds");
    }

    GoldHitRecord record;
    record.hit_id = hit.id();
    std::vector<char> used(pool.size(), 0);
    Tally tally(hit.answer_count());

    for (int t = 1;; ++t) {
        const std::size_t w = pick_worker(
            policy, pool, [&](std::size_t i) { return used[i] != 0; }, rng);
        used[w] = 1;
        const AnswerId answer = sample_answer(hit, 1.0 - pool[w].success_rate, rng);
        record.participants.push_back({w, answer});
        const double weight = scheme != nullptr ? weight_for(*scheme, pool[w].cls, t) : 1.0;
        observe(tally, answer, weight);
        const Decision d = decide(tally, params, rng);
        if (d.stop) {
            record.selected = d.selected;
            record.cost = tally.rounds;
            break;
        }
    }

    for (const GoldParticipant& p : record.participants) {
        pool[p.worker].stats =
            record_outcome(pool[p.worker].stats, p.answer == record.selected);
    }
    return record;
}

}  // namespace crowdstop
