#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <variant>
#include <vector>

#include "crowdstop/config.hpp"
#include "crowdstop/core.hpp"
#include "crowdstop/curves.hpp"
#include "crowdstop/results.hpp"
#include "crowdstop/rng.hpp"
#include "crowdstop/routing.hpp"
#include "crowdstop/stopping.hpp"
#include "crowdstop/weights.hpp"
#include "crowdstop/workload.hpp"

namespace crowdstop {

using WorkloadSpec = std::variant<UniformBiasSpec, GroupTableSpec, QualityDistSpec>;

// Purpose tags for top-level substreams; workload generation and the
// simulation never share a stream.
inline constexpr std::uint64_t kWorkloadStreamTag = 1;
inline constexpr std::uint64_t kSweepStreamTag = 2;
inline constexpr std::uint64_t kGoldStreamTag = 3;

inline constexpr double kDefaultCGridArr[] = {0.5, 1.0, 1.5, 2.0, 2.5,
                                              3.0, 3.5, 4.0, 4.5, 5.0};
inline constexpr double kDefaultEpsilonGridArr[] = {0.0, 0.05, 0.1, 0.15, 0.2, 0.3};

inline std::vector<double> default_c_grid() {
    return {std::begin(kDefaultCGridArr), std::end(kDefaultCGridArr)};
}
inline std::vector<double> default_epsilon_grid() {
    return {std::begin(kDefaultEpsilonGridArr), std::end(kDefaultEpsilonGridArr)};
}

// A named weighting choice; nullopt means the plain unweighted rule.
struct SchemeRef {
    std::string id = "unweighted";
    std::optional<WeightScheme> scheme;
};

// Token forms: "unweighted", a preset name V1..V6, or
// "custom:l1,l2,l3:g1,g2,g3[:cadence]" with good/average/bad order.
inline SchemeRef parse_scheme_token(const std::string& token) {
    if (token == "unweighted") return {token, std::nullopt};
    if (const auto p = preset_from_name(token)) return {token, preset(*p)};
    if (token.rfind("custom:", 0) == 0) {
        std::vector<std::string> parts;
        std::stringstream ss(token.substr(7));
        std::string part;
        while (std::getline(ss, part, ':')) parts.push_back(part);
        if (parts.size() != 2 && parts.size() != 3) {
            throw ConfigError("scheme token needs custom:lambdas:gammas[:cadence]: " + token);
        }
        const auto parse3 = [&](const std::string& csv) {
            std::array<double, 3> out{};
            std::stringstream vs(csv);
            std::string tok;
            std::size_t i = 0;
            while (std::getline(vs, tok, ',')) {
                if (i >= 3) throw ConfigError("scheme token needs 3 values per group: " + token);
                try {
                    out[i++] = std::stod(tok);
                } catch (const std::exception&) {
                    throw ConfigError("scheme token has a bad number: " + token);
                }
            }
            if (i != 3) throw ConfigError("scheme token needs 3 values per group: " + token);
            return out;
        };
        WeightScheme s;
        s.lambda = parse3(parts[0]);
        s.gamma = parse3(parts[1]);
        if (parts.size() == 3) {
            try {
                s.cadence = std::stoi(parts[2]);
            } catch (const std::exception&) {
                throw ConfigError("scheme token has a bad cadence: " + token);
            }
        }
        try {
            validate(s);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("scheme token invalid: ") + e.what());
        }
        return {token, s};
    }
    throw ConfigError("unknown scheme: " + token);
}

struct SweepSpec {
    WorkloadSpec workload = UniformBiasSpec{};
    std::vector<SchemeRef> schemes = {SchemeRef{}};
    std::vector<double> epsilons = default_epsilon_grid();
    std::vector<double> cs = default_c_grid();
    std::vector<RoutingPolicy> policies = {RoutingPolicy::IndexBased, RoutingPolicy::Random};
    int replications = 1;
    std::uint64_t seed = 0;
    RuleParams rule;      // c and epsilon are overwritten per sweep point
    int n_gold_hits = 5000;
};

inline void validate(const SweepSpec& spec) {
    if (spec.epsilons.empty() || spec.cs.empty()) {
        throw ConfigError("sweep needs non-empty epsilon and c grids");
    }
    if (spec.schemes.empty()) {
        throw ConfigError("sweep needs at least one scheme");
    }
    if (spec.replications < 1) {
        throw ConfigError("replications must be >= 1");
    }
    if (spec.policies.empty()) {
        throw ConfigError("gold comparison needs at least one policy");
    }
    if (spec.n_gold_hits < 1) {
        throw ConfigError("n_gold_hits must be >= 1");
    }
}

inline std::string_view policy_name(RoutingPolicy p) noexcept {
    return p == RoutingPolicy::IndexBased ? "index_based" : "random";
}

namespace detail {

struct PointAccum {
    long long wrong = 0;
    double cost_sum = 0.0;
    double cost_sq_sum = 0.0;
    int n = 0;

    void add(bool is_wrong, int cost) {
        wrong += is_wrong ? 1 : 0;
        cost_sum += cost;
        cost_sq_sum += static_cast<double>(cost) * cost;
        n += 1;
    }

    ExperimentResult finish(std::string scheme, double eps, double c,
                            std::uint64_t seed) const {
        ExperimentResult r;
        r.scheme = std::move(scheme);
        r.epsilon = eps;
        r.c = c;
        r.n_hits = n;
        r.seed = seed;
        r.error_rate = static_cast<double>(wrong) / n;
        r.avg_cost = cost_sum / n;
        r.se_error_rate = std::sqrt(r.error_rate * (1.0 - r.error_rate) / n);
        if (n > 1) {
            const double var =
                (cost_sq_sum - cost_sum * cost_sum / n) / (n - 1);
            r.se_avg_cost = std::sqrt(std::max(0.0, var) / n);
        }
        return r;
    }
};

}  // namespace detail

// Run every (scheme, epsilon, C) cell of the grid over the workload,
// one replication per row. Each cell and each HIT inside it draws from its
// own substream, so results are a pure function of (spec, seed).
inline std::vector<ExperimentResult> run_sweep(const SweepSpec& spec) {
    validate(spec);
    if (std::holds_alternative<QualityDistSpec>(spec.workload)) {
        throw ConfigError("run_sweep: quality-dist workloads are for gold comparisons");
    }

    const RngStream root(spec.seed);
    std::vector<HitSpec> uniform_hits;
    TableWorkload table;
    const bool is_table = std::holds_alternative<GroupTableSpec>(spec.workload);
    if (is_table) {
        table = gen_group_table(std::get<GroupTableSpec>(spec.workload),
                                root.child(kWorkloadStreamTag));
    } else {
        uniform_hits = gen_uniform_bias(std::get<UniformBiasSpec>(spec.workload),
                                        root.child(kWorkloadStreamTag));
        for (const SchemeRef& s : spec.schemes) {
            if (s.scheme && !is_unit(*s.scheme)) {
                throw ConfigError("scheme " + s.id +
                                  " needs worker classes; use a group_table workload");
            }
        }
    }
    const std::vector<HitSpec>& hits = is_table ? table.hits : uniform_hits;

    const RngStream sim = root.child(kSweepStreamTag);
    const std::size_t n_eps = spec.epsilons.size();
    const std::size_t n_c = spec.cs.size();
    const std::size_t n_rep = static_cast<std::size_t>(spec.replications);

    std::vector<ExperimentResult> results;
    results.reserve(spec.schemes.size() * n_eps * n_c * n_rep);
    for (std::size_t si = 0; si < spec.schemes.size(); ++si) {
        const SchemeRef& scheme = spec.schemes[si];
        for (std::size_t ei = 0; ei < n_eps; ++ei) {
            for (std::size_t ci = 0; ci < n_c; ++ci) {
                RuleParams params = spec.rule;
                params.epsilon = spec.epsilons[ei];
                params.c = spec.cs[ci];
                validate(params);
                for (std::size_t rep = 0; rep < n_rep; ++rep) {
                    const std::uint64_t point =
                        ((si * n_eps + ei) * n_c + ci) * n_rep + rep;
                    const RngStream point_rng = sim.child(point);
                    detail::PointAccum acc;
                    for (std::size_t h = 0; h < hits.size(); ++h) {
                        RngStream hit_rng = point_rng.child(h);
                        const HitSpec& hit = hits[h];
                        RunOutcome out;
                        if (is_table) {
                            const auto n_workers = static_cast<std::uint64_t>(
                                table.workers.size());
                            out = run_hit(
                                hit,
                                [&](int t) {
                                    const auto w = static_cast<std::size_t>(
                                        hit_rng.uniform_below(n_workers));
                                    const AnswerId a = sample_answer(
                                        hit, table.error_for(w, h), hit_rng);
                                    const double weight =
                                        scheme.scheme
                                            ? weight_for(*scheme.scheme,
                                                         table.workers[w].cls, t)
                                            : 1.0;
                                    return VoteCast{a, weight};
                                },
                                params, hit_rng);
                        } else {
                            out = run_hit(
                                hit,
                                [&](int) {
                                    return VoteCast{sample_answer(hit, hit_rng), 1.0};
                                },
                                params, hit_rng);
                        }
                        acc.add(out.selected != hit.correct_answer(), out.cost);
                    }
                    results.push_back(acc.finish(scheme.id, params.epsilon, params.c,
                                                 spec.seed));
                }
            }
        }
    }
    return results;
}

// Gold-HIT creation comparison: for each (policy, epsilon, C) cell, process
// n_gold_hits sequentially with fresh worker stats. The worker population
// (success rates) is the workload and is shared across cells; HITs are
// identical two-answer tasks, so all heterogeneity is in the workers.
inline std::vector<ExperimentResult> run_gold_comparison(const SweepSpec& spec) {
    validate(spec);
    if (!std::holds_alternative<QualityDistSpec>(spec.workload)) {
        throw ConfigError("run_gold_comparison needs a quality_dist workload");
    }
    for (const SchemeRef& s : spec.schemes) {
        if (s.scheme && !is_unit(*s.scheme)) {
            throw ConfigError("gold comparison has no worker classes; scheme " + s.id +
                              " is not applicable");
        }
    }

    const RngStream root(spec.seed);
    const std::vector<double> rates =
        sample_quality(std::get<QualityDistSpec>(spec.workload),
                       root.child(kWorkloadStreamTag));
    const HitSpec gold_hit(0, {1.0, 0.0});
    const AnswerId correct = gold_hit.correct_answer();

    const RngStream sim = root.child(kGoldStreamTag);
    const std::size_t n_eps = spec.epsilons.size();
    const std::size_t n_c = spec.cs.size();
    const std::size_t n_rep = static_cast<std::size_t>(spec.replications);

    std::vector<ExperimentResult> results;
    results.reserve(spec.policies.size() * n_eps * n_c * n_rep);
    for (std::size_t pi = 0; pi < spec.policies.size(); ++pi) {
        for (std::size_t ei = 0; ei < n_eps; ++ei) {
            for (std::size_t ci = 0; ci < n_c; ++ci) {
                RuleParams params = spec.rule;
                params.epsilon = spec.epsilons[ei];
                params.c = spec.cs[ci];
                validate(params);
                for (std::size_t rep = 0; rep < n_rep; ++rep) {
                    const std::uint64_t point =
                        ((pi * n_eps + ei) * n_c + ci) * n_rep + rep;
                    const RngStream point_rng = sim.child(point);

                    std::vector<Worker> pool;
                    pool.reserve(rates.size());
                    for (double r : rates) {
                        pool.push_back({r, QualityClass::Average, WorkerStats{}});
                    }

                    detail::PointAccum acc;
                    for (int h = 0; h < spec.n_gold_hits; ++h) {
                        RngStream hit_rng = point_rng.child(static_cast<std::uint64_t>(h));
                        const HitSpec hit(static_cast<std::uint64_t>(h), {1.0, 0.0});
                        const GoldHitRecord rec = process_gold_hit(
                            hit, pool, spec.policies[pi], params, nullptr, hit_rng);
                        acc.add(rec.selected != correct, rec.cost);
                    }
                    results.push_back(acc.finish(std::string(policy_name(spec.policies[pi])),
                                                 params.epsilon, params.c, spec.seed));
                }
            }
        }
    }
    return results;
}

// Average replicated rows per (scheme, epsilon, c). With two or more
// replications the standard errors come from the between-replication
// spread; with one they pass through unchanged.
inline std::vector<ExperimentResult> aggregate_replications(
    const std::vector<ExperimentResult>& rows) {
    std::map<std::tuple<std::string, double, double>, std::vector<const ExperimentResult*>>
        groups;
    std::vector<std::tuple<std::string, double, double>> order;
    for (const ExperimentResult& r : rows) {
        const auto key = std::make_tuple(r.scheme, r.epsilon, r.c);
        auto& bucket = groups[key];
        if (bucket.empty()) order.push_back(key);
        bucket.push_back(&r);
    }
    std::vector<ExperimentResult> out;
    out.reserve(order.size());
    for (const auto& key : order) {
        const auto& bucket = groups[key];
        ExperimentResult agg = *bucket.front();
        if (bucket.size() > 1) {
            const double k = static_cast<double>(bucket.size());
            double err_mean = 0.0;
            double cost_mean = 0.0;
            int n_total = 0;
            for (const ExperimentResult* r : bucket) {
                err_mean += r->error_rate;
                cost_mean += r->avg_cost;
                n_total += r->n_hits;
            }
            err_mean /= k;
            cost_mean /= k;
            double err_var = 0.0;
            double cost_var = 0.0;
            for (const ExperimentResult* r : bucket) {
                err_var += (r->error_rate - err_mean) * (r->error_rate - err_mean);
                cost_var += (r->avg_cost - cost_mean) * (r->avg_cost - cost_mean);
            }
            err_var /= (k - 1.0);
            cost_var /= (k - 1.0);
            agg.error_rate = err_mean;
            agg.avg_cost = cost_mean;
            agg.n_hits = n_total;
            agg.se_error_rate = std::sqrt(err_var / k);
            agg.se_avg_cost = std::sqrt(cost_var / k);
        }
        out.push_back(std::move(agg));
    }
    return out;
}

// Pull the (scheme, epsilon) family out of a result set as a varying-C curve.
inline Curve curve_for(const std::vector<ExperimentResult>& rows, const std::string& scheme,
                       double epsilon) {
    std::vector<ExperimentResult> filtered;
    for (const ExperimentResult& r : rows) {
        if (r.scheme == scheme && r.epsilon == epsilon) filtered.push_back(r);
    }
    return build_curve(filtered);
}

// ---------------------------------------------------------------------------
// Config-file binding
// ---------------------------------------------------------------------------

inline WorkloadSpec workload_from_config(const Config& cfg) {
    cfg.require_known_keys(
        "workload", {"type", "n_hits", "bias_low", "bias_high", "n_workers",
                     "baseline_col", "quality_mode", "beta_a", "beta_b", "quality_rates"});
    const std::string type = cfg.get_string("workload", "type", "");
    if (type.empty()) {
        throw ConfigError("config [workload]: missing required key: type");
    }
    if (type == "uniform_bias") {
        UniformBiasSpec s;
        s.n_hits = cfg.get_int("workload", "n_hits", s.n_hits);
        s.bias_low = cfg.get_double("workload", "bias_low", s.bias_low);
        s.bias_high = cfg.get_double("workload", "bias_high", s.bias_high);
        try {
            validate(s);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
        return s;
    }
    if (type == "group_table") {
        GroupTableSpec s;
        s.n_hits = cfg.get_int("workload", "n_hits", s.n_hits);
        s.n_workers = cfg.get_int("workload", "n_workers", s.n_workers);
        const auto baseline = cfg.get_double_list(
            "workload", "baseline_col",
            {kDefaultBaselineCol.begin(), kDefaultBaselineCol.end()});
        if (baseline.size() != 9) {
            throw ConfigError("config [workload] baseline_col: need exactly 9 values");
        }
        std::copy(baseline.begin(), baseline.end(), s.baseline_col.begin());
        try {
            validate(s);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
        return s;
    }
    if (type == "quality_dist") {
        QualityDistSpec s;
        s.n_workers = cfg.get_int("workload", "n_workers", s.n_workers);
        const std::string mode = cfg.get_string("workload", "quality_mode", "parametric");
        if (mode == "parametric") {
            s.mode = QualityDistSpec::Mode::Parametric;
            s.beta_a = cfg.get_int("workload", "beta_a", s.beta_a);
            s.beta_b = cfg.get_int("workload", "beta_b", s.beta_b);
        } else if (mode == "table") {
            s.mode = QualityDistSpec::Mode::Table;
            s.table_rates = cfg.get_double_list("workload", "quality_rates", {});
        } else {
            throw ConfigError("config [workload] quality_mode: expected parametric or table");
        }
        try {
            validate(s);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
        return s;
    }
    throw ConfigError("config [workload] type: expected uniform_bias, group_table "
                      "or quality_dist, got " + type);
}

inline SweepSpec sweep_spec_from_config(const Config& cfg) {
    SweepSpec spec;
    spec.workload = workload_from_config(cfg);

    cfg.require_known_keys("rule", {"c_mode", "delta", "max_rounds", "rounding"});
    const std::string c_mode = cfg.get_string("rule", "c_mode", "fixed");
    if (c_mode == "fixed") {
        spec.rule.c_mode = CMode::Fixed;
    } else if (c_mode == "time_varying") {
        spec.rule.c_mode = CMode::TimeVarying;
    } else {
        throw ConfigError("config [rule] c_mode: expected fixed or time_varying");
    }
    spec.rule.delta = cfg.get_double("rule", "delta", spec.rule.delta);
    spec.rule.max_rounds = cfg.get_int("rule", "max_rounds", spec.rule.max_rounds);
    const std::string rounding = cfg.get_string("rule", "rounding", "randomized");
    if (rounding == "randomized") {
        spec.rule.rounding = Rounding::Randomized;
    } else if (rounding == "exact") {
        spec.rule.rounding = Rounding::Exact;
    } else {
        throw ConfigError("config [rule] rounding: expected randomized or exact");
    }

    cfg.require_known_keys("sweep", {"schemes", "epsilon", "c", "replications", "seed"});
    spec.schemes.clear();
    for (const std::string& token :
         cfg.get_string_list("sweep", "schemes", {"unweighted"})) {
        spec.schemes.push_back(parse_scheme_token(token));
    }
    spec.epsilons = cfg.get_double_list("sweep", "epsilon", spec.epsilons);
    spec.cs = cfg.get_double_list("sweep", "c", spec.cs);
    spec.replications = cfg.get_int("sweep", "replications", spec.replications);
    spec.seed = cfg.get_u64("sweep", "seed", spec.seed);

    cfg.require_known_keys("gold", {"policies", "n_gold_hits"});
    spec.policies.clear();
    for (const std::string& token :
         cfg.get_string_list("gold", "policies", {"index_based", "random"})) {
        if (token == "index_based") {
            spec.policies.push_back(RoutingPolicy::IndexBased);
        } else if (token == "random") {
            spec.policies.push_back(RoutingPolicy::Random);
        } else {
            throw ConfigError("config [gold] policies: expected index_based or random");
        }
    }
    spec.n_gold_hits = cfg.get_int("gold", "n_gold_hits", spec.n_gold_hits);

    try {
        validate(spec.rule);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    validate(spec);
    return spec;
}

// ---------------------------------------------------------------------------
// Workload audit dumps (gen-workload)
// ---------------------------------------------------------------------------

inline void write_workload_csv(const WorkloadSpec& workload, std::uint64_t seed,
                               std::ostream& out, std::ostream* workers_out = nullptr) {
    const RngStream stream = RngStream(seed).child(kWorkloadStreamTag);
    if (const auto* u = std::get_if<UniformBiasSpec>(&workload)) {
        out << "hit_id,bias,truth0,truth1\n";
        for (const HitSpec& hit : gen_uniform_bias(*u, stream)) {
            out << hit.id() << ',' << format_sig6(bias_of(hit)) << ','
                << format_sig6(hit.truth()[0]) << ',' << format_sig6(hit.truth()[1])
                << '\n';
        }
        return;
    }
    if (const auto* t = std::get_if<GroupTableSpec>(&workload)) {
        const TableWorkload wl = gen_group_table(*t, stream);
        out << "hit_id,hit_group,truth0,truth1\n";
        for (std::size_t h = 0; h < wl.hits.size(); ++h) {
            out << wl.hits[h].id() << ',' << wl.hit_group[h] << ','
                << format_sig6(wl.hits[h].truth()[0]) << ','
                << format_sig6(wl.hits[h].truth()[1]) << '\n';
        }
        if (workers_out != nullptr) {
            *workers_out << "worker_id,group,class\n";
            for (std::size_t w = 0; w < wl.workers.size(); ++w) {
                *workers_out << w << ',' << wl.workers[w].group << ','
                             << class_name(wl.workers[w].cls) << '\n';
            }
        }
        return;
    }
    const auto& q = std::get<QualityDistSpec>(workload);
    out << "worker_id,success_rate\n";
    const std::vector<double> rates = sample_quality(q, stream);
    for (std::size_t w = 0; w < rates.size(); ++w) {
        out << w << ',' << format_sig6(rates[w]) << '\n';
    }
}

}  // namespace crowdstop
