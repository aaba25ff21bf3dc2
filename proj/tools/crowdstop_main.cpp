// Command-line front end: seeded sweeps, gold-HIT routing comparisons,
// workload audit dumps, and curve comparison over emitted CSVs.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "crowdstop/crowdstop.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;

struct CommonOpts {
    std::string config_path;
    std::string out_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> replications;
};

crowdstop::SweepSpec load_spec(const CommonOpts& opts) {
    const crowdstop::Config cfg = crowdstop::Config::load(opts.config_path);
    crowdstop::SweepSpec spec = crowdstop::sweep_spec_from_config(cfg);
    if (opts.seed) spec.seed = *opts.seed;
    if (opts.replications) {
        spec.replications = *opts.replications;
        if (spec.replications < 1) {
            throw crowdstop::ConfigError("--replications must be >= 1");
        }
    }
    return spec;
}

void add_common(CLI::App* cmd, CommonOpts& opts, bool needs_out) {
    cmd->add_option("--config", opts.config_path, "experiment config file")->required();
    auto* out = cmd->add_option("--out", opts.out_path, "output CSV path");
    if (needs_out) out->required();
    cmd->add_option("--seed", opts.seed, "override [sweep] seed");
    cmd->add_option("--replications", opts.replications, "override [sweep] replications");
}

void write_results(const std::vector<crowdstop::ExperimentResult>& results,
                   const std::string& out_path) {
    if (out_path.empty() || out_path == "-") {
        crowdstop::emit_csv(results, std::cout);
    } else {
        crowdstop::emit_csv(results, out_path);
        std::cerr << "wrote " << results.size() << " rows to " << out_path << "\n";
    }
}

int run_compare(const std::string& below_path, const std::string& above_path,
                double lo, double hi) {
    const crowdstop::Curve below =
        crowdstop::build_curve(crowdstop::parse_results_csv(below_path));
    const crowdstop::Curve above =
        crowdstop::build_curve(crowdstop::parse_results_csv(above_path));
    const crowdstop::DominanceReport rep = crowdstop::compare_curves(below, above, lo, hi);
    if (!rep.comparable) {
        std::cout << "comparable=false\n";
        return kExitOk;
    }
    std::cout << "comparable=true\n"
              << "overlap_lo=" << crowdstop::format_sig6(rep.lo) << "\n"
              << "overlap_hi=" << crowdstop::format_sig6(rep.hi) << "\n"
              << "probes=" << rep.n_probes << "\n"
              << "min_margin_cost=" << crowdstop::format_sig6(rep.min_margin) << "\n"
              << "min_margin_relative=" << crowdstop::format_sig6(rep.min_relative) << "\n"
              << "below_dominates=" << (rep.dominates() ? "true" : "false") << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Adaptive stopping-rule simulator for crowd label collection"};
    app.require_subcommand(1);

    CommonOpts sweep_opts;
    CLI::App* sweep = app.add_subcommand(
        "sweep", "run a (scheme, epsilon, C) grid over a simulated workload");
    add_common(sweep, sweep_opts, false);

    CommonOpts gold_opts;
    CLI::App* gold = app.add_subcommand(
        "gold", "compare routing policies on sequential gold-HIT creation");
    add_common(gold, gold_opts, false);

    CommonOpts gen_opts;
    std::string workers_out_path;
    CLI::App* gen = app.add_subcommand("gen-workload",
                                       "generate a workload and dump it for audit");
    add_common(gen, gen_opts, true);
    gen->add_option("--workers-out", workers_out_path,
                    "also dump the worker table (group_table workloads)");

    std::string below_path;
    std::string above_path;
    double cmp_lo = 0.0;
    double cmp_hi = 1.0;
    CLI::App* cmp = app.add_subcommand(
        "compare-curves", "check whether one varying-C curve lies below another");
    cmp->add_option("--below", below_path, "CSV of the curve expected to lie below")
        ->required();
    cmp->add_option("--above", above_path, "CSV of the curve expected to lie above")
        ->required();
    cmp->add_option("--lo", cmp_lo, "lower end of the matched error-rate window");
    cmp->add_option("--hi", cmp_hi, "upper end of the matched error-rate window");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sweep->parsed()) {
            const crowdstop::SweepSpec spec = load_spec(sweep_opts);
            write_results(crowdstop::run_sweep(spec), sweep_opts.out_path);
            return kExitOk;
        }
        if (gold->parsed()) {
            const crowdstop::SweepSpec spec = load_spec(gold_opts);
            write_results(crowdstop::run_gold_comparison(spec), gold_opts.out_path);
            return kExitOk;
        }
        if (gen->parsed()) {
            const crowdstop::SweepSpec spec = load_spec(gen_opts);
            std::ofstream out(gen_opts.out_path, std::ios::binary);
            if (!out) {
                throw std::runtime_error("cannot open " + gen_opts.out_path);
            }
            std::ofstream workers_out;
            if (!workers_out_path.empty()) {
                workers_out.open(workers_out_path, std::ios::binary);
                if (!workers_out) {
                    throw std::runtime_error("cannot open " + workers_out_path);
                }
            }
            crowdstop::write_workload_csv(spec.workload, spec.seed, out,
                                          workers_out_path.empty() ? nullptr : &workers_out);
            return kExitOk;
        }
        if (cmp->parsed()) {
            return run_compare(below_path, above_path, cmp_lo, cmp_hi);
        }
    } catch (const crowdstop::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitOk;
}
