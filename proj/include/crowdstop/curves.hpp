#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "crowdstop/results.hpp"

namespace crowdstop {

// A varying-C curve in the (error rate, average cost) plane: the trace of
// one (scheme, epsilon) family as C sweeps its grid.
struct CurvePoint {
    double error_rate = 0.0;
    double avg_cost = 0.0;
    double se_error = 0.0;
    double se_cost = 0.0;
};

using Curve = std::vector<CurvePoint>;

// Sort by error rate; exact-duplicate error rates are merged (mean cost,
// conservative max standard error).
inline Curve build_curve(const std::vector<ExperimentResult>& rows) {
    Curve curve;
    curve.reserve(rows.size());
    for (const ExperimentResult& r : rows) {
        curve.push_back({r.error_rate, r.avg_cost, r.se_error_rate, r.se_avg_cost});
    }
    std::sort(curve.begin(), curve.end(), [](const CurvePoint& a, const CurvePoint& b) {
        if (a.error_rate != b.error_rate) return a.error_rate < b.error_rate;
        return a.avg_cost < b.avg_cost;
    });
    Curve merged;
    for (const CurvePoint& p : curve) {
        if (!merged.empty() && merged.back().error_rate == p.error_rate) {
            CurvePoint& m = merged.back();
            m.avg_cost = (m.avg_cost + p.avg_cost) / 2.0;
            m.se_cost = std::max(m.se_cost, p.se_cost);
            m.se_error = std::max(m.se_error, p.se_error);
        } else {
            merged.push_back(p);
        }
    }
    return merged;
}

struct InterpolatedCost {
    double avg_cost = 0.0;
    double se_cost = 0.0;
};

// Linear interpolation of cost (and its standard error) at a matched error
// rate; nullopt outside the curve's error range.
inline std::optional<InterpolatedCost> cost_at(const Curve& curve, double error_rate) {
    if (curve.empty() || error_rate < curve.front().error_rate ||
        error_rate > curve.back().error_rate) {
        return std::nullopt;
    }
    auto hi = std::lower_bound(curve.begin(), curve.end(), error_rate,
                               [](const CurvePoint& p, double e) { return p.error_rate < e; });
    if (hi == curve.begin()) {
        return InterpolatedCost{hi->avg_cost, hi->se_cost};
    }
    auto lo = hi - 1;
    const double span = hi->error_rate - lo->error_rate;
    if (span <= 0.0) {
        return InterpolatedCost{hi->avg_cost, hi->se_cost};
    }
    const double w = (error_rate - lo->error_rate) / span;
    return InterpolatedCost{lo->avg_cost + w * (hi->avg_cost - lo->avg_cost),
                            lo->se_cost + w * (hi->se_cost - lo->se_cost)};
}

// Outcome of asking whether `below` lies under `above` at matched error
// rates. Margins are minima over all probe points: absolute cost gap, the
// gap in combined-standard-error units, and the relative cost reduction.
struct DominanceReport {
    bool comparable = false;
    double lo = 0.0;
    double hi = 0.0;
    int n_probes = 0;
    double min_margin = std::numeric_limits<double>::infinity();
    double min_margin_se = std::numeric_limits<double>::infinity();
    double min_relative = std::numeric_limits<double>::infinity();

    bool dominates() const { return comparable && min_margin > 0.0; }
};

// Probes every knot of both curves inside the window plus a uniform grid,
// so narrow crossings between knots are still caught.
inline DominanceReport compare_curves(const Curve& below, const Curve& above,
                                      double window_lo = 0.0, double window_hi = 1.0,
                                      int grid_probes = 64) {
    DominanceReport report;
    if (below.empty() || above.empty()) return report;
    const double lo = std::max({window_lo, below.front().error_rate, above.front().error_rate});
    const double hi = std::min({window_hi, below.back().error_rate, above.back().error_rate});
    if (lo > hi) return report;
    report.lo = lo;
    report.hi = hi;

    std::vector<double> probes;
    probes.reserve(below.size() + above.size() + static_cast<std::size_t>(grid_probes) + 2);
    for (const CurvePoint& p : below) {
        if (p.error_rate >= lo && p.error_rate <= hi) probes.push_back(p.error_rate);
    }
    for (const CurvePoint& p : above) {
        if (p.error_rate >= lo && p.error_rate <= hi) probes.push_back(p.error_rate);
    }
    for (int i = 0; i <= grid_probes; ++i) {
        probes.push_back(lo + (hi - lo) * i / static_cast<double>(grid_probes));
    }
    std::sort(probes.begin(), probes.end());
    probes.erase(std::unique(probes.begin(), probes.end()), probes.end());

    for (double e : probes) {
        const auto cb = cost_at(below, e);
        const auto ca = cost_at(above, e);
        if (!cb || !ca) continue;
        report.comparable = true;
        report.n_probes += 1;
        const double margin = ca->avg_cost - cb->avg_cost;
        const double se = std::sqrt(ca->se_cost * ca->se_cost + cb->se_cost * cb->se_cost);
        report.min_margin = std::min(report.min_margin, margin);
        report.min_margin_se =
            std::min(report.min_margin_se, se > 0.0 ? margin / se
                                                    : std::numeric_limits<double>::infinity());
        report.min_relative = std::min(
            report.min_relative,
            ca->avg_cost > 0.0 ? margin / ca->avg_cost : std::numeric_limits<double>::infinity());
    }
    return report;
}

// Trade-off sanity for one curve ordered by C: error rate should not
// increase and cost should not decrease, up to `slack_se` standard errors
// of Monte-Carlo noise.
inline bool monotone_tradeoff(const std::vector<ExperimentResult>& rows_by_c,
                              double slack_se = 2.0) {
    for (std::size_t i = 1; i < rows_by_c.size(); ++i) {
        const ExperimentResult& prev = rows_by_c[i - 1];
        const ExperimentResult& cur = rows_by_c[i];
        const double err_slack =
            slack_se * std::sqrt(prev.se_error_rate * prev.se_error_rate +
                                 cur.se_error_rate * cur.se_error_rate);
        const double cost_slack =
            slack_se * std::sqrt(prev.se_avg_cost * prev.se_avg_cost +
                                 cur.se_avg_cost * cur.se_avg_cost);
        if (cur.error_rate > prev.error_rate + err_slack) return false;
        if (cur.avg_cost < prev.avg_cost - cost_slack) return false;
    }
    return true;
}

}  // namespace crowdstop
