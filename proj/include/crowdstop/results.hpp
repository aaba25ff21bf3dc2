#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "crowdstop/rng.hpp"

namespace crowdstop {

// One sweep point: a (scheme, epsilon, c) cell evaluated on a workload.
// se_* are standard errors (per-HIT within a replication, between-replication
// after aggregation); they are API-only and not part of the CSV contract.
struct ExperimentResult {
    std::string scheme;
    double epsilon = 0.0;
    double c = 0.0;
    double error_rate = 0.0;
    double avg_cost = 0.0;
    int n_hits = 0;
    std::uint64_t seed = 0;
    std::string rng_version = std::string(kRngVersion);
    double se_error_rate = 0.0;
    double se_avg_cost = 0.0;
};

// Fixed-decimal rendering with 6 significant digits; the CSV contract is
// byte-exact, so all real-valued columns go through here.
inline std::string format_sig6(double v) {
    if (!std::isfinite(v)) {
        throw std::invalid_argument("format_sig6: value must be finite");
    }
    int decimals = 5;
    if (v != 0.0) {
        const int exponent = static_cast<int>(std::floor(std::log10(std::fabs(v))));
        decimals = std::clamp(5 - exponent, 0, 17);
    }
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
    return buf;
}

inline constexpr std::string_view kResultsCsvHeader =
    "scheme,epsilon,c,error_rate,avg_cost,n_hits,seed,rng_version";

inline void emit_csv(std::vector<ExperimentResult> results, std::ostream& out) {
    std::stable_sort(results.begin(), results.end(),
                     [](const ExperimentResult& a, const ExperimentResult& b) {
                         if (a.scheme != b.scheme) return a.scheme < b.scheme;
                         if (a.epsilon != b.epsilon) return a.epsilon < b.epsilon;
                         return a.c < b.c;
                     });
    out << kResultsCsvHeader << '\n';
    for (const ExperimentResult& r : results) {
        out << r.scheme << ',' << format_sig6(r.epsilon) << ',' << format_sig6(r.c)
            << ',' << format_sig6(r.error_rate) << ',' << format_sig6(r.avg_cost)
            << ',' << r.n_hits << ',' << r.seed << ',' << r.rng_version << '\n';
    }
}

inline void emit_csv(const std::vector<ExperimentResult>& results,
                     const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("emit_csv: cannot open " + path);
    }
    emit_csv(results, static_cast<std::ostream&>(out));
    out.flush();
    if (!out) {
        throw std::runtime_error("emit_csv: write failed for " + path);
    }
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    for (char ch : line) {
        if (ch == ',') {
            fields.push_back(field);
            field.clear();
        } else {
            field.push_back(ch);
        }
    }
    fields.push_back(field);
    return fields;
}

inline double parse_double_field(const std::string& s, const char* what) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw std::runtime_error(std::string("parse_results_csv: bad ") + what + ": " + s);
    }
    if (pos != s.size()) {
        throw std::runtime_error(std::string("parse_results_csv: bad ") + what + ": " + s);
    }
    return v;
}

}  // namespace detail

// Inverse of emit_csv. Error-rate standard errors are reconstructed from
// the binomial formula; cost standard errors are not recoverable from the
// file and are left at 0.
inline std::vector<ExperimentResult> parse_results_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) {
        throw std::runtime_error("parse_results_csv: empty input");
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kResultsCsvHeader) {
        throw std::runtime_error("parse_results_csv: unexpected header: " + line);
    }
    std::vector<ExperimentResult> results;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::vector<std::string> f = detail::split_csv_line(line);
        if (f.size() != 8) {
            throw std::runtime_error("parse_results_csv: expected 8 fields, got " +
                                     std::to_string(f.size()));
        }
        ExperimentResult r;
        r.scheme = f[0];
        r.epsilon = detail::parse_double_field(f[1], "epsilon");
        r.c = detail::parse_double_field(f[2], "c");
        r.error_rate = detail::parse_double_field(f[3], "error_rate");
        r.avg_cost = detail::parse_double_field(f[4], "avg_cost");
        r.n_hits = static_cast<int>(detail::parse_double_field(f[5], "n_hits"));
        r.seed = static_cast<std::uint64_t>(std::stoull(f[6]));
        r.rng_version = f[7];
        if (r.n_hits > 0) {
            r.se_error_rate = std::sqrt(r.error_rate * (1.0 - r.error_rate) / r.n_hits);
        }
        results.push_back(std::move(r));
    }
    return results;
}

inline std::vector<ExperimentResult> parse_results_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("parse_results_csv: cannot open " + path);
    }
    return parse_results_csv(static_cast<std::istream&>(in));
}

}  // namespace crowdstop
