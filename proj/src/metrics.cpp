#include "cqubo/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "cqubo/error.hpp"
#include "cqubo/problems.hpp"
#include "cqubo/rng.hpp"

namespace cqubo {

double approximation_ratio(double f_x, double f_min, double f_max) {
    if (!(f_max >= f_min)) throw InvalidArgument("approximation_ratio: f_max < f_min");
    if (f_x < f_min - kOptimalityTolerance || f_x > f_max + kOptimalityTolerance) {
        throw InvalidArgument("approximation_ratio: objective outside [f_min, f_max]");
    }
    if (f_max == f_min) return 1.0;
    const double r = 1.0 - (f_x - f_min) / (f_max - f_min);
    return std::clamp(r, 0.0, 1.0);
}

InstanceResult score_sample_set(const ConstrainedProblem& problem, const SampleSet& samples, double f_min,
                                double f_max) {
    InstanceResult out;
    out.f_min = f_min;
    out.f_max = f_max;
    const std::size_t total = samples.total_count();
    if (total == 0) return out;

    const Index n = problem.num_primary();
    std::size_t feasible = 0;
    std::size_t optimal = 0;
    for (const auto& rec : samples.records()) {
        if (rec.assignment.size() < n) throw InvalidArgument("sample shorter than the problem's primary variables");
        const std::span<const std::uint8_t> x(rec.assignment.data(), n);
        if (!check_feasible(problem, x).feasible) continue;
        feasible += rec.multiplicity;
        const double f = problem.objective.energy(x);
        if (f <= f_min + kOptimalityTolerance) optimal += rec.multiplicity;
        if (!out.best_feasible_objective || f < *out.best_feasible_objective) out.best_feasible_objective = f;
    }
    out.F = static_cast<double>(feasible) / static_cast<double>(total);
    out.S = static_cast<double>(optimal) / static_cast<double>(total);
    if (out.best_feasible_objective) {
        out.best_R = optimal > 0 ? 1.0 : approximation_ratio(*out.best_feasible_objective, f_min, f_max);
    }
    return out;
}

double percentile(std::vector<double> values, double fraction) {
    if (values.empty()) throw InvalidArgument("percentile of an empty set");
    if (!(fraction >= 0.0 && fraction <= 1.0)) throw InvalidArgument("percentile fraction outside [0, 1]");
    std::sort(values.begin(), values.end());
    const double pos = fraction * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    const double t = pos - static_cast<double>(lo);
    return values[lo] + t * (values[hi] - values[lo]);
}

BandStats band_stats(std::vector<double> values) {
    BandStats b;
    if (values.empty()) {
        const double nan = std::numeric_limits<double>::quiet_NaN();
        return {nan, nan, nan, nan};
    }
    const double n = static_cast<double>(values.size());
    b.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - b.mean) * (v - b.mean);
        b.sem = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
    }
    b.p05 = percentile(values, 0.05);
    b.p95 = percentile(std::move(values), 0.95);
    return b;
}

CalibrationTable calibration_sweep(const std::vector<CalibrationInstance>& instances,
                                   const std::vector<double>& alpha2_grid, const SchemeBuilder& scheme_builder,
                                   const SaConfig& solver_cfg) {
    if (alpha2_grid.empty()) throw InvalidArgument("calibration grid is empty");
    const std::size_t G = alpha2_grid.size();
    CalibrationTable table;
    for (std::size_t k = 0; k < instances.size(); ++k) {
        const auto& inst = instances[k];
        CalibrationRow row;
        row.instance_id = inst.id;
        for (std::size_t g = 0; g < G; ++g) {
            const auto enc = encode(inst.problem, scheme_builder(inst.problem, alpha2_grid[g]));
            SaConfig cfg = solver_cfg;
            cfg.seed = derive_seed(solver_cfg.seed, k * G + g);
            const auto samples = simulated_annealing(enc.model, cfg);
            const auto r = score_sample_set(inst.problem, samples, inst.range.f_min, inst.range.f_max);
            row.S.push_back(r.S);
            row.F.push_back(r.F);
        }
        row.S_max = *std::max_element(row.S.begin(), row.S.end());
        row.excluded = row.S_max == 0.0;
        if (row.excluded) table.excluded_ids.push_back(inst.id);
        table.instances.push_back(std::move(row));
    }
    for (std::size_t g = 0; g < G; ++g) {
        std::vector<double> ratios, feas;
        for (const auto& row : table.instances) {
            feas.push_back(row.F[g]);
            if (!row.excluded) ratios.push_back(row.S[g] / row.S_max);
        }
        table.points.push_back({alpha2_grid[g], band_stats(std::move(ratios)), band_stats(std::move(feas))});
    }
    return table;
}

std::string_view to_string(Classification c) {
    switch (c) {
        case Classification::Better: return "better";
        case Classification::Worse: return "worse";
        case Classification::Tie: return "tie";
        case Classification::Incomparable: return "incomparable";
    }
    return "incomparable";
}

Classification parse_classification(std::string_view s) {
    for (auto c : {Classification::Better, Classification::Worse, Classification::Tie, Classification::Incomparable}) {
        if (to_string(c) == s) return c;
    }
    throw InvalidArgument("unknown classification '" + std::string(s) + "'");
}

ComparisonSummary compare_schemes(const std::vector<InstanceResult>& a, const std::vector<InstanceResult>& b) {
    auto index = [](const std::vector<InstanceResult>& rs, const char* side) {
        std::map<std::string, const InstanceResult*> m;
        for (const auto& r : rs) {
            if (!m.emplace(r.instance_id, &r).second) {
                throw InvalidArgument(std::string("duplicate instance id '") + r.instance_id + "' in results " + side);
            }
        }
        return m;
    };
    const auto ma = index(a, "A");
    const auto mb = index(b, "B");

    ComparisonSummary out;
    for (const auto& [id, ra] : ma) {
        const auto it = mb.find(id);
        if (it == mb.end()) continue;
        const InstanceResult* rb = it->second;
        ComparisonRecord rec{id, std::nullopt, Classification::Incomparable};
        if (ra->best_feasible_objective && rb->best_feasible_objective) {
            const double d = *ra->best_feasible_objective - *rb->best_feasible_objective;
            rec.delta_objective = d;
            if (std::abs(d) <= kOptimalityTolerance) {
                rec.classification = Classification::Tie;
                ++out.n_tie;
            } else if (d < 0.0) {
                rec.classification = Classification::Better;
                ++out.n_b;
            } else {
                rec.classification = Classification::Worse;
                ++out.n_w;
            }
        } else {
            ++out.n_incomparable;
        }
        out.records.push_back(std::move(rec));
    }
    if (out.records.empty()) throw InvalidArgument("result sets share no instance ids");
    return out;
}

namespace {

double log_binomial(std::size_t n, std::size_t k) {
    return std::lgamma(static_cast<double>(n) + 1.0) - std::lgamma(static_cast<double>(k) + 1.0) -
           std::lgamma(static_cast<double>(n - k) + 1.0);
}

// 2^-n * sum_{k=lo}^{hi} C(n, k), for lo <= hi.
double binomial_tail(std::size_t n, std::size_t lo, std::size_t hi) {
    const double log_half = -static_cast<double>(n) * std::log(2.0);
    std::vector<double> terms;
    terms.reserve(hi - lo + 1);
    for (std::size_t k = lo; k <= hi; ++k) terms.push_back(log_binomial(n, k) + log_half);
    const double m = *std::max_element(terms.begin(), terms.end());
    double s = 0.0;
    for (double t : terms) s += std::exp(t - m);
    return std::exp(m + std::log(s));
}

}  // namespace

SignTest sign_test_p(std::size_t n_b, std::size_t n_w) {
    const std::size_t n = n_b + n_w;
    if (n == 0) throw InvalidArgument("sign test needs n_b + n_w >= 1");
    SignTest t;
    // Evaluate the smaller tail directly and take the other as its complement.
    if (n_b == 0) {
        t.p = 1.0;
        t.p_tilde = 0.0;
    } else if (2 * n_b > n) {
        t.p = std::min(1.0, binomial_tail(n, n_b, n));
        t.p_tilde = 1.0 - t.p;
    } else {
        t.p_tilde = std::min(1.0, binomial_tail(n, 0, n_b - 1));
        t.p = 1.0 - t.p_tilde;
    }
    return t;
}

std::vector<HistogramBin> histogram_deltas(const std::vector<ComparisonRecord>& records, double bin_width) {
    if (!(bin_width > 0.0) || !std::isfinite(bin_width)) throw InvalidArgument("bin width must be positive");
    std::map<long long, std::size_t> counts;
    for (const auto& r : records) {
        if (!r.delta_objective) continue;
        counts[static_cast<long long>(std::floor(*r.delta_objective / bin_width))]++;
    }
    std::vector<HistogramBin> bins;
    if (counts.empty()) return bins;
    for (long long k = counts.begin()->first; k <= counts.rbegin()->first; ++k) {
        const auto it = counts.find(k);
        bins.push_back({static_cast<double>(k) * bin_width, static_cast<double>(k + 1) * bin_width,
                        it == counts.end() ? 0 : it->second});
    }
    return bins;
}

}  // namespace cqubo
