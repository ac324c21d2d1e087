#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cqubo/penalties.hpp"
#include "cqubo/solvers.hpp"

namespace cqubo {

inline constexpr double kOptimalityTolerance = 1e-9;

// 1 at f_min, 0 at f_max. A degenerate range (f_max == f_min) gives 1.
double approximation_ratio(double f_x, double f_min, double f_max);

struct InstanceResult {
    std::string instance_id;
    std::string scheme;
    std::shared_ptr<const SampleSet> samples;
    double f_min = 0.0;
    double f_max = 0.0;
    double S = 0.0;  // fraction optimal
    double F = 0.0;  // fraction feasible
    std::optional<double> best_feasible_objective;
    std::optional<double> best_R;
};

// Slack bits beyond the problem's primary variables are ignored.
InstanceResult score_sample_set(const ConstrainedProblem& problem, const SampleSet& samples, double f_min,
                                double f_max);

struct CalibrationInstance {
    std::string id;
    ConstrainedProblem problem;
    ObjectiveRange range;
};

// Builds the penalty scheme used at one grid value of alpha2.
using SchemeBuilder = std::function<PenaltyScheme(const ConstrainedProblem&, double alpha2)>;

struct CalibrationRow {
    std::string instance_id;
    std::vector<double> S;  // one per grid point
    std::vector<double> F;
    double S_max = 0.0;
    bool excluded = false;  // S_max == 0, left out of S/S_max aggregates
};

struct BandStats {
    double mean = 0.0;
    double sem = 0.0;
    double p05 = 0.0;
    double p95 = 0.0;
};

struct CalibrationPoint {
    double alpha2 = 0.0;
    BandStats s_ratio;  // S / S_max over included instances
    BandStats F;        // over all instances
};

struct CalibrationTable {
    std::vector<CalibrationRow> instances;
    std::vector<CalibrationPoint> points;
    std::vector<std::string> excluded_ids;
};

// Instance k at grid point g is sampled with seed derive_seed(cfg.seed, k * grid.size() + g).
CalibrationTable calibration_sweep(const std::vector<CalibrationInstance>& instances,
                                   const std::vector<double>& alpha2_grid, const SchemeBuilder& scheme_builder,
                                   const SaConfig& solver_cfg);

// Mean, standard error (ddof = 1) and 5th/95th percentiles with linear
// interpolation between order statistics.
BandStats band_stats(std::vector<double> values);
double percentile(std::vector<double> values, double fraction);

enum class Classification { Better, Worse, Tie, Incomparable };
std::string_view to_string(Classification c);
Classification parse_classification(std::string_view s);

struct ComparisonRecord {
    std::string instance_id;
    std::optional<double> delta_objective;  // A minus B, absent when incomparable
    Classification classification = Classification::Incomparable;
};

struct ComparisonSummary {
    std::vector<ComparisonRecord> records;  // sorted by instance id
    std::size_t n_b = 0;
    std::size_t n_w = 0;
    std::size_t n_tie = 0;
    std::size_t n_incomparable = 0;
};

// Per shared instance id; lower best feasible objective is better. Objectives
// within kOptimalityTolerance tie.
ComparisonSummary compare_schemes(const std::vector<InstanceResult>& a, const std::vector<InstanceResult>& b);

struct SignTest {
    double p = 0.0;        // P(at least n_b successes out of n_b + n_w fair trials)
    double p_tilde = 0.0;  // 1 - p; the smaller of the two keeps full relative precision
};
SignTest sign_test_p(std::size_t n_b, std::size_t n_w);

struct HistogramBin {
    double lower = 0.0;
    double upper = 0.0;
    std::size_t count = 0;
};

// Bins [k w, (k+1) w) over the comparable deltas, contiguous from the lowest
// to the highest occupied bin.
std::vector<HistogramBin> histogram_deltas(const std::vector<ComparisonRecord>& records, double bin_width);

}  // namespace cqubo
