#pragma once

// Searches for linear penalty strengths alpha1.
//
// A negative alpha1 favours larger Hamming weights on the penalized variables
// and a positive one favours smaller weights, so the ground-state weight is a
// non-increasing step function of alpha1. The searches below drive a solver
// callback that reports that weight for a given vector of strengths.

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cqubo/penalties.hpp"
#include "cqubo/rng.hpp"
#include "cqubo/solvers.hpp"

namespace cqubo {

struct SearchConfig {
    std::size_t max_iterations_1 = 20;
    std::size_t max_iterations_2 = 100;
    double initial_strength = -1.0;
    double initial_step = 0.5;
    double phase2_step_scale = 0.1;
    double phase2_decay = 0.93;
    std::size_t target = 0;
    // Bracket width at which bisection gives up.
    double resolution = 1e-4;

    void validate() const;
};

// Given one strength per searched constraint, returns the Hamming weight of
// each searched constraint's variables in the solver's best assignment.
using SolverCallback = std::function<std::vector<std::size_t>(std::span<const double> strengths)>;

struct SearchStep {
    int phase = 1;
    std::vector<double> strengths;
    std::vector<std::size_t> weights;
    double step = 0.0;
};

enum class SearchStatus { Converged, Failed };

struct SearchOutcome {
    SearchStatus status = SearchStatus::Failed;
    std::vector<double> strengths;  // meaningful when converged
    std::size_t iterations_used = 0;
    std::vector<SearchStep> trace;

    bool converged() const { return status == SearchStatus::Converged; }
};

// One Hamming-weight constraint: expand the step (doubling) until the target
// is bracketed, then bisect. Converged iff the callback reports exactly the
// target. Expansion is capped by max_iterations_1, bisection by
// max_iterations_2 and resolution.
SearchOutcome single_constraint_search(const SolverCallback& solver, const SearchConfig& cfg);
// Same, taking the target from the problem's only constraint.
SearchOutcome single_constraint_search(const ConstrainedProblem& problem, const SolverCallback& solver,
                                       SearchConfig cfg);

struct FeasibleWindow {
    // Verified inner endpoints: the target weight is observed at both.
    double lower = 0.0;
    double upper = 0.0;
    // Nearest probed strengths outside the window (weight differs), within
    // resolution of the inner endpoints. Infinite when the window is unbounded.
    double outer_lower = 0.0;
    double outer_upper = 0.0;

    double draw(Rng& rng) const { return rng.uniform(lower, upper); }
};

// Bisects both edges of the alpha1 interval mapping to the target weight.
// Requires an exact callback. std::nullopt when no probed strength hits the
// target.
std::optional<FeasibleWindow> alpha1_feasible_window(const SolverCallback& solver, const SearchConfig& cfg,
                                                     double resolution);

// Open alpha1 interval making weight A the unique minimizer of
// emin[k] + alpha1 * (k - A). Infinite entries of emin are unreachable weights
// and ignored. Either bound may be infinite.
struct HullInterval {
    double lower;
    double upper;
};
std::optional<HullInterval> hull_alpha1_interval(std::span<const double> emin, std::size_t A,
                                                 double tol = 1e-9);

// True iff (A, emin[A]) is a strict vertex of the lower convex hull of the
// points (k, emin[k]).
bool hull_feasibility_oracle(std::span<const double> emin, std::size_t A, double tol = 1e-9);

// Two-phase search over several Hamming-weight constraints sharing one target.
// Phase 1 moves a shared strength until the mean weight equals the target,
// stepping then bisecting. If every constraint is then at the target the
// search ends; otherwise phase 2 adjusts each strength independently with a
// shrinking step, halving back toward the previous value whenever the
// direction reverses.
SearchOutcome multi_constraint_search(std::size_t num_constraints, const SolverCallback& solver,
                                      const SearchConfig& cfg);

// multi_constraint_search over the four C1 constraints of a four-quarter
// problem, taking the target from them.
SearchOutcome four_quarter_search(const ConstrainedProblem& problem, const SolverCallback& solver,
                                  SearchConfig cfg);

// Like multi_constraint_search but keeping all strengths equal throughout; a
// state where the total weight is right but individual weights are not is a
// failure.
SearchOutcome tied_constraint_search(std::size_t num_constraints, const SolverCallback& solver,
                                     const SearchConfig& cfg);

// Search over the quarters marked 'L' in `pattern` (e.g. "LQQL"). The solver
// receives one strength per 'L' quarter, in quarter order, and must bake the
// quadratic penalties for 'Q' quarters into its model. An all-'Q' pattern
// converges immediately with no strengths.
SearchOutcome mixed_scheme_search(std::string_view pattern, const SolverCallback& solver,
                                  const SearchConfig& cfg, bool tie_linear_strengths);

// Solver callbacks over a ConstrainedProblem. `base` gives the encoding of
// every constraint not listed in `linear_ids`; those get linear Ising
// penalties with the strengths passed to the callback, in order.
SolverCallback make_exact_callback(ConstrainedProblem problem, PenaltyScheme base,
                                   std::vector<std::string> linear_ids, EnumerationLimits limits = {});
// Reports weights of the lowest-energy sample.
SolverCallback make_sa_callback(ConstrainedProblem problem, PenaltyScheme base,
                                std::vector<std::string> linear_ids, SaConfig cfg);

std::size_t hamming_weight(const Constraint& c, std::span<const std::uint8_t> x);

}  // namespace cqubo
