#pragma once

// Constraint records and the penalty encodings that fold them into a QuboModel.
//
//   quadratic equality   alpha2 * (sum_i mu_i x_i - c)^2
//   linear Ising         alpha1 * (sum_i x_i - A)          (unit coefficients only)
//   pairwise exclusion   alpha2 * x_a x_b
//   slack inequality     alpha2 * (sum_i x_i - d_max + sum_j 2^j s_j)^2
//
// The linear Ising penalty adds local fields only. It does not guarantee that
// infeasible assignments are penalized; its strength has to be searched for.

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "cqubo/model.hpp"

namespace cqubo {

struct LinearEquality {
    std::map<Index, double> coeffs;
    double value = 0.0;
};

struct LinearInequality {
    std::map<Index, double> coeffs;
    double d_min = 0.0;
    double d_max = 0.0;
};

struct PairwiseExclusion {
    Index var_a = 0;
    Index var_b = 0;
};

using ConstraintBody = std::variant<LinearEquality, LinearInequality, PairwiseExclusion>;

struct Constraint {
    std::string id;
    ConstraintBody body;

    // Sum of coefficient * x over the constraint's variables.
    double lhs(std::span<const std::uint8_t> x) const;
    bool satisfied(std::span<const std::uint8_t> x, double tol = 1e-9) const;
    std::vector<Index> variables() const;
    // True for a LinearEquality whose coefficients are all exactly 1.
    bool is_hamming_weight_equality() const;
};

struct ConstrainedProblem {
    QuboModel objective;
    std::vector<Constraint> constraints;

    Index num_primary() const { return objective.num_variables(); }
    const Constraint& constraint(std::string_view id) const;
    // Throws InvalidArgument when a constraint references a variable outside
    // the objective or has d_min > d_max.
    void validate() const;
};

enum class PenaltyMethod { LinearIsing, QuadraticEquality, QuadraticSlack, QuadraticPairwise };

std::string_view to_string(PenaltyMethod m);
// Accepts the scheme-file spellings "linear", "quadratic", "slack", "pairwise".
PenaltyMethod parse_penalty_method(std::string_view name);

struct PenaltyAssignment {
    PenaltyMethod method = PenaltyMethod::QuadraticEquality;
    double strength = 0.0;

    bool operator==(const PenaltyAssignment&) const = default;
};

// Keyed by constraint id.
using PenaltyScheme = std::map<std::string, PenaltyAssignment>;

struct EncodedProblem {
    QuboModel model;
    std::map<std::string, std::vector<Index>> slack_registry;
    Index original_n = 0;

    // Drops slack bits, keeping the primary variables.
    BitAssignment primary_part(std::span<const std::uint8_t> full) const;
};

void apply_quadratic_equality(QuboModel& model, const LinearEquality& c, double alpha2);
// Same penalty built directly in spin form:
//   h_i = -alpha2 mu_i (M/2 - c),  J_ij = alpha2 mu_i mu_j / 2,  M = sum_i mu_i.
void apply_quadratic_equality(IsingModel& model, const LinearEquality& c, double alpha2);
void apply_linear_ising(QuboModel& model, const LinearEquality& c, double alpha1);
void apply_quadratic_pairwise(QuboModel& model, const PairwiseExclusion& c, double alpha2);
void apply_quadratic_slack(EncodedProblem& problem, const std::string& constraint_id,
                           const LinearInequality& c, double alpha2);

// Penalizes each constraint of `problem` as `scheme` dictates. Slack variables
// are appended after the primary variables, in constraint order.
EncodedProblem encode(const ConstrainedProblem& problem, const PenaltyScheme& scheme);

// Positional expansion of a four-letter L/Q string over C1 constraint ids,
// e.g. "LQQL". Linear entries get `alpha1` (one value, or one per letter);
// quadratic entries get `alpha2`.
PenaltyScheme expand_quarter_shorthand(std::string_view pattern, std::span<const std::string> c1_ids,
                                       std::span<const double> alpha1, double alpha2);

}  // namespace cqubo
