#pragma once

// Promotion-cannibalization instances.
//
// C(i,j) is the revenue lost from product i when i and j are promoted in the
// same quarter. Only the symmetric part of C enters the objective, so it is
// stored symmetric with a zero diagonal.

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "cqubo/penalties.hpp"

namespace cqubo {

class CannibalizationMatrix {
public:
    CannibalizationMatrix() = default;
    explicit CannibalizationMatrix(Index n_products) : n_(n_products) {}

    Index num_products() const { return n_; }
    double operator()(Index i, Index j) const;
    void set(Index i, Index j, double value);

    // Nonzero entries keyed (i, j) with i < j.
    const std::map<Pair, double>& entries() const { return entries_; }
    // Number of nonzero partners of product i.
    Index connectivity(Index i) const;
    double mean_connectivity() const;

    bool operator==(const CannibalizationMatrix&) const = default;

private:
    Index n_ = 0;
    std::map<Pair, double> entries_;
};

struct GenConfig {
    Index n_products = 0;
    Index min_connectivity = 0;
    std::uint64_t seed = 0;
};

// Dense symmetric draw in [0.1, 1) from one stream, then a single pass over
// all unordered pairs in shuffled order (second stream) zeroing a pair when
// both of its products currently have more than min_connectivity partners.
CannibalizationMatrix generate_c_matrix(const GenConfig& cfg);

struct SingleQuarterInstance {
    CannibalizationMatrix c;
    Index A = 0;
};

struct FourQuarterInstance {
    CannibalizationMatrix c;
    Index A = 0;
    Index B_min = 1;
    Index B_max = 2;
    std::array<double, 4> lambda{1.5, 1.0, 1.0, 1.5};
};

inline constexpr int kQuarters = 4;

// Variable index of product i in quarter q (both 0-based).
constexpr Index quarter_var(Index n_products, Index i, Index q) { return q * n_products + i; }

std::string instance_id(Index n_products, std::uint64_t seed);

// Constraint ids: "C1" for the single-quarter problem; "C1-q<q>", "C2-p<i>",
// "C3-p<i>-q<q>" (1-based) for the four-quarter problem.
ConstrainedProblem build_single_quarter(const SingleQuarterInstance& inst);
ConstrainedProblem build_four_quarter(const FourQuarterInstance& inst);

std::vector<std::string> c1_constraint_ids(const ConstrainedProblem& problem);

struct FeasibilityReport {
    bool feasible = true;
    std::vector<std::string> violations;
};

// Checks the primary variables only; any trailing bits (slack) are ignored.
FeasibilityReport check_feasible(const ConstrainedProblem& problem, std::span<const std::uint8_t> x);

}  // namespace cqubo
