#pragma once

// Samplers and exact enumeration over QUBO models.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cqubo/model.hpp"
#include "cqubo/penalties.hpp"

namespace cqubo {

struct SampleRecord {
    BitAssignment assignment;
    double energy = 0.0;
    std::size_t multiplicity = 1;
};

struct SampleMetadata {
    std::string solver;
    std::uint64_t seed = 0;
    std::map<std::string, double> parameters;
};

// Records are unique assignments sorted by ascending energy; energies within
// kEnergyTieTolerance of each other are ordered by the lexicographically
// smallest assignment (x_0 compared first).
class SampleSet {
public:
    SampleSet() = default;

    // Merges duplicate assignments and evaluates each energy against `model`.
    static SampleSet from_assignments(const QuboModel& model, std::vector<BitAssignment> samples,
                                      SampleMetadata meta);
    // Takes records with precomputed energies; throws RuntimeFailure if any
    // energy disagrees with re-evaluation by more than kEnergyTieTolerance.
    static SampleSet from_records(const QuboModel& model, std::vector<SampleRecord> records,
                                  SampleMetadata meta);

    const std::vector<SampleRecord>& records() const { return records_; }
    const SampleMetadata& metadata() const { return meta_; }
    std::size_t total_count() const;
    bool empty() const { return records_.empty(); }
    // Lowest-energy record. Throws RuntimeFailure when empty.
    const SampleRecord& best() const;

private:
    std::vector<SampleRecord> records_;
    SampleMetadata meta_;
};

inline constexpr double kEnergyTieTolerance = 1e-9;

// Lexicographic order on bit vectors, x_0 first.
bool lexicographically_less(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b);

enum class BetaInterpolation { Geometric, Linear };

struct BetaSchedule {
    double beta_min = 0.1;
    double beta_max = 10.0;
    BetaInterpolation interpolation = BetaInterpolation::Geometric;
};

struct SaConfig {
    std::size_t num_reads = 1000;
    std::size_t sweeps_per_read = 1000;
    // When unset the range is derived from the model: the hot end accepts the
    // largest single-flip energy increase with probability 1/2, the cold end
    // accepts the smallest nonzero one with probability exp(-10).
    std::optional<BetaSchedule> beta_schedule;
    BetaInterpolation interpolation = BetaInterpolation::Geometric;
    std::uint64_t seed = 0;
    std::size_t num_threads = 1;
};

BetaSchedule default_beta_range(const IsingModel& m, BetaInterpolation interpolation);

// Each read starts from a random spin state and performs sweeps_per_read
// sweeps; a sweep visits variables in index order and applies one Metropolis
// single-flip update per variable. Read r uses its own random stream, so the
// result does not depend on num_threads.
SampleSet simulated_annealing(const QuboModel& model, const SaConfig& cfg);
SampleSet simulated_annealing(const IsingModel& model, const SaConfig& cfg);

struct EnumerationLimits {
    // Hard cap on the number of variables enumerated exhaustively.
    std::size_t max_enumerated = 26;
    // Cap on C(n, A) for fixed-weight enumeration.
    std::uint64_t max_combinations = std::uint64_t{1} << 31;
};

// Exhaustive enumeration of all 2^n assignments; top_k lowest energies.
SampleSet brute_force(const QuboModel& model, std::size_t top_k, const EnumerationLimits& limits = {});

// Exact ground state with lexicographic tie-break. Variables forming an
// independent set of the coupling graph are minimized in closed form, so the
// enumerated space can be much smaller than 2^n.
SampleRecord ground_state(const QuboModel& model, const EnumerationLimits& limits = {});

// Visits every assignment of the variables outside `eliminated`, passing the
// bit mask (full indexing, eliminated bits zero) and the energy minimized over
// the eliminated variables. `eliminated` must be pairwise uncoupled.
void for_each_minimized(const QuboModel& model, std::span<const Index> eliminated,
                        const std::function<void(std::uint64_t mask, double energy)>& visit,
                        const EnumerationLimits& limits = {});

// Entry k: the minimum energy over assignments with exactly k ones among
// `vars`, minimizing freely over all other variables.
std::vector<double> min_energy_by_hamming_weight(const QuboModel& model, std::span<const Index> vars,
                                                 const EnumerationLimits& limits = {});

// Multi-group version: a table over weight vectors (k_0, ..., k_{g-1}) in
// mixed radix, k_0 fastest. Groups must be disjoint. Unreachable cells hold
// +infinity.
struct GroupWeightTable {
    std::vector<std::size_t> group_sizes;
    std::vector<double> values;

    std::size_t index(std::span<const std::size_t> weights) const;
    double at(std::span<const std::size_t> weights) const { return values[index(weights)]; }
};

GroupWeightTable min_energy_by_group_weights(const QuboModel& model,
                                             std::span<const std::vector<Index>> groups,
                                             const EnumerationLimits& limits = {});

struct ObjectiveRange {
    double f_min = 0.0;
    double f_max = 0.0;
};

// Exact min and max of the objective over feasible assignments. A problem
// whose only constraint is one Hamming-weight equality is enumerated over
// fixed-weight subsets; otherwise over all 2^n primary assignments.
ObjectiveRange extremal_objective_values(const ConstrainedProblem& problem,
                                         const EnumerationLimits& limits = {});

}  // namespace cqubo
