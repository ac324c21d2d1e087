#pragma once

// Binary quadratic models in QUBO (bits) and Ising (spins) form.
//
//   QUBO:  f(x) = offset + sum_i a_i x_i + sum_{i<j} b_ij x_i x_j,   x_i in {0,1}
//   Ising: H(s) = offset + sum_i h_i s_i + sum_{i<j} J_ij s_i s_j,  s_i in {-1,+1}
//
// The two are related by s_i = 1 - 2 x_i; offsets carry every constant so the
// conversion preserves energies exactly (up to rounding).

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <type_traits>
#include <utility>
#include <vector>

namespace cqubo {

using Index = std::size_t;
using Pair = std::pair<Index, Index>;

using BitAssignment = std::vector<std::uint8_t>;
using SpinAssignment = std::vector<std::int8_t>;

SpinAssignment to_spins(std::span<const std::uint8_t> bits);
BitAssignment to_bits(std::span<const std::int8_t> spins);

struct BinaryTag {};
struct SpinTag {};

// Sparse storage: absent keys mean a zero coefficient. Quadratic keys are
// always stored with first < second.
template <class Domain>
class QuadraticModel {
public:
    QuadraticModel() = default;
    explicit QuadraticModel(Index n) : n_(n) {}

    Index num_variables() const { return n_; }

    // Appends a fresh variable and returns its index.
    Index add_variable() { return n_++; }

    void add_linear(Index i, double value);
    void set_linear(Index i, double value);
    void add_quadratic(Index i, Index j, double value);
    void set_quadratic(Index i, Index j, double value);
    void add_offset(double value) { offset_ += value; }
    void set_offset(double value) { offset_ = value; }

    double linear(Index i) const;
    double quadratic(Index i, Index j) const;
    double offset() const { return offset_; }

    const std::map<Index, double>& linear_terms() const { return linear_; }
    const std::map<Pair, double>& quadratic_terms() const { return quadratic_; }

    // Multiplies every coefficient, including the offset.
    QuadraticModel scaled(double factor) const;

    // Throws InvalidArgument when values.size() != num_variables() or an entry
    // lies outside the domain.
    template <class T>
    double energy(std::span<const T> values) const;

    double energy(const std::vector<std::uint8_t>& v) const
        requires std::is_same_v<Domain, BinaryTag> {
        return energy(std::span<const std::uint8_t>(v));
    }
    double energy(const std::vector<std::int8_t>& v) const
        requires std::is_same_v<Domain, SpinTag> {
        return energy(std::span<const std::int8_t>(v));
    }

    bool operator==(const QuadraticModel&) const = default;

private:
    void check_index(Index i) const;
    static Pair ordered(Index i, Index j);

    Index n_ = 0;
    std::map<Index, double> linear_;
    std::map<Pair, double> quadratic_;
    double offset_ = 0.0;
};

using QuboModel = QuadraticModel<BinaryTag>;
using IsingModel = QuadraticModel<SpinTag>;

extern template class QuadraticModel<BinaryTag>;
extern template class QuadraticModel<SpinTag>;

// Coefficient-wise comparison treating absent keys as zero.
template <class Domain>
bool approx_equal(const QuadraticModel<Domain>& lhs, const QuadraticModel<Domain>& rhs,
                  double tol);

IsingModel qubo_to_ising(const QuboModel& q);
QuboModel ising_to_qubo(const IsingModel& m);

struct DynamicRangeReport {
    double max_abs_h = 0.0;
    double max_abs_J = 0.0;
    double normalization = 1.0;   // N
    double effective_scale = 1.0; // 1/N
};

inline constexpr double kDefaultHLimit = 4.0;
inline constexpr double kDefaultJLimit = 1.0;

DynamicRangeReport dynamic_range(const IsingModel& m, double h_limit = kDefaultHLimit,
                                 double J_limit = kDefaultJLimit);

// Scales m by 1/N with N the smallest factor bringing every |h| under h_limit
// and every |J| under J_limit. N may be below 1. A model without fields or
// couplings gets N = 1.
std::pair<IsingModel, DynamicRangeReport> normalize(const IsingModel& m,
                                                    double h_limit = kDefaultHLimit,
                                                    double J_limit = kDefaultJLimit);

// Dense upper-triangular Q with Q(i,i) = a_i and Q(i,j) = b_ij for i < j.
struct QMatrix {
    Index n = 0;
    std::vector<double> values;  // row-major n*n
    double offset = 0.0;

    double operator()(Index i, Index j) const { return values[i * n + j]; }
};

QMatrix export_q_matrix(const QuboModel& q);
// Entries below the diagonal must be zero.
QuboModel import_q_matrix(const QMatrix& m);

}  // namespace cqubo
