#include "cqubo/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cqubo/error.hpp"

namespace cqubo {

SpinAssignment to_spins(std::span<const std::uint8_t> bits) {
    SpinAssignment spins(bits.size());
    std::transform(bits.begin(), bits.end(), spins.begin(),
                   [](std::uint8_t b) { return static_cast<std::int8_t>(1 - 2 * b); });
    return spins;
}

BitAssignment to_bits(std::span<const std::int8_t> spins) {
    BitAssignment bits(spins.size());
    std::transform(spins.begin(), spins.end(), bits.begin(),
                   [](std::int8_t s) { return static_cast<std::uint8_t>((1 - s) / 2); });
    return bits;
}

template <class Domain>
void QuadraticModel<Domain>::check_index(Index i) const {
    if (i >= n_) {
        throw InvalidArgument("variable index " + std::to_string(i) + " out of range for model with " +
                              std::to_string(n_) + " variables");
    }
}

template <class Domain>
Pair QuadraticModel<Domain>::ordered(Index i, Index j) {
    if (i == j) {
        throw InvalidArgument("quadratic term requires two distinct variables, got " +
                              std::to_string(i) + " twice");
    }
    return i < j ? Pair{i, j} : Pair{j, i};
}

template <class Domain>
void QuadraticModel<Domain>::add_linear(Index i, double value) {
    check_index(i);
    linear_[i] += value;
}

template <class Domain>
void QuadraticModel<Domain>::set_linear(Index i, double value) {
    check_index(i);
    linear_[i] = value;
}

template <class Domain>
void QuadraticModel<Domain>::add_quadratic(Index i, Index j, double value) {
    check_index(i);
    check_index(j);
    quadratic_[ordered(i, j)] += value;
}

template <class Domain>
void QuadraticModel<Domain>::set_quadratic(Index i, Index j, double value) {
    check_index(i);
    check_index(j);
    quadratic_[ordered(i, j)] = value;
}

template <class Domain>
double QuadraticModel<Domain>::linear(Index i) const {
    auto it = linear_.find(i);
    return it == linear_.end() ? 0.0 : it->second;
}

template <class Domain>
double QuadraticModel<Domain>::quadratic(Index i, Index j) const {
    if (i == j) return 0.0;
    auto it = quadratic_.find(i < j ? Pair{i, j} : Pair{j, i});
    return it == quadratic_.end() ? 0.0 : it->second;
}

template <class Domain>
QuadraticModel<Domain> QuadraticModel<Domain>::scaled(double factor) const {
    QuadraticModel out = *this;
    for (auto& [i, v] : out.linear_) v *= factor;
    for (auto& [ij, v] : out.quadratic_) v *= factor;
    out.offset_ *= factor;
    return out;
}

template <class Domain>
template <class T>
double QuadraticModel<Domain>::energy(std::span<const T> values) const {
    if (values.size() != n_) {
        throw InvalidArgument("assignment has " + std::to_string(values.size()) +
                              " entries, model has " + std::to_string(n_) + " variables");
    }
    for (auto v : values) {
        const bool ok = std::is_same_v<Domain, BinaryTag> ? (v == 0 || v == 1) : (v == -1 || v == 1);
        if (!ok) throw InvalidArgument("assignment value outside the model's domain");
    }
    double e = offset_;
    for (const auto& [i, a] : linear_) e += a * values[i];
    for (const auto& [ij, b] : quadratic_) e += b * values[ij.first] * values[ij.second];
    return e;
}

template class QuadraticModel<BinaryTag>;
template class QuadraticModel<SpinTag>;
template double QuboModel::energy<std::uint8_t>(std::span<const std::uint8_t>) const;
template double IsingModel::energy<std::int8_t>(std::span<const std::int8_t>) const;

template <class Domain>
bool approx_equal(const QuadraticModel<Domain>& lhs, const QuadraticModel<Domain>& rhs,
                  double tol) {
    if (lhs.num_variables() != rhs.num_variables()) return false;
    if (std::abs(lhs.offset() - rhs.offset()) > tol) return false;
    for (const auto& [i, v] : lhs.linear_terms())
        if (std::abs(v - rhs.linear(i)) > tol) return false;
    for (const auto& [i, v] : rhs.linear_terms())
        if (std::abs(v - lhs.linear(i)) > tol) return false;
    for (const auto& [ij, v] : lhs.quadratic_terms())
        if (std::abs(v - rhs.quadratic(ij.first, ij.second)) > tol) return false;
    for (const auto& [ij, v] : rhs.quadratic_terms())
        if (std::abs(v - lhs.quadratic(ij.first, ij.second)) > tol) return false;
    return true;
}

template bool approx_equal(const QuboModel&, const QuboModel&, double);
template bool approx_equal(const IsingModel&, const IsingModel&, double);

IsingModel qubo_to_ising(const QuboModel& q) {
    // x = (1 - s) / 2
    IsingModel m(q.num_variables());
    double offset = q.offset();
    for (const auto& [i, a] : q.linear_terms()) {
        m.add_linear(i, -a / 2.0);
        offset += a / 2.0;
    }
    for (const auto& [ij, b] : q.quadratic_terms()) {
        m.add_quadratic(ij.first, ij.second, b / 4.0);
        m.add_linear(ij.first, -b / 4.0);
        m.add_linear(ij.second, -b / 4.0);
        offset += b / 4.0;
    }
    m.set_offset(offset);
    return m;
}

QuboModel ising_to_qubo(const IsingModel& m) {
    // s = 1 - 2x
    QuboModel q(m.num_variables());
    double offset = m.offset();
    for (const auto& [i, h] : m.linear_terms()) {
        q.add_linear(i, -2.0 * h);
        offset += h;
    }
    for (const auto& [ij, J] : m.quadratic_terms()) {
        q.add_quadratic(ij.first, ij.second, 4.0 * J);
        q.add_linear(ij.first, -2.0 * J);
        q.add_linear(ij.second, -2.0 * J);
        offset += J;
    }
    q.set_offset(offset);
    return q;
}

DynamicRangeReport dynamic_range(const IsingModel& m, double h_limit, double J_limit) {
    if (!(h_limit > 0.0) || !(J_limit > 0.0)) {
        throw InvalidArgument("normalization limits must be positive");
    }
    DynamicRangeReport r;
    for (const auto& [i, h] : m.linear_terms()) r.max_abs_h = std::max(r.max_abs_h, std::abs(h));
    for (const auto& [ij, J] : m.quadratic_terms()) r.max_abs_J = std::max(r.max_abs_J, std::abs(J));
    const double n = std::max(r.max_abs_h / h_limit, r.max_abs_J / J_limit);
    r.normalization = n > 0.0 ? n : 1.0;
    r.effective_scale = 1.0 / r.normalization;
    return r;
}

std::pair<IsingModel, DynamicRangeReport> normalize(const IsingModel& m, double h_limit,
                                                    double J_limit) {
    auto report = dynamic_range(m, h_limit, J_limit);
    return {m.scaled(report.effective_scale), report};
}

QMatrix export_q_matrix(const QuboModel& q) {
    const Index n = q.num_variables();
    QMatrix out{n, std::vector<double>(n * n, 0.0), q.offset()};
    for (const auto& [i, a] : q.linear_terms()) out.values[i * n + i] = a;
    for (const auto& [ij, b] : q.quadratic_terms()) out.values[ij.first * n + ij.second] = b;
    return out;
}

QuboModel import_q_matrix(const QMatrix& m) {
    if (m.values.size() != m.n * m.n) throw InvalidArgument("Q matrix storage does not match n*n");
    QuboModel q(m.n);
    for (Index i = 0; i < m.n; ++i) {
        for (Index j = 0; j < m.n; ++j) {
            const double v = m(i, j);
            if (v == 0.0) continue;
            if (j < i) throw InvalidArgument("Q matrix must be upper triangular");
            if (i == j)
                q.set_linear(i, v);
            else
                q.set_quadratic(i, j, v);
        }
    }
    q.set_offset(m.offset);
    return q;
}

}  // namespace cqubo
