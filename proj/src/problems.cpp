#include "cqubo/problems.hpp"

#include <numeric>

#include "cqubo/error.hpp"
#include "cqubo/rng.hpp"

namespace cqubo {

double CannibalizationMatrix::operator()(Index i, Index j) const {
    if (i == j) return 0.0;
    auto it = entries_.find(i < j ? Pair{i, j} : Pair{j, i});
    return it == entries_.end() ? 0.0 : it->second;
}

void CannibalizationMatrix::set(Index i, Index j, double value) {
    if (i >= n_ || j >= n_) throw InvalidArgument("product index out of range");
    if (i == j) {
        if (value != 0.0) throw InvalidArgument("cannibalization diagonal must be zero");
        return;
    }
    if (value < 0.0) throw InvalidArgument("cannibalization entries must be non-negative");
    const Pair key = i < j ? Pair{i, j} : Pair{j, i};
    if (value == 0.0)
        entries_.erase(key);
    else
        entries_[key] = value;
}

Index CannibalizationMatrix::connectivity(Index i) const {
    Index k = 0;
    for (const auto& [ij, v] : entries_) k += (ij.first == i || ij.second == i);
    return k;
}

double CannibalizationMatrix::mean_connectivity() const {
    return n_ == 0 ? 0.0 : 2.0 * static_cast<double>(entries_.size()) / static_cast<double>(n_);
}

CannibalizationMatrix generate_c_matrix(const GenConfig& cfg) {
    const Index n = cfg.n_products;
    if (n < 2) throw InvalidArgument("need at least two products");
    if (cfg.min_connectivity > n - 1) {
        throw InvalidArgument("min_connectivity " + std::to_string(cfg.min_connectivity) +
                              " exceeds n_products - 1 = " + std::to_string(n - 1));
    }

    std::vector<Pair> pairs;
    pairs.reserve(n * (n - 1) / 2);
    for (Index i = 0; i < n; ++i)
        for (Index j = i + 1; j < n; ++j) pairs.emplace_back(i, j);

    Rng values(cfg.seed, streams::kMatrixValues);
    std::vector<double> drawn(pairs.size());
    for (auto& v : drawn) v = values.uniform(0.1, 1.0);

    std::vector<std::size_t> order(pairs.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng shuffler(cfg.seed, streams::kSparsifyOrder);
    shuffler.shuffle(std::span<std::size_t>(order));

    std::vector<Index> degree(n, n - 1);
    std::vector<bool> kept(pairs.size(), true);
    for (std::size_t k : order) {
        const auto [i, j] = pairs[k];
        if (degree[i] > cfg.min_connectivity && degree[j] > cfg.min_connectivity) {
            kept[k] = false;
            --degree[i];
            --degree[j];
        }
    }

    CannibalizationMatrix c(n);
    for (std::size_t k = 0; k < pairs.size(); ++k)
        if (kept[k]) c.set(pairs[k].first, pairs[k].second, drawn[k]);
    return c;
}

std::string instance_id(Index n_products, std::uint64_t seed) {
    return std::to_string(n_products) + "_" + std::to_string(seed);
}

ConstrainedProblem build_single_quarter(const SingleQuarterInstance& inst) {
    const Index n = inst.c.num_products();
    if (inst.A > n) throw InvalidArgument("target A exceeds the number of products");
    ConstrainedProblem p{QuboModel(n), {}};
    for (const auto& [ij, v] : inst.c.entries()) p.objective.add_quadratic(ij.first, ij.second, 2.0 * v);
    LinearEquality eq;
    for (Index i = 0; i < n; ++i) eq.coeffs[i] = 1.0;
    eq.value = static_cast<double>(inst.A);
    p.constraints.push_back({"C1", eq});
    return p;
}

ConstrainedProblem build_four_quarter(const FourQuarterInstance& inst) {
    const Index n = inst.c.num_products();
    if (inst.B_min > inst.B_max) throw InvalidArgument("B_min exceeds B_max");
    if (inst.A > n) throw InvalidArgument("target A exceeds the number of products");
    for (double l : inst.lambda)
        if (!(l > 0.0)) throw InvalidArgument("seasonal scale factors must be positive");

    ConstrainedProblem p{QuboModel(kQuarters * n), {}};
    for (Index q = 0; q < kQuarters; ++q) {
        for (const auto& [ij, v] : inst.c.entries()) {
            p.objective.add_quadratic(quarter_var(n, ij.first, q), quarter_var(n, ij.second, q),
                                      inst.lambda[q] * 2.0 * v);
        }
    }
    for (Index q = 0; q < kQuarters; ++q) {
        LinearEquality eq;
        for (Index i = 0; i < n; ++i) eq.coeffs[quarter_var(n, i, q)] = 1.0;
        eq.value = static_cast<double>(inst.A);
        p.constraints.push_back({"C1-q" + std::to_string(q + 1), eq});
    }
    for (Index i = 0; i < n; ++i) {
        LinearInequality ineq;
        for (Index q = 0; q < kQuarters; ++q) ineq.coeffs[quarter_var(n, i, q)] = 1.0;
        ineq.d_min = static_cast<double>(inst.B_min);
        ineq.d_max = static_cast<double>(inst.B_max);
        p.constraints.push_back({"C2-p" + std::to_string(i + 1), ineq});
    }
    for (Index i = 0; i < n; ++i) {
        for (Index q = 0; q + 1 < kQuarters; ++q) {
            p.constraints.push_back({"C3-p" + std::to_string(i + 1) + "-q" + std::to_string(q + 1),
                                     PairwiseExclusion{quarter_var(n, i, q), quarter_var(n, i, q + 1)}});
        }
    }
    return p;
}

std::vector<std::string> c1_constraint_ids(const ConstrainedProblem& problem) {
    std::vector<std::string> ids;
    for (const auto& c : problem.constraints)
        if (c.id == "C1" || c.id.starts_with("C1-")) ids.push_back(c.id);
    return ids;
}

FeasibilityReport check_feasible(const ConstrainedProblem& problem, std::span<const std::uint8_t> x) {
    if (x.size() < problem.num_primary()) {
        throw InvalidArgument("assignment does not cover the primary variables");
    }
    const auto primary = x.first(problem.num_primary());
    FeasibilityReport r;
    for (const auto& c : problem.constraints) {
        if (!c.satisfied(primary)) {
            r.feasible = false;
            r.violations.push_back(c.id);
        }
    }
    return r;
}

}  // namespace cqubo
