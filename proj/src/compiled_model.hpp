#pragma once

// Dense adjacency form of a sparse quadratic model, used by the inner loops
// of the samplers and enumerators.

#include <vector>

#include "cqubo/model.hpp"

namespace cqubo::detail {

struct CompiledModel {
    Index n = 0;
    double offset = 0.0;
    std::vector<double> linear;
    std::vector<std::size_t> row_start;  // size n + 1
    std::vector<Index> neighbor;
    std::vector<double> weight;

    std::size_t degree(Index i) const { return row_start[i + 1] - row_start[i]; }

    template <class Domain>
    static CompiledModel from(const QuadraticModel<Domain>& m) {
        CompiledModel c;
        c.n = m.num_variables();
        c.offset = m.offset();
        c.linear.assign(c.n, 0.0);
        for (const auto& [i, v] : m.linear_terms()) c.linear[i] = v;
        std::vector<std::size_t> deg(c.n, 0);
        for (const auto& [ij, v] : m.quadratic_terms()) {
            ++deg[ij.first];
            ++deg[ij.second];
        }
        c.row_start.assign(c.n + 1, 0);
        for (Index i = 0; i < c.n; ++i) c.row_start[i + 1] = c.row_start[i] + deg[i];
        c.neighbor.resize(c.row_start[c.n]);
        c.weight.resize(c.row_start[c.n]);
        std::vector<std::size_t> fill(c.row_start.begin(), c.row_start.end() - 1);
        for (const auto& [ij, v] : m.quadratic_terms()) {
            c.neighbor[fill[ij.first]] = ij.second;
            c.weight[fill[ij.first]++] = v;
            c.neighbor[fill[ij.second]] = ij.first;
            c.weight[fill[ij.second]++] = v;
        }
        return c;
    }
};

}  // namespace cqubo::detail
