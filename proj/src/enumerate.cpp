#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <queue>

#include "compiled_model.hpp"
#include "cqubo/error.hpp"
#include "cqubo/solvers.hpp"

namespace cqubo {

namespace {

constexpr std::size_t kMaxMaskVariables = 64;

// a < b in lexicographic order of the bit vectors (bit i holds x_i).
bool mask_lex_less(std::uint64_t a, std::uint64_t b) {
    const std::uint64_t diff = a ^ b;
    if (diff == 0) return false;
    return (a & (diff & (~diff + 1))) == 0;
}

BitAssignment mask_to_bits(std::uint64_t mask, Index n) {
    BitAssignment bits(n);
    for (Index i = 0; i < n; ++i) bits[i] = static_cast<std::uint8_t>((mask >> i) & 1U);
    return bits;
}

double min0(double f) { return f < 0.0 ? f : 0.0; }

// Gray-code walk over the non-eliminated variables. Eliminated variables must
// be pairwise uncoupled; each is set to whichever value minimizes the energy
// given the others, which makes the reported energy the exact minimum over
// them.
class MinimizingEnumerator {
public:
    MinimizingEnumerator(const QuboModel& model, std::span<const Index> eliminated,
                         const EnumerationLimits& limits)
        : m_(detail::CompiledModel::from(model)), is_leaf_(m_.n, 0) {
        if (m_.n > kMaxMaskVariables) {
            throw RuntimeFailure("exhaustive enumeration supports at most 64 variables, model has " +
                                 std::to_string(m_.n));
        }
        for (Index v : eliminated) {
            if (v >= m_.n) throw InvalidArgument("eliminated variable out of range");
            if (is_leaf_[v]) throw InvalidArgument("eliminated variable listed twice");
            is_leaf_[v] = 1;
            leaves_.push_back(v);
        }
        for (Index v : leaves_) {
            for (std::size_t k = m_.row_start[v]; k < m_.row_start[v + 1]; ++k) {
                if (is_leaf_[m_.neighbor[k]]) {
                    throw InvalidArgument("eliminated variables must not be coupled to each other");
                }
            }
        }
        for (Index v = 0; v < m_.n; ++v)
            if (!is_leaf_[v]) enumerated_.push_back(v);
        if (enumerated_.size() > limits.max_enumerated) {
            throw RuntimeFailure("exhaustive enumeration over " + std::to_string(enumerated_.size()) +
                                 " variables exceeds the cap of " + std::to_string(limits.max_enumerated) +
                                 "; use simulated annealing instead");
        }
        // Low Gray-code positions flip most often; give them the cheap variables.
        std::stable_sort(enumerated_.begin(), enumerated_.end(),
                         [&](Index a, Index b) { return m_.degree(a) < m_.degree(b); });
    }

    const std::vector<Index>& enumerated() const { return enumerated_; }

    // Calls visit(mask, energy, flipped) for every assignment; flipped is the
    // variable changed since the previous visit (npos for the first).
    template <class Visit>
    void run(Visit&& visit) {
        field_ = m_.linear;
        energy_ = m_.offset;
        leaf_sum_ = 0.0;
        for (Index l : leaves_) leaf_sum_ += min0(field_[l]);
        mask_ = 0;
        visit(mask_, energy_ + leaf_sum_, npos);
        const std::uint64_t count = std::uint64_t{1} << enumerated_.size();
        for (std::uint64_t t = 1; t < count; ++t) {
            const Index v = enumerated_[static_cast<std::size_t>(std::countr_zero(t))];
            flip(v);
            visit(mask_, energy_ + leaf_sum_, v);
        }
    }

    // Current mask with the minimizing value filled in for each eliminated
    // variable (zero on ties).
    std::uint64_t completed_mask() const {
        std::uint64_t full = mask_;
        for (Index l : leaves_)
            if (field_[l] < -kEnergyTieTolerance) full |= std::uint64_t{1} << l;
        return full;
    }

    static constexpr Index npos = std::numeric_limits<Index>::max();

private:
    void flip(Index v) {
        const std::uint64_t bit = std::uint64_t{1} << v;
        const bool turning_on = (mask_ & bit) == 0;
        mask_ ^= bit;
        energy_ += turning_on ? field_[v] : -field_[v];
        const double sign = turning_on ? 1.0 : -1.0;
        for (std::size_t k = m_.row_start[v]; k < m_.row_start[v + 1]; ++k) {
            const Index u = m_.neighbor[k];
            if (is_leaf_[u]) {
                leaf_sum_ -= min0(field_[u]);
                field_[u] += sign * m_.weight[k];
                leaf_sum_ += min0(field_[u]);
            } else {
                field_[u] += sign * m_.weight[k];
            }
        }
    }

    detail::CompiledModel m_;
    std::vector<char> is_leaf_;
    std::vector<Index> leaves_;
    std::vector<Index> enumerated_;
    std::vector<double> field_;
    double energy_ = 0.0;
    double leaf_sum_ = 0.0;
    std::uint64_t mask_ = 0;
};

// Greedy minimum-degree independent set among the candidates.
std::vector<Index> independent_subset(const QuboModel& model, std::vector<char> candidate) {
    const auto m = detail::CompiledModel::from(model);
    std::vector<Index> chosen;
    while (true) {
        Index best = m.n;
        std::size_t best_degree = std::numeric_limits<std::size_t>::max();
        for (Index v = 0; v < m.n; ++v) {
            if (!candidate[v]) continue;
            std::size_t d = 0;
            for (std::size_t k = m.row_start[v]; k < m.row_start[v + 1]; ++k) d += candidate[m.neighbor[k]] != 0;
            if (d < best_degree) {
                best_degree = d;
                best = v;
            }
        }
        if (best == m.n) break;
        chosen.push_back(best);
        candidate[best] = 0;
        for (std::size_t k = m.row_start[best]; k < m.row_start[best + 1]; ++k) candidate[m.neighbor[k]] = 0;
    }
    std::sort(chosen.begin(), chosen.end());
    return chosen;
}

}  // namespace

SampleSet brute_force(const QuboModel& model, std::size_t top_k, const EnumerationLimits& limits) {
    const Index n = model.num_variables();
    if (n > limits.max_enumerated) {
        throw RuntimeFailure("brute force over " + std::to_string(n) + " variables exceeds the cap of " +
                             std::to_string(limits.max_enumerated) + "; use simulated annealing instead");
    }
    const std::uint64_t space = std::uint64_t{1} << n;
    const std::size_t k = static_cast<std::size_t>(std::min<std::uint64_t>(top_k, space));
    SampleMetadata meta{"brute_force", 0, {{"top_k", static_cast<double>(top_k)}}};
    if (k == 0) return SampleSet::from_records(model, {}, meta);

    struct Entry {
        double energy;
        std::uint64_t mask;
    };
    // Max-heap on (energy, lex) so the worst kept entry is on top.
    auto worse = [](const Entry& a, const Entry& b) {
        if (a.energy != b.energy) return a.energy < b.energy;
        return mask_lex_less(a.mask, b.mask);
    };
    std::priority_queue<Entry, std::vector<Entry>, decltype(worse)> heap(worse);

    MinimizingEnumerator walker(model, {}, limits);
    walker.run([&](std::uint64_t mask, double energy, Index) {
        if (heap.size() < k) {
            heap.push({energy, mask});
        } else if (worse(Entry{energy, mask}, heap.top())) {
            heap.pop();
            heap.push({energy, mask});
        }
    });

    std::vector<SampleRecord> records;
    records.reserve(heap.size());
    while (!heap.empty()) {
        auto bits = mask_to_bits(heap.top().mask, n);
        const double e = model.energy(bits);
        records.push_back({std::move(bits), e, 1});
        heap.pop();
    }
    return SampleSet::from_records(model, std::move(records), std::move(meta));
}

SampleRecord ground_state(const QuboModel& model, const EnumerationLimits& limits) {
    const Index n = model.num_variables();
    if (n > kMaxMaskVariables) throw RuntimeFailure("ground_state supports at most 64 variables");
    const auto leaves = independent_subset(model, std::vector<char>(n, 1));
    MinimizingEnumerator walker(model, leaves, limits);

    double best_energy = std::numeric_limits<double>::infinity();
    std::uint64_t best_mask = 0;
    walker.run([&](std::uint64_t, double energy, Index) {
        if (energy > best_energy + kEnergyTieTolerance) return;
        const std::uint64_t full = walker.completed_mask();
        if (energy < best_energy - kEnergyTieTolerance || mask_lex_less(full, best_mask)) {
            best_energy = energy;
            best_mask = full;
        }
    });
    auto bits = mask_to_bits(best_mask, n);
    const double e = model.energy(bits);
    return {std::move(bits), e, 1};
}

void for_each_minimized(const QuboModel& model, std::span<const Index> eliminated,
                        const std::function<void(std::uint64_t mask, double energy)>& visit,
                        const EnumerationLimits& limits) {
    MinimizingEnumerator walker(model, eliminated, limits);
    walker.run([&](std::uint64_t mask, double energy, Index) { visit(mask, energy); });
}

std::size_t GroupWeightTable::index(std::span<const std::size_t> weights) const {
    if (weights.size() != group_sizes.size()) throw InvalidArgument("weight vector has the wrong length");
    std::size_t idx = 0;
    std::size_t stride = 1;
    for (std::size_t g = 0; g < weights.size(); ++g) {
        if (weights[g] > group_sizes[g]) throw InvalidArgument("weight exceeds group size");
        idx += stride * weights[g];
        stride *= group_sizes[g] + 1;
    }
    return idx;
}

GroupWeightTable min_energy_by_group_weights(const QuboModel& model,
                                             std::span<const std::vector<Index>> groups,
                                             const EnumerationLimits& limits) {
    const Index n = model.num_variables();
    if (n > kMaxMaskVariables) throw RuntimeFailure("enumeration supports at most 64 variables");
    std::vector<int> group_of(n, -1);
    GroupWeightTable table;
    std::vector<std::size_t> stride;
    std::size_t cells = 1;
    for (std::size_t g = 0; g < groups.size(); ++g) {
        for (Index v : groups[g]) {
            if (v >= n) throw InvalidArgument("group variable out of range");
            if (group_of[v] != -1) throw InvalidArgument("groups must be disjoint");
            group_of[v] = static_cast<int>(g);
        }
        table.group_sizes.push_back(groups[g].size());
        stride.push_back(cells);
        cells *= groups[g].size() + 1;
    }
    table.values.assign(cells, std::numeric_limits<double>::infinity());

    std::vector<char> candidate(n);
    for (Index v = 0; v < n; ++v) candidate[v] = group_of[v] == -1;
    const auto leaves = independent_subset(model, std::move(candidate));
    MinimizingEnumerator walker(model, leaves, limits);

    std::size_t idx = 0;
    walker.run([&](std::uint64_t mask, double energy, Index flipped) {
        if (flipped != MinimizingEnumerator::npos && group_of[flipped] >= 0) {
            const bool on = (mask >> flipped) & 1U;
            const std::size_t s = stride[static_cast<std::size_t>(group_of[flipped])];
            idx = on ? idx + s : idx - s;
        }
        table.values[idx] = std::min(table.values[idx], energy);
    });
    return table;
}

std::vector<double> min_energy_by_hamming_weight(const QuboModel& model, std::span<const Index> vars,
                                                 const EnumerationLimits& limits) {
    const std::vector<std::vector<Index>> groups{std::vector<Index>(vars.begin(), vars.end())};
    return min_energy_by_group_weights(model, groups, limits).values;
}

namespace {

std::uint64_t binomial_capped(std::uint64_t n, std::uint64_t k, std::uint64_t cap) {
    k = std::min(k, n - k);
    unsigned __int128 r = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        r = r * (n - k + i) / i;
        if (r > cap) return cap + 1;
    }
    return static_cast<std::uint64_t>(r);
}

ObjectiveRange fixed_weight_extremes(const QuboModel& objective, Index weight,
                                     const EnumerationLimits& limits) {
    const auto m = detail::CompiledModel::from(objective);
    const Index n = m.n;
    if (binomial_capped(n, weight, limits.max_combinations) > limits.max_combinations) {
        throw RuntimeFailure("fixed-weight enumeration of C(" + std::to_string(n) + ", " +
                             std::to_string(weight) + ") subsets exceeds the cap");
    }
    // gain[v]: energy added by switching v on given the variables chosen so far.
    std::vector<double> gain(m.linear);
    ObjectiveRange r{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};

    auto dfs = [&](auto&& self, Index pos, Index remaining, double energy) -> void {
        if (remaining == 0) {
            r.f_min = std::min(r.f_min, energy);
            r.f_max = std::max(r.f_max, energy);
            return;
        }
        const double e_on = energy + gain[pos];
        for (std::size_t k = m.row_start[pos]; k < m.row_start[pos + 1]; ++k) gain[m.neighbor[k]] += m.weight[k];
        self(self, pos + 1, remaining - 1, e_on);
        for (std::size_t k = m.row_start[pos]; k < m.row_start[pos + 1]; ++k) gain[m.neighbor[k]] -= m.weight[k];
        if (n - pos - 1 >= remaining) self(self, pos + 1, remaining, energy);
    };
    dfs(dfs, 0, weight, m.offset);
    return r;
}

}  // namespace

ObjectiveRange extremal_objective_values(const ConstrainedProblem& problem, const EnumerationLimits& limits) {
    problem.validate();
    const Index n = problem.num_primary();

    if (problem.constraints.size() == 1 && problem.constraints[0].is_hamming_weight_equality()) {
        const auto& eq = std::get<LinearEquality>(problem.constraints[0].body);
        const double target = eq.value;
        if (eq.coeffs.size() == n) {
            if (target < 0.0 || target > static_cast<double>(n) || target != std::floor(target)) {
                throw RuntimeFailure("feasible set is empty");
            }
            return fixed_weight_extremes(problem.objective, static_cast<Index>(target), limits);
        }
    }

    if (n > limits.max_enumerated || n > kMaxMaskVariables) {
        throw RuntimeFailure("feasibility enumeration over " + std::to_string(n) +
                             " primary variables exceeds the cap of " + std::to_string(limits.max_enumerated));
    }
    // Incremental left-hand sides; incidence lists map each variable to the
    // constraints it appears in.
    const auto& cs = problem.constraints;
    std::vector<std::vector<std::pair<std::size_t, double>>> incidence(n);
    for (std::size_t c = 0; c < cs.size(); ++c) {
        if (const auto* pw = std::get_if<PairwiseExclusion>(&cs[c].body)) {
            incidence[pw->var_a].emplace_back(c, 1.0);
            incidence[pw->var_b].emplace_back(c, 1.0);
        } else {
            const auto& coeffs = std::holds_alternative<LinearEquality>(cs[c].body)
                                     ? std::get<LinearEquality>(cs[c].body).coeffs
                                     : std::get<LinearInequality>(cs[c].body).coeffs;
            for (const auto& [v, mu] : coeffs) incidence[v].emplace_back(c, mu);
        }
    }
    std::vector<double> lhs(cs.size(), 0.0);
    const BitAssignment zeros(n, 0);
    std::vector<char> ok(cs.size());
    std::size_t violated = 0;
    for (std::size_t c = 0; c < cs.size(); ++c) {
        ok[c] = cs[c].satisfied(zeros);
        violated += !ok[c];
    }
    auto satisfied = [&](std::size_t c) {
        const double s = lhs[c];
        constexpr double tol = 1e-9;
        return std::visit(
            [&](const auto& body) {
                using T = std::decay_t<decltype(body)>;
                if constexpr (std::is_same_v<T, LinearEquality>) return std::abs(s - body.value) <= tol;
                else if constexpr (std::is_same_v<T, LinearInequality>)
                    return s >= body.d_min - tol && s <= body.d_max + tol;
                else
                    return s <= 1.0;
            },
            cs[c].body);
    };

    ObjectiveRange r{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    std::uint64_t arg_min = 0, arg_max = 0;
    bool any = false;
    MinimizingEnumerator walker(problem.objective, {}, limits);
    walker.run([&](std::uint64_t mask, double energy, Index flipped) {
        if (flipped != MinimizingEnumerator::npos) {
            const double sign = ((mask >> flipped) & 1U) ? 1.0 : -1.0;
            for (const auto& [c, mu] : incidence[flipped]) {
                lhs[c] += sign * mu;
                const char now = satisfied(c);
                if (now != ok[c]) {
                    violated = now ? violated - 1 : violated + 1;
                    ok[c] = now;
                }
            }
        }
        if (violated == 0) {
            any = true;
            if (energy < r.f_min) {
                r.f_min = energy;
                arg_min = mask;
            }
            if (energy > r.f_max) {
                r.f_max = energy;
                arg_max = mask;
            }
        }
    });
    if (!any) throw RuntimeFailure("feasible set is empty");
    // Drop the walk's accumulated rounding.
    r.f_min = problem.objective.energy(mask_to_bits(arg_min, n));
    r.f_max = problem.objective.energy(mask_to_bits(arg_max, n));
    return r;
}

}  // namespace cqubo
