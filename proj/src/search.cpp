#include "cqubo/search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>

#include "cqubo/error.hpp"
#include "cqubo/problems.hpp"

namespace cqubo {

void SearchConfig::validate() const {
    if (max_iterations_1 < 1 || max_iterations_2 < 1) throw InvalidArgument("iteration caps must be at least 1");
    if (!(initial_step > 0.0)) throw InvalidArgument("initial step must be positive");
    if (!(phase2_decay > 0.0 && phase2_decay < 1.0)) throw InvalidArgument("phase-2 decay must lie in (0, 1)");
    if (!(phase2_step_scale > 0.0)) throw InvalidArgument("phase-2 step scale must be positive");
    if (!(resolution > 0.0)) throw InvalidArgument("resolution must be positive");
}

namespace {

std::vector<std::size_t> call_checked(const SolverCallback& solver, std::span<const double> strengths) {
    auto w = solver(strengths);
    if (w.size() != strengths.size()) {
        throw RuntimeFailure("solver callback returned " + std::to_string(w.size()) + " weights for " +
                             std::to_string(strengths.size()) + " strengths");
    }
    return w;
}

std::size_t single_weight(const SolverCallback& solver, double alpha, std::vector<SearchStep>* trace,
                          int phase, double step) {
    const std::vector<double> s{alpha};
    auto w = call_checked(solver, s);
    if (trace) trace->push_back({phase, s, w, step});
    return w[0];
}

const LinearEquality& only_hamming_constraint(const ConstrainedProblem& problem) {
    if (problem.constraints.size() != 1 || !problem.constraints[0].is_hamming_weight_equality()) {
        throw InvalidArgument("single-constraint search needs exactly one Hamming-weight equality");
    }
    return std::get<LinearEquality>(problem.constraints[0].body);
}

std::size_t integral_target(double value) {
    if (value < 0.0 || value != std::floor(value)) throw InvalidArgument("Hamming-weight target must be a non-negative integer");
    return static_cast<std::size_t>(value);
}

}  // namespace

SearchOutcome single_constraint_search(const SolverCallback& solver, const SearchConfig& cfg) {
    cfg.validate();
    SearchOutcome out;
    const std::size_t A = cfg.target;
    double alpha = cfg.initial_strength;
    double step = cfg.initial_step;
    std::optional<double> too_low;   // weight above target
    std::optional<double> too_high;  // weight below target
    std::size_t expansions = 0;
    std::size_t bisections = 0;

    while (true) {
        const int phase = (too_low && too_high) ? 2 : 1;
        const std::size_t w = single_weight(solver, alpha, &out.trace, phase, step);
        ++out.iterations_used;
        if (w == A) {
            out.status = SearchStatus::Converged;
            out.strengths = {alpha};
            return out;
        }
        (w < A ? too_high : too_low) = alpha;
        if (too_low && too_high) {
            if (*too_high - *too_low <= cfg.resolution || bisections >= cfg.max_iterations_2) break;
            alpha = 0.5 * (*too_low + *too_high);
            ++bisections;
        } else {
            if (expansions >= cfg.max_iterations_1) break;
            alpha = w < A ? alpha - step : alpha + step;
            step *= 2.0;
            ++expansions;
        }
    }
    out.status = SearchStatus::Failed;
    return out;
}

SearchOutcome single_constraint_search(const ConstrainedProblem& problem, const SolverCallback& solver,
                                       SearchConfig cfg) {
    cfg.target = integral_target(only_hamming_constraint(problem).value);
    return single_constraint_search(solver, cfg);
}

std::optional<FeasibleWindow> alpha1_feasible_window(const SolverCallback& solver, const SearchConfig& cfg,
                                                     double resolution) {
    SearchConfig c = cfg;
    c.resolution = resolution;
    const auto found = single_constraint_search(solver, c);
    if (!found.converged()) return std::nullopt;
    const std::size_t A = c.target;
    const double inside = found.strengths[0];

    // Nearest known strengths with the wrong weight on either side.
    std::optional<double> below, above;
    for (const auto& s : found.trace) {
        const double a = s.strengths[0];
        if (s.weights[0] > A && (!below || a > *below)) below = a;
        if (s.weights[0] < A && (!above || a < *above)) above = a;
    }

    const double inf = std::numeric_limits<double>::infinity();
    auto edge = [&](std::optional<double> outer, double direction) -> std::pair<double, double> {
        double in = inside;
        if (!outer) {
            double step = c.initial_step;
            for (std::size_t k = 0; k < c.max_iterations_1 + 40 && !outer; ++k) {
                const double probe = inside + direction * step;
                if (single_weight(solver, probe, nullptr, 0, step) == A)
                    in = probe;
                else
                    outer = probe;
                step *= 2.0;
            }
            if (!outer) return {in, direction * inf};
        }
        double out_pt = *outer;
        while (std::abs(out_pt - in) > resolution) {
            const double mid = 0.5 * (in + out_pt);
            if (single_weight(solver, mid, nullptr, 0, 0.0) == A)
                in = mid;
            else
                out_pt = mid;
        }
        return {in, out_pt};
    };

    FeasibleWindow win;
    std::tie(win.lower, win.outer_lower) = edge(below, -1.0);
    std::tie(win.upper, win.outer_upper) = edge(above, +1.0);
    return win;
}

std::optional<HullInterval> hull_alpha1_interval(std::span<const double> emin, std::size_t A, double tol) {
    if (A >= emin.size() || !std::isfinite(emin[A])) return std::nullopt;
    const double inf = std::numeric_limits<double>::infinity();
    HullInterval h{-inf, inf};
    for (std::size_t k = 0; k < emin.size(); ++k) {
        if (k == A || !std::isfinite(emin[k])) continue;
        if (k < A) {
            h.upper = std::min(h.upper, (emin[k] - emin[A]) / static_cast<double>(A - k));
        } else {
            h.lower = std::max(h.lower, (emin[A] - emin[k]) / static_cast<double>(k - A));
        }
    }
    if (!(h.upper - h.lower > tol)) return std::nullopt;
    return h;
}

bool hull_feasibility_oracle(std::span<const double> emin, std::size_t A, double tol) {
    return hull_alpha1_interval(emin, A, tol).has_value();
}

SearchOutcome multi_constraint_search(std::size_t g, const SolverCallback& solver, const SearchConfig& cfg) {
    cfg.validate();
    if (g == 0) throw InvalidArgument("multi-constraint search needs at least one constraint");
    SearchOutcome out;
    const std::size_t A = cfg.target;
    const std::vector<std::size_t> target(g, A);

    std::vector<double> strengths(g, cfg.initial_strength);
    std::vector<double> previous(g, 0.0);
    double step = cfg.initial_step;
    std::optional<double> high, low;
    std::vector<std::size_t> weights;

    auto shift_all = [&](double delta) {
        previous = strengths;
        for (auto& s : strengths) s += delta;
    };
    auto bisect_all = [&] {
        previous = strengths;
        std::fill(strengths.begin(), strengths.end(), 0.5 * (*low + *high));
    };

    bool average_converged = false;
    for (std::size_t it = 0; !average_converged && it < cfg.max_iterations_1; ++it) {
        weights = call_checked(solver, strengths);
        out.trace.push_back({1, strengths, weights, step});
        ++out.iterations_used;
        // Mean compared against A as an integer sum.
        const std::size_t total = std::accumulate(weights.begin(), weights.end(), std::size_t{0});
        if (total < g * A) {
            high = strengths[0];
            if (!low)
                shift_all(-step);
            else
                bisect_all();
        } else if (total > g * A) {
            low = strengths[0];
            if (!high)
                shift_all(step);
            else
                bisect_all();
        } else {
            average_converged = true;
        }
    }
    if (weights == target) {
        out.status = SearchStatus::Converged;
        out.strengths = strengths;
        return out;
    }

    step *= cfg.phase2_step_scale;
    bool converged_all = false;
    for (std::size_t it = 0; !converged_all && it < cfg.max_iterations_2; ++it) {
        weights = call_checked(solver, strengths);
        out.trace.push_back({2, strengths, weights, step});
        ++out.iterations_used;
        converged_all = true;
        for (std::size_t q = 0; q < g; ++q) {
            if (weights[q] == A) continue;
            converged_all = false;
            double next;
            if (weights[q] < A) {
                next = strengths[q] > previous[q] ? 0.5 * (previous[q] + strengths[q]) : strengths[q] - step;
            } else {
                next = strengths[q] < previous[q] ? 0.5 * (previous[q] + strengths[q]) : strengths[q] + step;
            }
            previous[q] = strengths[q];
            strengths[q] = next;
        }
        step *= cfg.phase2_decay;
    }
    out.status = converged_all ? SearchStatus::Converged : SearchStatus::Failed;
    if (converged_all) out.strengths = strengths;
    return out;
}

SearchOutcome tied_constraint_search(std::size_t g, const SolverCallback& solver, const SearchConfig& cfg) {
    cfg.validate();
    if (g == 0) throw InvalidArgument("tied search needs at least one constraint");
    SearchOutcome out;
    const std::size_t A = cfg.target;
    double strength = cfg.initial_strength;
    double previous = 0.0;
    double step = cfg.initial_step;
    std::optional<double> high, low;

    auto call = [&](int phase) {
        const std::vector<double> s(g, strength);
        auto w = call_checked(solver, s);
        out.trace.push_back({phase, s, w, step});
        ++out.iterations_used;
        return w;
    };
    auto all_on_target = [&](const std::vector<std::size_t>& w) {
        return std::all_of(w.begin(), w.end(), [&](std::size_t x) { return x == A; });
    };
    auto total_of = [](const std::vector<std::size_t>& w) {
        return std::accumulate(w.begin(), w.end(), std::size_t{0});
    };

    for (std::size_t it = 0; it < cfg.max_iterations_1; ++it) {
        const auto w = call(1);
        const std::size_t total = total_of(w);
        if (total == g * A) {
            if (all_on_target(w)) {
                out.status = SearchStatus::Converged;
                out.strengths.assign(g, strength);
            }
            return out;
        }
        previous = strength;
        if (total < g * A) {
            high = strength;
            strength = low ? 0.5 * (*low + *high) : strength - step;
        } else {
            low = strength;
            strength = high ? 0.5 * (*low + *high) : strength + step;
        }
    }

    step *= cfg.phase2_step_scale;
    for (std::size_t it = 0; it < cfg.max_iterations_2; ++it) {
        const auto w = call(2);
        const std::size_t total = total_of(w);
        if (total == g * A) {
            if (all_on_target(w)) {
                out.status = SearchStatus::Converged;
                out.strengths.assign(g, strength);
            }
            return out;
        }
        double next;
        if (total < g * A)
            next = strength > previous ? 0.5 * (previous + strength) : strength - step;
        else
            next = strength < previous ? 0.5 * (previous + strength) : strength + step;
        previous = strength;
        strength = next;
        step *= cfg.phase2_decay;
    }
    return out;
}

SearchOutcome four_quarter_search(const ConstrainedProblem& problem, const SolverCallback& solver,
                                  SearchConfig cfg) {
    const auto ids = c1_constraint_ids(problem);
    if (ids.size() != static_cast<std::size_t>(kQuarters)) {
        throw InvalidArgument("four-quarter search needs four C1 constraints");
    }
    std::optional<std::size_t> target;
    for (const auto& id : ids) {
        const auto& c = problem.constraint(id);
        if (!c.is_hamming_weight_equality()) throw InvalidArgument("C1 constraint '" + id + "' is not a Hamming-weight equality");
        const std::size_t t = integral_target(std::get<LinearEquality>(c.body).value);
        if (target && *target != t) throw InvalidArgument("C1 constraints must share one target");
        target = t;
    }
    cfg.target = *target;
    return multi_constraint_search(ids.size(), solver, cfg);
}

SearchOutcome mixed_scheme_search(std::string_view pattern, const SolverCallback& solver,
                                  const SearchConfig& cfg, bool tie_linear_strengths) {
    cfg.validate();
    if (pattern.find_first_not_of("LQ") != std::string_view::npos) {
        throw InvalidArgument("scheme pattern '" + std::string(pattern) + "' may only contain L and Q");
    }
    const auto linear = static_cast<std::size_t>(std::count(pattern.begin(), pattern.end(), 'L'));
    if (linear == 0) {
        SearchOutcome out;
        out.status = SearchStatus::Converged;
        return out;
    }
    return tie_linear_strengths ? tied_constraint_search(linear, solver, cfg)
                                : multi_constraint_search(linear, solver, cfg);
}

std::size_t hamming_weight(const Constraint& c, std::span<const std::uint8_t> x) {
    std::size_t w = 0;
    for (Index v : c.variables()) w += x[v];
    return w;
}

namespace {

struct LinearizedProblem {
    ConstrainedProblem problem;
    PenaltyScheme base;
    std::vector<std::string> linear_ids;
    std::vector<const Constraint*> linear_constraints;

    LinearizedProblem(ConstrainedProblem p, PenaltyScheme b, std::vector<std::string> ids)
        : problem(std::move(p)), base(std::move(b)), linear_ids(std::move(ids)) {
        for (const auto& id : linear_ids) {
            const auto& c = problem.constraint(id);
            if (!c.is_hamming_weight_equality()) {
                throw InvalidArgument("constraint '" + id + "' is not a Hamming-weight equality");
            }
            linear_constraints.push_back(&c);
        }
    }

    QuboModel model_for(std::span<const double> strengths) const {
        if (strengths.size() != linear_ids.size()) throw InvalidArgument("wrong number of strengths");
        PenaltyScheme s = base;
        for (std::size_t k = 0; k < linear_ids.size(); ++k) s[linear_ids[k]] = {PenaltyMethod::LinearIsing, strengths[k]};
        return encode(problem, s).model;
    }

    std::vector<std::size_t> weights(std::span<const std::uint8_t> x) const {
        std::vector<std::size_t> w;
        for (const auto* c : linear_constraints) w.push_back(hamming_weight(*c, x));
        return w;
    }
};

}  // namespace

SolverCallback make_exact_callback(ConstrainedProblem problem, PenaltyScheme base,
                                   std::vector<std::string> linear_ids, EnumerationLimits limits) {
    auto lp = std::make_shared<const LinearizedProblem>(std::move(problem), std::move(base), std::move(linear_ids));
    return [lp, limits](std::span<const double> strengths) {
        const auto gs = ground_state(lp->model_for(strengths), limits);
        return lp->weights(gs.assignment);
    };
}

SolverCallback make_sa_callback(ConstrainedProblem problem, PenaltyScheme base,
                                std::vector<std::string> linear_ids, SaConfig cfg) {
    auto lp = std::make_shared<const LinearizedProblem>(std::move(problem), std::move(base), std::move(linear_ids));
    return [lp, cfg](std::span<const double> strengths) {
        const auto samples = simulated_annealing(lp->model_for(strengths), cfg);
        return lp->weights(samples.best().assignment);
    };
}

}  // namespace cqubo
