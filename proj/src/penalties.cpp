#include "cqubo/penalties.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <iterator>

#include "cqubo/error.hpp"

namespace cqubo {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double weighted_sum(const std::map<Index, double>& coeffs, std::span<const std::uint8_t> x) {
    double s = 0.0;
    for (const auto& [i, mu] : coeffs) s += mu * x[i];
    return s;
}

// Adds alpha2 * (sum_k w_k y_k - target)^2 for binary y, expanded with
// y_k^2 = y_k.
void add_squared_linear_form(QuboModel& model, const std::vector<std::pair<Index, double>>& terms,
                             double target, double alpha2) {
    for (std::size_t k = 0; k < terms.size(); ++k) {
        const auto [i, w] = terms[k];
        model.add_linear(i, alpha2 * (w * w - 2.0 * target * w));
        for (std::size_t l = k + 1; l < terms.size(); ++l) {
            const auto [j, v] = terms[l];
            model.add_quadratic(i, j, alpha2 * 2.0 * w * v);
        }
    }
    model.add_offset(alpha2 * target * target);
}

void require_positive(double alpha2) {
    if (!(alpha2 > 0.0)) throw InvalidArgument("quadratic penalty strength must be positive");
}

}  // namespace

double Constraint::lhs(std::span<const std::uint8_t> x) const {
    return std::visit(Overloaded{
                          [&](const LinearEquality& c) { return weighted_sum(c.coeffs, x); },
                          [&](const LinearInequality& c) { return weighted_sum(c.coeffs, x); },
                          [&](const PairwiseExclusion& c) {
                              return static_cast<double>(x[c.var_a] + x[c.var_b]);
                          },
                      },
                      body);
}

bool Constraint::satisfied(std::span<const std::uint8_t> x, double tol) const {
    const double s = lhs(x);
    return std::visit(Overloaded{
                          [&](const LinearEquality& c) { return std::abs(s - c.value) <= tol; },
                          [&](const LinearInequality& c) {
                              return s >= c.d_min - tol && s <= c.d_max + tol;
                          },
                          [&](const PairwiseExclusion&) { return s <= 1.0; },
                      },
                      body);
}

std::vector<Index> Constraint::variables() const {
    return std::visit(Overloaded{
                          [](const PairwiseExclusion& c) { return std::vector<Index>{c.var_a, c.var_b}; },
                          [](const auto& c) {
                              std::vector<Index> out;
                              for (const auto& [i, mu] : c.coeffs) out.push_back(i);
                              return out;
                          },
                      },
                      body);
}

bool Constraint::is_hamming_weight_equality() const {
    const auto* eq = std::get_if<LinearEquality>(&body);
    return eq && std::all_of(eq->coeffs.begin(), eq->coeffs.end(),
                             [](const auto& kv) { return kv.second == 1.0; });
}

const Constraint& ConstrainedProblem::constraint(std::string_view id) const {
    auto it = std::find_if(constraints.begin(), constraints.end(),
                           [&](const Constraint& c) { return c.id == id; });
    if (it == constraints.end()) throw InvalidArgument("unknown constraint id '" + std::string(id) + "'");
    return *it;
}

void ConstrainedProblem::validate() const {
    const Index n = objective.num_variables();
    for (const auto& c : constraints) {
        for (Index v : c.variables()) {
            if (v >= n) {
                throw InvalidArgument("constraint '" + c.id + "' references variable " +
                                      std::to_string(v) + " outside the problem");
            }
        }
        if (const auto* ineq = std::get_if<LinearInequality>(&c.body); ineq && ineq->d_min > ineq->d_max) {
            throw InvalidArgument("constraint '" + c.id + "' has d_min > d_max");
        }
        if (const auto* pw = std::get_if<PairwiseExclusion>(&c.body); pw && pw->var_a == pw->var_b) {
            throw InvalidArgument("constraint '" + c.id + "' pairs a variable with itself");
        }
    }
}

std::string_view to_string(PenaltyMethod m) {
    switch (m) {
        case PenaltyMethod::LinearIsing: return "linear";
        case PenaltyMethod::QuadraticEquality: return "quadratic";
        case PenaltyMethod::QuadraticSlack: return "slack";
        case PenaltyMethod::QuadraticPairwise: return "pairwise";
    }
    return "unknown";
}

PenaltyMethod parse_penalty_method(std::string_view name) {
    if (name == "linear") return PenaltyMethod::LinearIsing;
    if (name == "quadratic") return PenaltyMethod::QuadraticEquality;
    if (name == "slack") return PenaltyMethod::QuadraticSlack;
    if (name == "pairwise") return PenaltyMethod::QuadraticPairwise;
    throw InvalidArgument("unknown penalty method '" + std::string(name) + "'");
}

BitAssignment EncodedProblem::primary_part(std::span<const std::uint8_t> full) const {
    if (full.size() < original_n) throw InvalidArgument("assignment shorter than the primary variables");
    return BitAssignment(full.begin(), full.begin() + static_cast<std::ptrdiff_t>(original_n));
}

void apply_quadratic_equality(QuboModel& model, const LinearEquality& c, double alpha2) {
    require_positive(alpha2);
    std::vector<std::pair<Index, double>> terms(c.coeffs.begin(), c.coeffs.end());
    add_squared_linear_form(model, terms, c.value, alpha2);
}

void apply_quadratic_equality(IsingModel& model, const LinearEquality& c, double alpha2) {
    require_positive(alpha2);
    // With x = (1 - s)/2 the form is (M/2 - c) - (1/2) sum mu_i s_i, M = sum mu_i.
    double half_total = 0.0, sum_sq = 0.0;
    for (const auto& [i, mu] : c.coeffs) {
        half_total += mu;
        sum_sq += mu * mu;
    }
    const double shift = half_total / 2.0 - c.value;
    for (auto a = c.coeffs.begin(); a != c.coeffs.end(); ++a) {
        model.add_linear(a->first, -alpha2 * shift * a->second);
        for (auto b = std::next(a); b != c.coeffs.end(); ++b) {
            model.add_quadratic(a->first, b->first, alpha2 * a->second * b->second / 2.0);
        }
    }
    model.add_offset(alpha2 * (shift * shift + sum_sq / 4.0));
}

void apply_linear_ising(QuboModel& model, const LinearEquality& c, double alpha1) {
    for (const auto& [i, mu] : c.coeffs) {
        if (mu != 1.0) {
            throw InvalidArgument("linear Ising penalty needs unit coefficients (Hamming-weight equality)");
        }
    }
    if (alpha1 == 0.0) return;
    for (const auto& [i, mu] : c.coeffs) model.add_linear(i, alpha1);
    model.add_offset(-alpha1 * c.value);
}

void apply_quadratic_pairwise(QuboModel& model, const PairwiseExclusion& c, double alpha2) {
    require_positive(alpha2);
    if (c.var_a == c.var_b) throw InvalidArgument("pairwise exclusion needs two distinct variables");
    model.add_quadratic(c.var_a, c.var_b, alpha2);
}

void apply_quadratic_slack(EncodedProblem& problem, const std::string& constraint_id,
                           const LinearInequality& c, double alpha2) {
    require_positive(alpha2);
    for (const auto& [i, nu] : c.coeffs) {
        if (nu != 1.0) {
            throw InvalidArgument("slack encoding of '" + constraint_id + "' needs unit coefficients");
        }
    }
    const double range = c.d_max - c.d_min;
    const double span_count = range + 1.0;
    if (range < 0.0 || span_count != std::floor(span_count) ||
        !std::has_single_bit(static_cast<std::uint64_t>(span_count))) {
        throw InvalidArgument("slack encoding of '" + constraint_id +
                              "' needs d_max - d_min + 1 to be a power of two");
    }
    const int bits = std::countr_zero(static_cast<std::uint64_t>(span_count));

    std::vector<std::pair<Index, double>> terms(c.coeffs.begin(), c.coeffs.end());
    auto& registry = problem.slack_registry[constraint_id];
    for (int j = 0; j < bits; ++j) {
        const Index s = problem.model.add_variable();
        registry.push_back(s);
        terms.emplace_back(s, std::ldexp(1.0, j));
    }
    add_squared_linear_form(problem.model, terms, c.d_max, alpha2);
}

EncodedProblem encode(const ConstrainedProblem& problem, const PenaltyScheme& scheme) {
    problem.validate();
    EncodedProblem out{problem.objective, {}, problem.num_primary()};
    for (const auto& c : problem.constraints) {
        auto it = scheme.find(c.id);
        if (it == scheme.end()) throw InvalidArgument("scheme has no entry for constraint '" + c.id + "'");
        const auto [method, strength] = it->second;
        auto mismatch = [&] {
            return InvalidArgument("method '" + std::string(to_string(method)) +
                                   "' cannot encode constraint '" + c.id + "'");
        };
        std::visit(Overloaded{
                       [&](const LinearEquality& eq) {
                           if (method == PenaltyMethod::LinearIsing)
                               apply_linear_ising(out.model, eq, strength);
                           else if (method == PenaltyMethod::QuadraticEquality)
                               apply_quadratic_equality(out.model, eq, strength);
                           else
                               throw mismatch();
                       },
                       [&](const LinearInequality& ineq) {
                           if (method != PenaltyMethod::QuadraticSlack) throw mismatch();
                           apply_quadratic_slack(out, c.id, ineq, strength);
                       },
                       [&](const PairwiseExclusion& pw) {
                           if (method != PenaltyMethod::QuadraticPairwise) throw mismatch();
                           apply_quadratic_pairwise(out.model, pw, strength);
                       },
                   },
                   c.body);
    }
    return out;
}

PenaltyScheme expand_quarter_shorthand(std::string_view pattern, std::span<const std::string> c1_ids,
                                       std::span<const double> alpha1, double alpha2) {
    if (pattern.size() != c1_ids.size()) {
        throw InvalidArgument("scheme pattern '" + std::string(pattern) + "' has " +
                              std::to_string(pattern.size()) + " letters for " +
                              std::to_string(c1_ids.size()) + " constraints");
    }
    const auto linear_count = static_cast<std::size_t>(std::count(pattern.begin(), pattern.end(), 'L'));
    if (alpha1.size() != 1 && alpha1.size() != pattern.size() && alpha1.size() != linear_count &&
        linear_count > 0) {
        throw InvalidArgument("scheme pattern needs one linear strength or one per constraint");
    }
    PenaltyScheme scheme;
    std::size_t next_linear = 0;
    for (std::size_t q = 0; q < pattern.size(); ++q) {
        switch (pattern[q]) {
            case 'L': {
                double a;
                if (alpha1.size() == 1)
                    a = alpha1[0];
                else if (alpha1.size() == pattern.size())
                    a = alpha1[q];
                else
                    a = alpha1[next_linear];
                ++next_linear;
                scheme[c1_ids[q]] = {PenaltyMethod::LinearIsing, a};
                break;
            }
            case 'Q': scheme[c1_ids[q]] = {PenaltyMethod::QuadraticEquality, alpha2}; break;
            default:
                throw InvalidArgument("scheme pattern '" + std::string(pattern) + "' may only contain L and Q");
        }
    }
    return scheme;
}

}  // namespace cqubo
