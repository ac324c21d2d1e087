// Acceptance checks AC1-AC9. Prints one PASS/FAIL line per check; exit status
// is nonzero if any check fails. Pass check names (e.g. AC3 AC7) to run a
// subset.

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cqubo/metrics.hpp"
#include "cqubo/model.hpp"
#include "cqubo/penalties.hpp"
#include "cqubo/problems.hpp"
#include "cqubo/search.hpp"
#include "cqubo/solvers.hpp"
#include "lp_oracle.hpp"
#include "oracles.hpp"

using namespace cqubo;

namespace {

struct Verdict {
    bool pass = false;
    std::string detail;
};

double round_sig(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*e", digits - 1, v);
    return std::stod(buf);
}

std::string fmt(double v, int prec = 4) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    return buf;
}

PenaltyScheme four_quarter_scheme(const ConstrainedProblem& p, std::string_view pattern,
                                  std::span<const double> alpha1, double c1, double c2, double c3) {
    const auto ids = c1_constraint_ids(p);
    auto s = expand_quarter_shorthand(pattern, ids, alpha1, c1);
    for (const auto& c : p.constraints) {
        if (c.id.rfind("C2-", 0) == 0) s[c.id] = {PenaltyMethod::QuadraticSlack, c2};
        if (c.id.rfind("C3-", 0) == 0) s[c.id] = {PenaltyMethod::QuadraticPairwise, c3};
    }
    return s;
}

// ---------------------------------------------------------------------------

Verdict ac1() {
    const auto a = sign_test_p(741, 592);
    const auto b = sign_test_p(179, 267);
    const bool ok = round_sig(a.p, 2) == 2.5e-5 && round_sig(b.p_tilde, 2) == 1.2e-5;
    return {ok, "p(741,592)=" + fmt(a.p, 3) + " p~(179,267)=" + fmt(b.p_tilde, 3)};
}

Verdict ac2() {
    const Index n = 100, A = 50;
    LinearEquality c;
    for (Index i = 0; i < n; ++i) c.coeffs[i] = 1.0;
    c.value = static_cast<double>(A);
    std::size_t bad = 0;
    double encoded_gap = 0.0;
    for (double alpha2 : {1.2, 1.0, 0.5, 2.4}) {
        IsingModel spin(n);
        apply_quadratic_equality(spin, c, alpha2);
        if (spin.quadratic_terms().size() != n * (n - 1) / 2) ++bad;
        for (Index i = 0; i < n; ++i) {
            if (spin.linear(i) != 0.0) ++bad;
            for (Index j = i + 1; j < n; ++j)
                if (spin.quadratic(i, j) != alpha2 / 2.0) ++bad;
        }
        // The QUBO encoding of the same constraint, converted, carries only rounding.
        ConstrainedProblem p;
        p.objective = QuboModel(n);
        p.constraints.push_back({"C1", c});
        const auto enc = qubo_to_ising(encode(p, {{"C1", {PenaltyMethod::QuadraticEquality, alpha2}}}).model);
        for (Index i = 0; i < n; ++i) {
            encoded_gap = std::max(encoded_gap, std::abs(enc.linear(i)));
            for (Index j = i + 1; j < n; ++j)
                encoded_gap = std::max(encoded_gap, std::abs(enc.quadratic(i, j) - alpha2 / 2.0));
        }
    }
    return {bad == 0 && encoded_gap <= 1e-12,
            std::to_string(bad) + " inexact spin-form coefficients over 4 strengths; QUBO-encoded path within " +
                fmt(encoded_gap, 3)};
}

Verdict ac3() {
    const std::size_t count = 200;
    double sum = 0.0;
    for (std::size_t k = 0; k < count; ++k) {
        const auto c = generate_c_matrix({100, 3, k});
        const auto p = build_single_quarter({c, 50});
        const auto quad = encode(p, {{"C1", {PenaltyMethod::QuadraticEquality, 1.2}}});
        const auto lin = encode(p, {{"C1", {PenaltyMethod::LinearIsing, -1.0}}});
        const double jq = dynamic_range(qubo_to_ising(quad.model)).max_abs_J;
        const double jl = dynamic_range(qubo_to_ising(lin.model)).max_abs_J;
        sum += jq / jl;
    }
    const double mean = sum / static_cast<double>(count);
    return {std::abs(mean - 2.21) <= 0.05, "mean max|J| ratio " + fmt(mean) + " over 200 instances (2.21 +- 0.05)"};
}

Verdict ac4() {
    std::mt19937_64 g(20240601);
    std::uniform_int_distribution<std::size_t> size(1, 12);
    double worst_energy = 0.0, worst_trip = 0.0;
    for (int t = 0; t < 1000; ++t) {
        const std::size_t n = size(g);
        const auto q = oracle::random_qubo(g, n, -3.0, 3.0, 0.7);
        const auto ising = qubo_to_ising(q);
        const auto dq = oracle::dense(q);
        const auto di = oracle::dense(ising);
        oracle::enumerate_bits(n, [&](const oracle::Bits& x) {
            std::vector<int> s(n);
            for (std::size_t i = 0; i < n; ++i) s[i] = 1 - 2 * x[i];
            worst_energy = std::max(worst_energy, std::abs(oracle::naive_energy(dq, x) - oracle::naive_energy(di, s)));
            worst_energy = std::max(worst_energy, std::abs(q.energy(x) - ising.energy(to_spins(x))));
        });
        const auto back = ising_to_qubo(ising);
        const auto db = oracle::dense(back);
        worst_trip = std::max(worst_trip, std::abs(db.offset - dq.offset));
        for (std::size_t i = 0; i < n; ++i) {
            worst_trip = std::max(worst_trip, std::abs(db.lin[i] - dq.lin[i]));
            for (std::size_t j = i + 1; j < n; ++j) worst_trip = std::max(worst_trip, std::abs(db.quad[i][j] - dq.quad[i][j]));
        }
    }
    return {worst_energy <= 1e-9 && worst_trip <= 1e-12,
            "max energy gap " + fmt(worst_energy, 3) + ", max round-trip gap " + fmt(worst_trip, 3)};
}

// Every assignment of the penalty-only model, via Gray code with incremental
// local fields; min over slack bits recorded per primary mask.
std::vector<double> min_over_slack(const QuboModel& m, std::size_t n_primary) {
    const std::size_t n = m.num_variables();
    const auto d = oracle::dense(m);
    std::vector<std::vector<double>> w(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) w[i][j] = w[j][i] = d.quad[i][j];
    std::vector<double> field(d.lin);
    std::vector<std::uint8_t> x(n, 0);
    std::vector<double> best(std::size_t{1} << n_primary, INFINITY);
    double e = d.offset;
    std::uint64_t primary = 0;
    best[0] = e;
    for (std::uint64_t step = 1; step < (std::uint64_t{1} << n); ++step) {
        const auto i = static_cast<std::size_t>(std::countr_zero(step));
        const double sign = x[i] ? -1.0 : 1.0;
        e += sign * field[i];
        x[i] ^= 1;
        for (std::size_t j = 0; j < n; ++j) field[j] += sign * w[i][j];
        if (i < n_primary) primary ^= std::uint64_t{1} << i;
        best[primary] = std::min(best[primary], e);
    }
    return best;
}

Verdict ac5() {
    const Index n_p = 4;
    std::mt19937_64 g(7);
    std::size_t bad = 0, feasible_seen = 0, infeasible_seen = 0;
    double worst_feasible = 0.0, least_infeasible = INFINITY;
    for (std::uint64_t k = 0; k < 100; ++k) {
        const Index A = 1 + k % 2;
        const Index mc = 1 + k % 3;
        const auto c = generate_c_matrix({n_p, mc, 1000 + k});
        auto p = build_four_quarter({c, A, 1, 2, {1.5, 1.0, 1.0, 1.5}});
        p.objective = QuboModel(p.objective.num_variables());
        std::uniform_real_distribution<double> u(0.3, 3.0);
        const double strengths[] = {0.0};
        const auto scheme = four_quarter_scheme(p, "QQQQ", strengths, u(g), u(g), u(g));
        const auto enc = encode(p, scheme);
        const auto table = min_over_slack(enc.model, 4 * n_p);
        for (std::uint64_t mask = 0; mask < table.size(); ++mask) {
            oracle::Bits x(4 * n_p);
            for (std::size_t i = 0; i < x.size(); ++i) x[i] = (mask >> i) & 1U;
            if (oracle::four_quarter_feasible(x, n_p, A, 1, 2)) {
                ++feasible_seen;
                worst_feasible = std::max(worst_feasible, std::abs(table[mask]));
                if (std::abs(table[mask]) > 1e-9) ++bad;
            } else {
                ++infeasible_seen;
                least_infeasible = std::min(least_infeasible, table[mask]);
                if (!(table[mask] > 1e-9)) ++bad;
            }
        }
    }
    return {bad == 0 && feasible_seen > 0,
            std::to_string(feasible_seen) + " feasible (max |E| " + fmt(worst_feasible, 3) + "), " +
                std::to_string(infeasible_seen) + " infeasible (min E " + fmt(least_infeasible, 3) + "), " +
                std::to_string(bad) + " violations"};
}

struct HullRun {
    std::size_t non_monotone = 0, disagree = 0, hull_true = 0;
};

// mixed = false: A = n/2 throughout. mixed = true: lower targets and sparser
// matrices, which brings in hull-infeasible instances.
HullRun hull_population(bool mixed) {
    HullRun run;
    std::vector<double> grid;
    for (int k = 0; k < 50; ++k) grid.push_back(-6.0 + 8.0 * k / 49.0);
    for (std::uint64_t k = 0; k < 200; ++k) {
        const Index n = 8 + k % 7;
        const Index A = mixed ? n / 2 - (k / 7) % 3 : n / 2;
        const Index mc = mixed ? 2 + (k / 21) % 3 : 3;
        const auto c = generate_c_matrix({n, mc, (mixed ? 6000 : 5000) + k});
        const auto p = build_single_quarter({c, A});

        const auto d = oracle::dense(p.objective);
        std::vector<double> emin(n + 1, INFINITY);
        oracle::enumerate_bits(n, [&](const oracle::Bits& x) {
            const auto w = oracle::weight(x, 0, n);
            emin[w] = std::min(emin[w], oracle::naive_energy(d, x));
        });
        const bool hull = hull_feasibility_oracle(emin, A);
        run.hull_true += hull;

        std::size_t prev = n + 1;
        for (double a1 : grid) {
            const auto enc = encode(p, {{"C1", {PenaltyMethod::LinearIsing, a1}}});
            const auto gs = ground_state(enc.model);
            const std::size_t w = static_cast<std::size_t>(std::count(gs.assignment.begin(), gs.assignment.end(), 1));
            if (w > prev) ++run.non_monotone;
            prev = w;
        }
        SearchConfig cfg;
        cfg.resolution = 1e-9;
        const auto cb = make_exact_callback(p, {{"C1", {PenaltyMethod::LinearIsing, 0.0}}}, {"C1"});
        if (single_constraint_search(p, cb, cfg).converged() != hull) ++run.disagree;
    }
    return run;
}

Verdict ac6() {
    const auto half = hull_population(false);
    const auto mixed = hull_population(true);
    const bool ok = half.non_monotone + mixed.non_monotone == 0 && half.disagree + mixed.disagree == 0 &&
                    mixed.hull_true > 0 && mixed.hull_true < 200;
    return {ok, "A=n/2: " + std::to_string(half.hull_true) + "/200 hull-feasible, " +
                    std::to_string(half.disagree) + " disagreements; mixed A: " + std::to_string(mixed.hull_true) +
                    "/200 hull-feasible, " + std::to_string(mixed.disagree) + " disagreements; " +
                    std::to_string(half.non_monotone + mixed.non_monotone) + " monotonicity breaks"};
}

// E[k1..k4] for the four-quarter problem with C2/C3 quadratic and C1 left
// out, from the written-out objective and penalties.
std::vector<double> four_quarter_weight_table(const CannibalizationMatrix& c, Index n_p, const std::array<double, 4>& lambda,
                                              double c2, double c3) {
    const std::size_t nv = 4 * n_p;
    const std::size_t side = n_p + 1;
    std::vector<double> table(side * side * side * side, INFINITY);
    oracle::Bits x(nv);
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << nv); ++mask) {
        for (std::size_t i = 0; i < nv; ++i) x[i] = (mask >> i) & 1U;
        double e = oracle::four_quarter_objective(c, lambda, x);
        for (Index i = 0; i < n_p; ++i) {
            int promos = 0;
            for (int q = 0; q < 4; ++q) promos += x[q * n_p + i];
            // Slack s in {0, 1} absorbs the one unit between B_min = 1 and B_max = 2.
            const double r0 = promos - 2.0, r1 = promos - 1.0;
            e += c2 * std::min(r0 * r0, r1 * r1);
            for (int q = 0; q + 1 < 4; ++q) e += c3 * x[q * n_p + i] * x[(q + 1) * n_p + i];
        }
        std::size_t idx = 0, stride = 1;
        for (int q = 0; q < 4; ++q) {
            idx += oracle::weight(x, q * n_p, n_p) * stride;
            stride *= side;
        }
        table[idx] = std::min(table[idx], e);
    }
    return table;
}

// True iff some alpha in R^4 makes (A, A, A, A) the unique minimizer of
// E[k] + alpha . (k - A) over the table: max margin t of the LP is positive.
bool all_linear_constrainable(const std::vector<double>& table, Index n_p, Index A) {
    const std::size_t side = n_p + 1;
    const double M = 50.0;
    std::size_t target = 0, stride = 1;
    for (int q = 0; q < 4; ++q) {
        target += A * stride;
        stride *= side;
    }
    double spread = 0.0;
    for (double v : table) spread = std::max(spread, std::abs(v - table[target]));
    const double T0 = M * 4.0 * static_cast<double>(side) + spread + 1.0;
    // y = (u_1..u_4, w) with alpha_q = u_q - M and t = w - T0.
    std::vector<std::vector<double>> rows;
    std::vector<double> rhs;
    for (std::size_t idx = 0; idx < table.size(); ++idx) {
        if (idx == target) continue;
        std::array<double, 4> d{};
        std::size_t rest = idx;
        double sum_d = 0.0;
        for (int q = 0; q < 4; ++q) {
            d[q] = static_cast<double>(rest % side) - static_cast<double>(A);
            rest /= side;
            sum_d += d[q];
        }
        rows.push_back({-d[0], -d[1], -d[2], -d[3], 1.0});
        rhs.push_back(table[idx] - table[target] + T0 - M * sum_d);
    }
    for (int q = 0; q < 4; ++q) {
        std::vector<double> r(5, 0.0);
        r[q] = 1.0;
        rows.push_back(r);
        rhs.push_back(2.0 * M);
    }
    rows.push_back({0, 0, 0, 0, 1.0});
    rhs.push_back(T0 + 1.0);
    const auto res = oracle::simplex_max(rows, rhs, {0, 0, 0, 0, 1.0});
    return res.bounded && res.value - T0 > 1e-7;
}

Verdict ac7() {
    const Index n_p = 5, A = 2;
    const std::array<double, 4> lambda{1.5, 1.0, 1.0, 1.5};
    std::size_t scanned = 0, selected = 0, converged = 0, iterations = 0;
    for (std::uint64_t seed = 0; selected < 50 && seed < 2000; ++seed) {
        ++scanned;
        const auto c = generate_c_matrix({n_p, 2, seed});
        const auto table = four_quarter_weight_table(c, n_p, lambda, 0.6, 1.2);
        if (!all_linear_constrainable(table, n_p, A)) continue;
        ++selected;
        const auto p = build_four_quarter({c, A, 1, 2, lambda});
        const double zero[] = {0.0};
        const auto base = four_quarter_scheme(p, "LLLL", zero, 2.4, 0.6, 1.2);
        const auto cb = make_exact_callback(p, base, c1_constraint_ids(p));
        const auto out = four_quarter_search(p, cb, SearchConfig{});
        if (out.converged()) ++converged;
        iterations += out.iterations_used;
    }
    const double mean = selected ? static_cast<double>(iterations) / static_cast<double>(selected) : INFINITY;
    return {selected == 50 && converged == selected && mean <= 30.0,
            std::to_string(converged) + "/" + std::to_string(selected) + " converged (" + std::to_string(scanned) +
                " scanned), mean iterations " + fmt(mean)};
}

Verdict ac8() {
    const Index n = 30, A = 15;
    std::vector<CalibrationInstance> insts;
    for (std::uint64_t k = 0; k < 50; ++k) {
        CalibrationInstance ci;
        ci.id = instance_id(n, k);
        ci.problem = build_single_quarter({generate_c_matrix({n, 3, 9000 + k}), A});
        ci.range = extremal_objective_values(ci.problem);
        insts.push_back(std::move(ci));
    }
    std::vector<double> grid;
    for (int k = 1; k <= 15; ++k) grid.push_back(0.2 * k);
    SaConfig sa;
    sa.num_reads = 200;
    sa.sweeps_per_read = 500;
    sa.seed = 11;
    const auto table = calibration_sweep(
        insts, grid,
        [](const ConstrainedProblem&, double a2) {
            return PenaltyScheme{{"C1", {PenaltyMethod::QuadraticEquality, a2}}};
        },
        sa);
    bool f_ok = true;
    for (std::size_t g = 0; g + 1 < grid.size(); ++g) {
        const auto& a = table.points[g].F;
        const auto& b = table.points[g + 1].F;
        if (b.mean < a.mean - std::max(0.01, 2.0 * (a.sem + b.sem))) f_ok = false;
    }
    const auto& last = table.points.back().F;
    const auto& before_last = table.points[grid.size() - 3].F;
    const bool plateau = std::abs(last.mean - before_last.mean) <= std::max(0.02, 2.0 * (last.sem + before_last.sem));
    std::size_t peak = 0;
    for (std::size_t g = 1; g < grid.size(); ++g)
        if (table.points[g].s_ratio.mean > table.points[peak].s_ratio.mean) peak = g;
    const auto& top = table.points[peak].s_ratio;
    const auto& lo = table.points.front().s_ratio;
    const auto& hi = table.points.back().s_ratio;
    const bool interior = peak > 0 && peak + 1 < grid.size() && top.mean - lo.mean > 2.0 * (top.sem + lo.sem) &&
                          top.mean - hi.mean > 2.0 * (top.sem + hi.sem);
    std::ostringstream d;
    d << "F " << fmt(table.points.front().F.mean, 3) << " -> " << fmt(last.mean, 3) << (f_ok ? " non-decreasing" : " DECREASES")
      << (plateau ? ", plateau" : ", no plateau") << "; S/S_max peak " << fmt(top.mean, 3) << " at alpha2=" << fmt(grid[peak], 3)
      << " (ends " << fmt(lo.mean, 3) << ", " << fmt(hi.mean, 3) << "); " << table.excluded_ids.size() << " excluded";
    return {f_ok && plateau && interior, d.str()};
}

std::set<Pair> coupling_keys(const QuboModel& m) {
    std::set<Pair> keys;
    for (const auto& [k, v] : m.quadratic_terms()) keys.insert(k);
    return keys;
}

Verdict ac9() {
    std::size_t cases = 0, key_mismatch = 0, below_min = 0;
    std::mt19937_64 g(99);
    std::uniform_real_distribution<double> a1(-2.0, 0.0), a2(0.5, 3.0);
    auto check = [&](const ConstrainedProblem& p, const PenaltyScheme& scheme, std::uint64_t seed) {
        ++cases;
        ConstrainedProblem reduced;
        reduced.objective = p.objective;
        PenaltyScheme rest;
        for (const auto& c : p.constraints) {
            if (scheme.at(c.id).method == PenaltyMethod::LinearIsing) continue;
            reduced.constraints.push_back(c);
            rest[c.id] = scheme.at(c.id);
        }
        const auto full = encode(p, scheme);
        if (coupling_keys(full.model) != coupling_keys(encode(reduced, rest).model)) ++key_mismatch;
        const double floor = brute_force(full.model, 1).best().energy;
        SaConfig sa;
        sa.num_reads = 100;
        sa.sweeps_per_read = 100;
        sa.seed = seed;
        const auto samples = simulated_annealing(full.model, sa);
        for (const auto& r : samples.records())
            if (r.energy < floor - 1e-9 || full.model.energy(r.assignment) < floor - 1e-9) ++below_min;
    };
    for (std::uint64_t k = 0; k < 10; ++k) {
        const auto p = build_single_quarter({generate_c_matrix({12, 3, 300 + k}), 6});
        check(p, {{"C1", {PenaltyMethod::LinearIsing, a1(g)}}}, k);
        check(p, {{"C1", {PenaltyMethod::QuadraticEquality, a2(g)}}}, k);
        if (coupling_keys(encode(p, {{"C1", {PenaltyMethod::LinearIsing, a1(g)}}}).model) != coupling_keys(p.objective))
            ++key_mismatch;
    }
    for (std::uint64_t k = 0; k < 5; ++k) {
        const auto p = build_four_quarter({generate_c_matrix({4, 2, 400 + k}), 1, 1, 2, {1.5, 1.0, 1.0, 1.5}});
        for (const char* pattern : {"LLLL", "LQQL", "QLLQ", "QQQQ"}) {
            const double alpha1[] = {a1(g), a1(g), a1(g), a1(g)};
            check(p, four_quarter_scheme(p, pattern, alpha1, a2(g), a2(g), a2(g)), k);
        }
    }
    return {key_mismatch == 0 && below_min == 0,
            std::to_string(cases) + " scheme/instance cases, " + std::to_string(key_mismatch) + " key-set mismatches, " +
                std::to_string(below_min) + " samples below the brute-force minimum"};
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<std::string, std::function<Verdict()>>> checks{
        {"AC1", ac1}, {"AC2", ac2}, {"AC3", ac3}, {"AC4", ac4}, {"AC5", ac5},
        {"AC6", ac6}, {"AC7", ac7}, {"AC8", ac8}, {"AC9", ac9}};
    std::set<std::string> only(argv + 1, argv + argc);
    int failures = 0;
    for (const auto& [name, fn] : checks) {
        if (!only.empty() && !only.count(name)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = fn();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("%s %s %s (%.2f s)\n", name.c_str(), v.pass ? "PASS" : "FAIL", v.detail.c_str(), secs);
        std::fflush(stdout);
        failures += !v.pass;
    }
    return failures == 0 ? 0 : 1;
}
