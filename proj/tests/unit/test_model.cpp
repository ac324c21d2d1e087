#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "cqubo/error.hpp"
#include "cqubo/model.hpp"
#include "oracles.hpp"

using namespace cqubo;
using Catch::Approx;

TEST_CASE("qubo_to_ising on a single linear term") {
    QuboModel q(1);
    q.set_linear(0, 2.0);
    const auto m = qubo_to_ising(q);
    CHECK(m.linear(0) == -1.0);
    CHECK(m.offset() == 1.0);
    CHECK(q.energy(BitAssignment{0}) == 0.0);
    CHECK(m.energy(SpinAssignment{+1}) == 0.0);
    CHECK(q.energy(BitAssignment{1}) == 2.0);
    CHECK(m.energy(SpinAssignment{-1}) == 2.0);
}

TEST_CASE("qubo_to_ising on a single coupling matches enumeration") {
    QuboModel q(2);
    q.set_quadratic(0, 1, 4.0);
    const auto m = qubo_to_ising(q);
    CHECK(m.quadratic(0, 1) == 1.0);
    CHECK(m.linear(0) == -1.0);
    CHECK(m.linear(1) == -1.0);
    CHECK(m.offset() == 1.0);
    oracle::enumerate_bits(2, [&](const oracle::Bits& x) { CHECK(m.energy(to_spins(x)) == Approx(q.energy(x))); });
}

TEST_CASE("zero models map to zero models") {
    CHECK(qubo_to_ising(QuboModel(3)) == IsingModel(3));
    CHECK(ising_to_qubo(IsingModel(3)) == QuboModel(3));
}

TEST_CASE("ising_to_qubo inverts the single-field example") {
    IsingModel m(1);
    m.set_linear(0, -1.0);
    m.set_offset(1.0);
    const auto q = ising_to_qubo(m);
    CHECK(q.linear(0) == 2.0);
    CHECK(q.offset() == 0.0);
}

TEST_CASE("energy basics") {
    QuboModel q(2);
    q.set_offset(0.75);
    q.set_linear(1, 3.0);
    CHECK(q.energy(BitAssignment{0, 0}) == 0.75);
    QuboModel p(2);
    p.set_quadratic(0, 1, 1.0);
    CHECK(p.energy(BitAssignment{1, 1}) == 1.0);
    CHECK_THROWS_AS(p.energy(BitAssignment{1}), InvalidArgument);
    CHECK_THROWS_AS(p.energy(BitAssignment{1, 2}), InvalidArgument);
    CHECK_THROWS_AS(qubo_to_ising(p).energy(SpinAssignment{1, 0}), InvalidArgument);
}

TEST_CASE("diagonal quadratic terms are rejected") {
    QuboModel q(2);
    CHECK_THROWS_AS(q.add_quadratic(1, 1, 1.0), InvalidArgument);
    CHECK_THROWS_AS(q.add_linear(2, 1.0), InvalidArgument);
    q.add_quadratic(1, 0, 2.0);
    CHECK(q.quadratic(0, 1) == 2.0);
    CHECK(q.quadratic_terms().begin()->first == Pair{0, 1});
}

TEST_CASE("spin and bit assignments are a bijection") {
    oracle::enumerate_bits(5, [](const oracle::Bits& x) {
        const auto s = to_spins(x);
        for (std::size_t i = 0; i < x.size(); ++i) CHECK(s[i] == 1 - 2 * x[i]);
        CHECK(to_bits(s) == x);
    });
}

TEST_CASE("random models: energies agree with a naive evaluator and across forms") {
    std::mt19937_64 g(11);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + trial % 10;
        const auto q = oracle::random_qubo(g, n, -2.0, 2.0, 0.6);
        const auto m = qubo_to_ising(q);
        const auto dq = oracle::dense(q);
        const auto dm = oracle::dense(m);
        oracle::enumerate_bits(n, [&](const oracle::Bits& x) {
            const double e = oracle::naive_energy(dq, x);
            REQUIRE(std::abs(q.energy(x) - e) <= 1e-9);
            const auto s = to_spins(x);
            REQUIRE(std::abs(oracle::naive_energy(dm, s) - e) <= 1e-9);
        });
        REQUIRE(approx_equal(ising_to_qubo(m), q, 1e-12));
    }
}

TEST_CASE("positive scaling preserves the argmin set") {
    std::mt19937_64 g(5);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 2 + trial % 9;
        const auto q = oracle::random_qubo(g, n);
        const double factor = std::uniform_real_distribution<double>(0.01, 50.0)(g);
        const auto s = q.scaled(factor);
        const auto a = oracle::brute_min(oracle::dense(q), 0.0);
        const auto b = oracle::brute_min(oracle::dense(s), 0.0);
        REQUIRE(a.argmin == b.argmin);
        REQUIRE(b.energy == Approx(a.energy * factor).margin(1e-9));
    }
}

TEST_CASE("normalize examples") {
    IsingModel m(2);
    m.set_linear(0, -4.0);
    m.set_quadratic(0, 1, 1.0);
    auto [same, r1] = normalize(m);
    CHECK(r1.normalization == 1.0);
    CHECK(same == m);

    IsingModel big(2);
    big.set_linear(0, 8.0);
    big.set_linear(1, -2.0);
    big.set_quadratic(0, 1, 0.5);
    big.set_offset(3.0);
    auto [half, r2] = normalize(big);
    CHECK(r2.normalization == 2.0);
    CHECK(r2.effective_scale == 0.5);
    CHECK(r2.max_abs_h == 8.0);
    CHECK(r2.max_abs_J == 0.5);
    CHECK(half.linear(0) == 4.0);
    CHECK(half.linear(1) == -1.0);
    CHECK(half.quadratic(0, 1) == 0.25);
    CHECK(half.offset() == 1.5);

    auto [empty, r3] = normalize(IsingModel(3));
    CHECK(r3.normalization == 1.0);

    IsingModel small(1);
    small.set_linear(0, 1.0);
    CHECK(normalize(small).second.normalization == 0.25);
    CHECK_THROWS_AS(normalize(small, 0.0, 1.0), InvalidArgument);
}

TEST_CASE("normalize is idempotent and respects limits") {
    std::mt19937_64 g(3);
    for (int trial = 0; trial < 200; ++trial) {
        const auto m = qubo_to_ising(oracle::random_qubo(g, 1 + trial % 8, -5.0, 5.0, 0.7));
        const double hl = 1.0 + trial % 4, jl = 0.5 + trial % 3;
        const auto [scaled, report] = normalize(m, hl, jl);
        for (const auto& [i, v] : scaled.linear_terms()) REQUIRE(std::abs(v) <= hl * (1 + 1e-12));
        for (const auto& [p, v] : scaled.quadratic_terms()) REQUIRE(std::abs(v) <= jl * (1 + 1e-12));
        REQUIRE(normalize(scaled, hl, jl).second.normalization == Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("Q matrix export and import") {
    QuboModel one(1);
    one.set_linear(0, 3.0);
    const auto q1 = export_q_matrix(one);
    CHECK(q1.n == 1);
    CHECK(q1(0, 0) == 3.0);

    QuboModel two(2);
    two.set_linear(0, 1.0);
    two.set_linear(1, 2.0);
    two.set_quadratic(0, 1, 5.0);
    two.set_offset(-1.0);
    const auto q2 = export_q_matrix(two);
    CHECK(q2.values == std::vector<double>{1.0, 5.0, 0.0, 2.0});
    CHECK(q2.offset == -1.0);

    std::mt19937_64 g(9);
    for (int trial = 0; trial < 100; ++trial) {
        const auto q = oracle::random_qubo(g, 1 + trial % 12, -1.0, 1.0, 0.5);
        REQUIRE(approx_equal(import_q_matrix(export_q_matrix(q)), q, 0.0));
    }
    auto bad = q2;
    bad.values[2] = 1.0;
    CHECK_THROWS_AS(import_q_matrix(bad), InvalidArgument);
}
