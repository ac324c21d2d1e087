#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include "compiled_model.hpp"
#include "cqubo/error.hpp"
#include "cqubo/rng.hpp"
#include "cqubo/solvers.hpp"

namespace cqubo {

namespace {

std::vector<double> beta_ladder(const BetaSchedule& s, std::size_t sweeps) {
    std::vector<double> betas(sweeps);
    if (sweeps == 1) {
        betas[0] = s.beta_max;
        return betas;
    }
    for (std::size_t k = 0; k < sweeps; ++k) {
        const double t = static_cast<double>(k) / static_cast<double>(sweeps - 1);
        betas[k] = s.interpolation == BetaInterpolation::Geometric
                       ? s.beta_min * std::pow(s.beta_max / s.beta_min, t)
                       : s.beta_min + (s.beta_max - s.beta_min) * t;
    }
    return betas;
}

BitAssignment anneal_one(const detail::CompiledModel& m, std::span<const double> betas, Rng& rng) {
    const Index n = m.n;
    std::vector<std::int8_t> spin(n);
    for (auto& s : spin) s = (rng.next() >> 63) ? 1 : -1;

    std::vector<double> field(m.linear);
    for (Index i = 0; i < n; ++i)
        for (std::size_t k = m.row_start[i]; k < m.row_start[i + 1]; ++k)
            field[i] += m.weight[k] * spin[m.neighbor[k]];

    for (double beta : betas) {
        for (Index i = 0; i < n; ++i) {
            const double delta = -2.0 * spin[i] * field[i];
            if (delta > 0.0 && rng.uniform() >= std::exp(-beta * delta)) continue;
            spin[i] = static_cast<std::int8_t>(-spin[i]);
            const double twice = 2.0 * spin[i];
            for (std::size_t k = m.row_start[i]; k < m.row_start[i + 1]; ++k)
                field[m.neighbor[k]] += twice * m.weight[k];
        }
    }
    return to_bits(spin);
}

}  // namespace

BetaSchedule default_beta_range(const IsingModel& model, BetaInterpolation interpolation) {
    const auto m = detail::CompiledModel::from(model);
    double max_delta = 0.0;
    double min_coeff = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < m.n; ++i) {
        double bound = std::abs(m.linear[i]);
        if (m.linear[i] != 0.0) min_coeff = std::min(min_coeff, std::abs(m.linear[i]));
        for (std::size_t k = m.row_start[i]; k < m.row_start[i + 1]; ++k) {
            bound += std::abs(m.weight[k]);
            if (m.weight[k] != 0.0) min_coeff = std::min(min_coeff, std::abs(m.weight[k]));
        }
        max_delta = std::max(max_delta, 2.0 * bound);
    }
    if (max_delta == 0.0) return {1.0, 1.0, interpolation};
    const double min_delta = 2.0 * min_coeff;
    return {std::log(2.0) / max_delta, 10.0 / min_delta, interpolation};
}

SampleSet simulated_annealing(const IsingModel& model, const SaConfig& cfg) {
    if (model.num_variables() == 0) throw InvalidArgument("simulated annealing needs at least one variable");
    if (cfg.num_reads == 0 || cfg.sweeps_per_read == 0) {
        throw InvalidArgument("num_reads and sweeps_per_read must be at least 1");
    }
    const BetaSchedule schedule = cfg.beta_schedule.value_or(default_beta_range(model, cfg.interpolation));
    if (!(schedule.beta_min > 0.0) || schedule.beta_min > schedule.beta_max) {
        throw InvalidArgument("beta schedule needs 0 < beta_min <= beta_max");
    }
    const auto compiled = detail::CompiledModel::from(model);
    const auto betas = beta_ladder(schedule, cfg.sweeps_per_read);

    std::vector<BitAssignment> finals(cfg.num_reads);
    auto run_range = [&](std::size_t begin, std::size_t end) {
        for (std::size_t r = begin; r < end; ++r) {
            Rng rng(cfg.seed, streams::kAnnealRead + r);
            finals[r] = anneal_one(compiled, betas, rng);
        }
    };
    const std::size_t threads = std::clamp<std::size_t>(cfg.num_threads, 1, cfg.num_reads);
    if (threads == 1) {
        run_range(0, cfg.num_reads);
    } else {
        std::vector<std::jthread> pool;
        const std::size_t chunk = (cfg.num_reads + threads - 1) / threads;
        for (std::size_t t = 0; t < threads; ++t) {
            const std::size_t b = t * chunk;
            const std::size_t e = std::min(cfg.num_reads, b + chunk);
            if (b < e) pool.emplace_back(run_range, b, e);
        }
    }

    SampleMetadata meta{"simulated_annealing", cfg.seed,
                        {{"num_reads", static_cast<double>(cfg.num_reads)},
                         {"sweeps_per_read", static_cast<double>(cfg.sweeps_per_read)},
                         {"beta_min", schedule.beta_min},
                         {"beta_max", schedule.beta_max},
                         {"geometric", schedule.interpolation == BetaInterpolation::Geometric ? 1.0 : 0.0}}};
    return SampleSet::from_assignments(ising_to_qubo(model), std::move(finals), std::move(meta));
}

SampleSet simulated_annealing(const QuboModel& model, const SaConfig& cfg) {
    auto via_ising = simulated_annealing(qubo_to_ising(model), cfg);
    std::vector<SampleRecord> records = via_ising.records();
    return SampleSet::from_records(model, std::move(records), via_ising.metadata());
}

}  // namespace cqubo
