#include <pybind11/functional.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cqubo/error.hpp"
#include "cqubo/io.hpp"
#include "cqubo/metrics.hpp"
#include "cqubo/model.hpp"
#include "cqubo/penalties.hpp"
#include "cqubo/problems.hpp"
#include "cqubo/search.hpp"
#include "cqubo/solvers.hpp"

namespace py = pybind11;
using namespace cqubo;

namespace {

template <class Model, class Value>
void bind_model(py::module_& m, const char* name) {
    py::class_<Model>(m, name)
        .def(py::init<Index>(), py::arg("num_variables") = 0)
        .def_property_readonly("num_variables", &Model::num_variables)
        .def("add_variable", &Model::add_variable)
        .def("add_linear", &Model::add_linear)
        .def("set_linear", &Model::set_linear)
        .def("add_quadratic", &Model::add_quadratic)
        .def("set_quadratic", &Model::set_quadratic)
        .def("add_offset", &Model::add_offset)
        .def("linear", &Model::linear)
        .def("quadratic", &Model::quadratic)
        .def_property("offset", &Model::offset, &Model::set_offset)
        .def_property_readonly("linear_terms", &Model::linear_terms)
        .def_property_readonly("quadratic_terms", &Model::quadratic_terms)
        .def("scaled", &Model::scaled)
        .def("energy", [](const Model& self, const std::vector<Value>& v) { return self.energy(v); })
        .def("to_json", [](const Model& self) { return io::model_to_json(self); })
        .def(py::self == py::self);
}

PenaltyScheme scheme_from_py(const py::dict& d) {
    PenaltyScheme s;
    for (const auto& [k, v] : d) {
        const auto pair = v.cast<std::pair<std::string, double>>();
        s[k.cast<std::string>()] = {parse_penalty_method(pair.first), pair.second};
    }
    return s;
}

py::dict scheme_to_py(const PenaltyScheme& s) {
    py::dict d;
    for (const auto& [id, a] : s) d[py::str(id)] = py::make_tuple(std::string(to_string(a.method)), a.strength);
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Constrained QUBO encodings, samplers and penalty-strength searches";
    m.attr("__version__") = CQUBO_VERSION;

    py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
    py::register_exception<RuntimeFailure>(m, "RuntimeFailure", PyExc_RuntimeError);

    bind_model<QuboModel, std::uint8_t>(m, "QuboModel");
    bind_model<IsingModel, std::int8_t>(m, "IsingModel");
    m.def("qubo_from_json", &io::qubo_from_json);
    m.def("ising_from_json", &io::ising_from_json);
    m.def("qubo_to_ising", &qubo_to_ising);
    m.def("ising_to_qubo", &ising_to_qubo);

    py::class_<DynamicRangeReport>(m, "DynamicRangeReport")
        .def_readonly("max_abs_h", &DynamicRangeReport::max_abs_h)
        .def_readonly("max_abs_J", &DynamicRangeReport::max_abs_J)
        .def_readonly("normalization", &DynamicRangeReport::normalization)
        .def_readonly("effective_scale", &DynamicRangeReport::effective_scale);
    m.def("dynamic_range", &dynamic_range, py::arg("model"), py::arg("h_limit") = kDefaultHLimit,
          py::arg("J_limit") = kDefaultJLimit);
    m.def("normalize", &normalize, py::arg("model"), py::arg("h_limit") = kDefaultHLimit,
          py::arg("J_limit") = kDefaultJLimit);

    py::class_<Constraint>(m, "Constraint")
        .def_readonly("id", &Constraint::id)
        .def("variables", &Constraint::variables)
        .def("is_hamming_weight_equality", &Constraint::is_hamming_weight_equality)
        .def("satisfied", [](const Constraint& c, const BitAssignment& x) { return c.satisfied(x); });

    py::class_<ConstrainedProblem>(m, "ConstrainedProblem")
        .def_readonly("objective", &ConstrainedProblem::objective)
        .def_readonly("constraints", &ConstrainedProblem::constraints)
        .def_property_readonly("num_primary", &ConstrainedProblem::num_primary)
        .def("constraint_ids", [](const ConstrainedProblem& p) {
            std::vector<std::string> ids;
            for (const auto& c : p.constraints) ids.push_back(c.id);
            return ids;
        });

    py::class_<CannibalizationMatrix>(m, "CannibalizationMatrix")
        .def_property_readonly("num_products", &CannibalizationMatrix::num_products)
        .def("__call__", &CannibalizationMatrix::operator())
        .def("connectivity", &CannibalizationMatrix::connectivity)
        .def("mean_connectivity", &CannibalizationMatrix::mean_connectivity)
        .def_property_readonly("entries", &CannibalizationMatrix::entries);
    m.def("generate_c_matrix", [](Index n, Index min_connectivity, std::uint64_t seed) {
        return generate_c_matrix({n, min_connectivity, seed});
    }, py::arg("n_products"), py::arg("min_connectivity"), py::arg("seed"));
    m.def("instance_id", &instance_id);
    m.def("build_single_quarter", [](const CannibalizationMatrix& c, Index A) { return build_single_quarter({c, A}); },
          py::arg("c"), py::arg("A"));
    m.def("build_four_quarter",
          [](const CannibalizationMatrix& c, Index A, Index B_min, Index B_max, std::array<double, 4> lambda) {
              return build_four_quarter({c, A, B_min, B_max, lambda});
          },
          py::arg("c"), py::arg("A"), py::arg("B_min") = 1, py::arg("B_max") = 2,
          py::arg("lambda_") = std::array<double, 4>{1.5, 1.0, 1.0, 1.5});
    m.def("check_feasible", [](const ConstrainedProblem& p, const BitAssignment& x) {
        const auto r = check_feasible(p, x);
        return py::make_tuple(r.feasible, r.violations);
    });

    m.def("encode", [](const ConstrainedProblem& p, const py::dict& scheme) {
        auto enc = encode(p, scheme_from_py(scheme));
        return py::make_tuple(enc.model, enc.slack_registry);
    }, py::arg("problem"), py::arg("scheme"),
       "scheme maps constraint id to (method, strength) with method linear, quadratic, slack or pairwise");
    m.def("expand_quarter_shorthand",
          [](const std::string& pattern, const std::vector<std::string>& ids, const std::vector<double>& alpha1,
             double alpha2) { return scheme_to_py(expand_quarter_shorthand(pattern, ids, alpha1, alpha2)); });

    py::class_<SampleRecord>(m, "SampleRecord")
        .def_readonly("assignment", &SampleRecord::assignment)
        .def_readonly("energy", &SampleRecord::energy)
        .def_readonly("multiplicity", &SampleRecord::multiplicity);
    py::class_<SampleSet, std::shared_ptr<SampleSet>>(m, "SampleSet")
        .def_property_readonly("records", &SampleSet::records)
        .def_property_readonly("total_count", &SampleSet::total_count)
        .def("best", &SampleSet::best)
        .def("__len__", [](const SampleSet& s) { return s.records().size(); });

    m.def("simulated_annealing",
          [](const QuboModel& model, std::size_t reads, std::size_t sweeps, std::uint64_t seed, std::size_t threads) {
              SaConfig cfg;
              cfg.num_reads = reads;
              cfg.sweeps_per_read = sweeps;
              cfg.seed = seed;
              cfg.num_threads = threads;
              py::gil_scoped_release release;
              return simulated_annealing(model, cfg);
          },
          py::arg("model"), py::arg("num_reads") = 1000, py::arg("sweeps_per_read") = 1000, py::arg("seed") = 0,
          py::arg("num_threads") = 1);
    m.def("brute_force", [](const QuboModel& model, std::size_t top_k) { return brute_force(model, top_k); },
          py::arg("model"), py::arg("top_k") = 1);
    m.def("ground_state", [](const QuboModel& model) { return ground_state(model); });
    m.def("min_energy_by_hamming_weight",
          [](const QuboModel& model, const std::vector<Index>& vars) { return min_energy_by_hamming_weight(model, vars); });
    m.def("extremal_objective_values", [](const ConstrainedProblem& p) {
        const auto r = extremal_objective_values(p);
        return py::make_tuple(r.f_min, r.f_max);
    });

    py::class_<SearchConfig>(m, "SearchConfig")
        .def(py::init<>())
        .def_readwrite("max_iterations_1", &SearchConfig::max_iterations_1)
        .def_readwrite("max_iterations_2", &SearchConfig::max_iterations_2)
        .def_readwrite("initial_strength", &SearchConfig::initial_strength)
        .def_readwrite("initial_step", &SearchConfig::initial_step)
        .def_readwrite("phase2_step_scale", &SearchConfig::phase2_step_scale)
        .def_readwrite("phase2_decay", &SearchConfig::phase2_decay)
        .def_readwrite("target", &SearchConfig::target)
        .def_readwrite("resolution", &SearchConfig::resolution);
    py::class_<SearchStep>(m, "SearchStep")
        .def_readonly("phase", &SearchStep::phase)
        .def_readonly("strengths", &SearchStep::strengths)
        .def_readonly("weights", &SearchStep::weights)
        .def_readonly("step", &SearchStep::step);
    py::class_<SearchOutcome>(m, "SearchOutcome")
        .def_property_readonly("converged", &SearchOutcome::converged)
        .def_readonly("strengths", &SearchOutcome::strengths)
        .def_readonly("iterations_used", &SearchOutcome::iterations_used)
        .def_readonly("trace", &SearchOutcome::trace);

    m.def("single_constraint_search",
          [](const std::function<std::vector<std::size_t>(std::vector<double>)>& solver, const SearchConfig& cfg) {
              return single_constraint_search(
                  [&](std::span<const double> s) { return solver({s.begin(), s.end()}); }, cfg);
          },
          py::arg("solver"), py::arg("config"),
          "solver(strengths) returns the ground-state Hamming weight as a one-element list");
    m.def("tune_single_quarter", [](const ConstrainedProblem& p, const SearchConfig& cfg) {
        auto cb = make_exact_callback(p, {{"C1", {PenaltyMethod::LinearIsing, 0.0}}}, {"C1"});
        return single_constraint_search(p, cb, cfg);
    }, py::arg("problem"), py::arg("config") = SearchConfig{});
    m.def("tune_four_quarter",
          [](const ConstrainedProblem& p, const std::string& pattern, const SearchConfig& cfg, bool tied,
             double alpha2_c1, double alpha2_c2, double alpha2_c3) {
              const auto ids = c1_constraint_ids(p);
              const double zero[] = {0.0};
              auto base = expand_quarter_shorthand(pattern, ids, zero, alpha2_c1);
              std::vector<std::string> linear;
              for (std::size_t q = 0; q < ids.size(); ++q)
                  if (pattern[q] == 'L') linear.push_back(ids[q]);
              for (const auto& c : p.constraints) {
                  if (c.id.rfind("C2-", 0) == 0) base[c.id] = {PenaltyMethod::QuadraticSlack, alpha2_c2};
                  if (c.id.rfind("C3-", 0) == 0) base[c.id] = {PenaltyMethod::QuadraticPairwise, alpha2_c3};
              }
              SearchConfig c = cfg;
              const auto& first = std::get<LinearEquality>(p.constraint(ids.front()).body);
              c.target = static_cast<std::size_t>(first.value);
              return mixed_scheme_search(pattern, make_exact_callback(p, base, linear), c, tied);
          },
          py::arg("problem"), py::arg("pattern") = "LLLL", py::arg("config") = SearchConfig{},
          py::arg("tied") = false, py::arg("alpha2_c1") = 2.4, py::arg("alpha2_c2") = 0.6,
          py::arg("alpha2_c3") = 1.2);
    m.def("hull_feasibility_oracle",
          [](const std::vector<double>& emin, std::size_t A) { return hull_feasibility_oracle(emin, A); });
    m.def("hull_alpha1_interval", [](const std::vector<double>& emin, std::size_t A) -> py::object {
        const auto r = hull_alpha1_interval(emin, A);
        if (!r) return py::none();
        return py::make_tuple(r->lower, r->upper);
    });

    m.def("approximation_ratio", &approximation_ratio);
    m.def("sign_test_p", [](std::size_t n_b, std::size_t n_w) {
        const auto r = sign_test_p(n_b, n_w);
        return py::make_tuple(r.p, r.p_tilde);
    }, py::arg("n_b"), py::arg("n_w"), "returns (p, p_tilde)");
    m.def("score", [](const ConstrainedProblem& p, const SampleSet& s, double f_min, double f_max) {
        const auto r = score_sample_set(p, s, f_min, f_max);
        py::dict d;
        d["S"] = r.S;
        d["F"] = r.F;
        d["best_R"] = r.best_R ? py::cast(*r.best_R) : py::none();
        d["best_feasible_objective"] = r.best_feasible_objective ? py::cast(*r.best_feasible_objective) : py::none();
        return d;
    });
}
