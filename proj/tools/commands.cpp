#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "cqubo/error.hpp"
#include "cqubo/io.hpp"
#include "cqubo/metrics.hpp"
#include "cqubo/problems.hpp"
#include "cqubo/rng.hpp"
#include "cqubo/search.hpp"
#include "cqubo/solvers.hpp"

namespace cqubo::cli {

namespace fs = std::filesystem;
using nlohmann::json;
using io::format_real;

namespace {

std::string join(const std::string& dir, const std::string& name) { return (fs::path(dir) / name).string(); }

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw RuntimeFailure("cannot create output directory '" + dir + "'");
}

json json_real(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return nullptr;
    return v;
}

double real_from_json(const json& j) {
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "inf") return INFINITY;
        if (s == "-inf") return -INFINITY;
        throw InvalidArgument("expected a number, got '" + s + "'");
    }
    return j.get<double>();
}

struct ResolvedScheme {
    PenaltyScheme base;
    std::vector<std::string> linear_ids;  // constraint order
    std::string label;
    // Four-quarter L/Q pattern over C1, when one applies.
    std::optional<std::string> pattern;
    // Linear strengths are given in the scheme itself.
    bool explicit_strengths = false;
};

void fill_secondary(const io::InstanceFile& inst, const ConstrainedProblem& p, PenaltyScheme& scheme,
                    const Alpha2Defaults& a2) {
    if (inst.problem != io::ProblemKind::Four) return;
    for (const auto& c : p.constraints) {
        if (scheme.count(c.id)) continue;
        if (c.id.rfind("C2-", 0) == 0) scheme[c.id] = {PenaltyMethod::QuadraticSlack, a2.c2};
        if (c.id.rfind("C3-", 0) == 0) scheme[c.id] = {PenaltyMethod::QuadraticPairwise, a2.c3};
    }
}

ResolvedScheme from_pattern(const io::InstanceFile& inst, const ConstrainedProblem& p, const std::string& pattern,
                            const std::string& label, const Alpha2Defaults& a2) {
    ResolvedScheme r;
    r.label = label;
    r.pattern = pattern;
    const auto ids = c1_constraint_ids(p);
    const double zero[] = {0.0};
    r.base = expand_quarter_shorthand(pattern, ids, zero, a2.c1);
    for (std::size_t q = 0; q < ids.size(); ++q) {
        if (pattern[q] == 'L') r.linear_ids.push_back(ids[q]);
    }
    fill_secondary(inst, p, r.base, a2);
    return r;
}

ResolvedScheme resolve_scheme(const io::InstanceFile& inst, const ConstrainedProblem& p, const std::string& arg,
                              const Alpha2Defaults& a2) {
    const bool four = inst.problem == io::ProblemKind::Four;
    if (fs::is_regular_file(arg)) {
        const auto spec = io::parse_scheme(io::read_file(arg));
        const auto label = fs::path(arg).stem().string();
        if (spec.shorthand) {
            if (!four) throw InvalidArgument("scheme shorthand applies to four-quarter instances only");
            return from_pattern(inst, p, *spec.shorthand, label, a2);
        }
        ResolvedScheme r;
        r.label = label;
        r.base = spec.explicit_scheme;
        r.explicit_strengths = true;
        fill_secondary(inst, p, r.base, a2);
        for (const auto& c : p.constraints) {
            auto it = r.base.find(c.id);
            if (it != r.base.end() && it->second.method == PenaltyMethod::LinearIsing) r.linear_ids.push_back(c.id);
        }
        if (four) {
            const auto ids = c1_constraint_ids(p);
            std::string pattern;
            for (const auto& id : ids) {
                auto it = r.base.find(id);
                pattern += (it != r.base.end() && it->second.method == PenaltyMethod::LinearIsing) ? 'L' : 'Q';
            }
            if (static_cast<std::size_t>(std::count(pattern.begin(), pattern.end(), 'L')) == r.linear_ids.size()) {
                r.pattern = pattern;
            }
        }
        return r;
    }
    if (!four) {
        ResolvedScheme r;
        r.label = arg;
        if (arg == "single" || arg == "linear" || arg == "L") {
            r.base["C1"] = {PenaltyMethod::LinearIsing, 0.0};
            r.linear_ids = {"C1"};
        } else if (arg == "quadratic" || arg == "Q") {
            r.base["C1"] = {PenaltyMethod::QuadraticEquality, a2.single};
        } else {
            throw InvalidArgument("scheme '" + arg + "' does not apply to single-quarter instances "
                                  "(use single or quadratic)");
        }
        return r;
    }
    std::string pattern = arg;
    if (arg == "all-linear") pattern = "LLLL";
    if (arg == "all-quadratic") pattern = "QQQQ";
    if (pattern.size() != 4 || pattern.find_first_not_of("LQ") != std::string::npos) {
        throw InvalidArgument("scheme '" + arg + "' is not all-linear, all-quadratic, a four-letter L/Q pattern "
                              "or a scheme file");
    }
    return from_pattern(inst, p, pattern, arg, a2);
}

EnumerationLimits limits_of(const SolverOptions& s) {
    EnumerationLimits l;
    l.max_enumerated = s.max_enumerated;
    return l;
}

void check_solver(const std::string& name) {
    if (name != "exact" && name != "sa") throw InvalidArgument("solver must be exact or sa, got '" + name + "'");
}

std::string status_name(SearchStatus s) { return s == SearchStatus::Converged ? "converged" : "failed"; }

void record_inputs(Manifest& m, const std::vector<LoadedInstance>& insts) {
    for (const auto& i : insts) m.input(i.path);
}

std::vector<LoadedInstance> require_instances(const std::vector<std::string>& paths) {
    auto insts = load_instances(paths);
    if (insts.empty()) throw InvalidArgument("no instance files found");
    return insts;
}

}  // namespace

std::vector<double> parse_grid(const std::string& text) {
    std::vector<double> out;
    auto num = [&](const std::string& s) {
        std::size_t used = 0;
        double v = 0;
        try {
            v = std::stod(s, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != s.size() || s.empty()) throw InvalidArgument("bad grid value '" + s + "'");
        return v;
    };
    if (text.find(':') != std::string::npos) {
        std::vector<std::string> parts;
        std::stringstream ss(text);
        for (std::string part; std::getline(ss, part, ':');) parts.push_back(part);
        if (parts.size() != 3) throw InvalidArgument("grid range must be start:stop:step");
        const double a = num(parts[0]), b = num(parts[1]), step = num(parts[2]);
        if (!(step > 0) || b < a) throw InvalidArgument("grid range needs step > 0 and stop >= start");
        for (std::size_t k = 0;; ++k) {
            const double v = a + static_cast<double>(k) * step;
            if (v > b + 1e-9 * step) break;
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.12g", v);
            out.push_back(std::stod(buf));
        }
    } else {
        std::stringstream ss(text);
        for (std::string part; std::getline(ss, part, ',');) out.push_back(num(part));
    }
    if (out.empty()) throw InvalidArgument("empty alpha2 grid");
    return out;
}

int cmd_gen(const GenOptions& o, Manifest& m) {
    io::ProblemKind kind;
    if (o.problem == "single")
        kind = io::ProblemKind::Single;
    else if (o.problem == "four")
        kind = io::ProblemKind::Four;
    else
        throw InvalidArgument("--problem must be single or four");
    if (o.n_products < 2) throw InvalidArgument("--n-products must be at least 2");
    if (o.lambda.size() != 4) throw InvalidArgument("--lambda takes four values");
    const Index A = o.A ? *o.A : (kind == io::ProblemKind::Single ? o.n_products / 2
                                                                  : std::max<Index>(1, 2 * o.n_products / 5));
    if (A > o.n_products) throw InvalidArgument("--A exceeds --n-products");
    if (o.B_min > o.B_max || o.B_max > 4) throw InvalidArgument("need B_min <= B_max <= 4");
    ensure_dir(o.out);
    m.parameter("problem", o.problem);
    m.parameter("n_products", o.n_products);
    m.parameter("min_connectivity", o.min_connectivity);
    m.parameter("count", o.count);
    m.parameter("seed", o.seed);
    m.parameter("A", A);
    if (kind == io::ProblemKind::Four) {
        m.parameter("B_min", o.B_min);
        m.parameter("B_max", o.B_max);
        m.parameter("lambda", o.lambda);
    }
    for (std::size_t k = 0; k < o.count; ++k) {
        io::InstanceFile inst;
        inst.seed = o.seed + k;
        inst.problem = kind;
        inst.id = instance_id(o.n_products, inst.seed);
        inst.c = generate_c_matrix({o.n_products, o.min_connectivity, inst.seed});
        inst.A = A;
        inst.min_connectivity = o.min_connectivity;
        inst.B_min = o.B_min;
        inst.B_max = o.B_max;
        std::copy(o.lambda.begin(), o.lambda.end(), inst.lambda.begin());
        m.output(join(o.out, inst.id + ".json"), io::instance_to_json(inst));
    }
    m.write(join(o.out, "manifest.json"));
    std::cout << "generated " << o.count << " instance(s) in " << o.out << "\n";
    return kOk;
}

int cmd_tune(const TuneOptions& o, Manifest& m) {
    check_solver(o.solver.solver);
    o.search.validate();
    if (o.window && o.solver.solver != "exact") throw InvalidArgument("--window needs --solver exact");
    if (!(o.window_resolution > 0)) throw InvalidArgument("--window-resolution must be positive");
    const auto insts = require_instances(o.instances);
    record_inputs(m, insts);
    ensure_dir(o.out);
    ensure_dir(join(o.out, "traces"));

    struct Row {
        std::string label;
        SearchOutcome outcome;
        std::vector<std::string> linear_ids;
        std::optional<FeasibleWindow> window;
        std::optional<double> drawn;
        bool tied = false;
        bool window_requested = false;
    };
    std::vector<Row> rows(insts.size());
    parallel_for(insts.size(), o.jobs, [&](std::size_t k) {
        const auto& inst = insts[k].file;
        const auto problem = inst.build();
        const auto scheme = resolve_scheme(inst, problem, o.scheme, o.alpha2);
        Row& row = rows[k];
        row.label = scheme.label;
        row.linear_ids = scheme.linear_ids;
        SolverCallback cb;
        if (o.solver.solver == "exact") {
            cb = make_exact_callback(problem, scheme.base, scheme.linear_ids, limits_of(o.solver));
        } else {
            SaConfig sa;
            sa.num_reads = o.solver.reads;
            sa.sweeps_per_read = o.solver.sweeps;
            sa.seed = derive_seed(o.seed, inst.seed);
            cb = make_sa_callback(problem, scheme.base, scheme.linear_ids, sa);
        }
        SearchConfig cfg = o.search;
        cfg.target = inst.A;
        if (inst.problem == io::ProblemKind::Single) {
            if (scheme.linear_ids.empty()) {
                row.outcome.status = SearchStatus::Converged;
            } else {
                row.outcome = single_constraint_search(problem, cb, cfg);
                if (o.window) {
                    row.window_requested = true;
                    row.window = alpha1_feasible_window(cb, cfg, o.window_resolution);
                    if (row.window && row.outcome.converged()) {
                        Rng rng(derive_seed(o.seed, inst.seed), streams::kWindowDraw);
                        row.drawn = row.window->draw(rng);
                    }
                }
            }
        } else {
            if (!scheme.pattern) throw InvalidArgument("tune supports linear penalties on C1 constraints only");
            const auto& pat = *scheme.pattern;
            const bool mixed = pat.find('Q') != std::string::npos;
            row.tied = mixed && !o.untied;
            row.outcome = mixed_scheme_search(pat, cb, cfg, row.tied);
        }
    });

    json entries = json::array();
    std::size_t converged = 0;
    for (std::size_t k = 0; k < insts.size(); ++k) {
        const auto& row = rows[k];
        const auto& id = insts[k].file.id;
        if (row.outcome.converged()) ++converged;
        json e{{"instance_id", id},
               {"status", status_name(row.outcome.status)},
               {"linear_ids", row.linear_ids},
               {"iterations", row.outcome.iterations_used},
               {"tied", row.tied}};
        std::vector<double> strengths = row.outcome.strengths;
        e["search_strengths"] = strengths;
        if (row.window_requested) {
            e["window"] = row.window ? json{{"lower", json_real(row.window->lower)},
                                            {"upper", json_real(row.window->upper)},
                                            {"outer_lower", json_real(row.window->outer_lower)},
                                            {"outer_upper", json_real(row.window->outer_upper)}}
                                     : json(nullptr);
        } else {
            e["window"] = nullptr;
        }
        e["drawn"] = row.drawn ? json(*row.drawn) : json(nullptr);
        if (row.drawn) strengths = {*row.drawn};
        e["strengths"] = strengths;
        entries.push_back(e);
        m.output(join(join(o.out, "traces"), id + ".jsonl"), io::trace_to_jsonl(row.outcome.trace));
    }
    const std::string label = rows.empty() ? o.scheme : rows.front().label;
    json doc{{"scheme", label}, {"solver", o.solver.solver}, {"instances", entries}};
    m.output(join(o.out, "strengths.json"), doc.dump(1) + "\n");
    const double fraction = static_cast<double>(converged) / static_cast<double>(insts.size());
    json summary{{"scheme", label},
                 {"instances", insts.size()},
                 {"converged", converged},
                 {"failed", insts.size() - converged},
                 {"fraction_converged", fraction}};
    m.output(join(o.out, "summary.json"), summary.dump(1) + "\n");

    m.parameter("scheme", o.scheme);
    m.parameter("solver", o.solver.solver);
    m.parameter("reads", o.solver.reads);
    m.parameter("sweeps", o.solver.sweeps);
    m.parameter("max_enumerated", o.solver.max_enumerated);
    m.parameter("search", {{"max_iterations_1", o.search.max_iterations_1},
                           {"max_iterations_2", o.search.max_iterations_2},
                           {"initial_strength", o.search.initial_strength},
                           {"initial_step", o.search.initial_step},
                           {"phase2_step_scale", o.search.phase2_step_scale},
                           {"phase2_decay", o.search.phase2_decay},
                           {"resolution", o.search.resolution}});
    m.parameter("window", o.window);
    m.parameter("window_resolution", o.window_resolution);
    m.parameter("untied", o.untied);
    m.parameter("seed", o.seed);
    m.parameter("jobs", o.jobs);
    m.write(join(o.out, "manifest.json"));
    std::cout << "converged " << converged << "/" << insts.size() << " (" << format_real(fraction) << ")\n";
    return kOk;
}

namespace {

struct StrengthEntry {
    std::string status;
    std::vector<std::string> linear_ids;
    std::vector<double> strengths;
};

std::map<std::string, StrengthEntry> load_strengths(const std::string& path) {
    json doc;
    try {
        doc = json::parse(io::read_file(path));
    } catch (const json::exception& e) {
        throw InvalidArgument("strengths file: " + std::string(e.what()));
    }
    std::map<std::string, StrengthEntry> out;
    try {
        for (const auto& e : doc.at("instances")) {
            StrengthEntry s;
            s.status = e.at("status").get<std::string>();
            s.linear_ids = e.at("linear_ids").get<std::vector<std::string>>();
            for (const auto& v : e.at("strengths")) s.strengths.push_back(real_from_json(v));
            out[e.at("instance_id").get<std::string>()] = std::move(s);
        }
    } catch (const json::exception& e) {
        throw InvalidArgument("strengths file: " + std::string(e.what()));
    }
    return out;
}

ObjectiveRange best_found_range(const ConstrainedProblem& p, const SampleSet& s) {
    std::optional<ObjectiveRange> r;
    for (const auto& rec : s.records()) {
        BitAssignment x(rec.assignment.begin(), rec.assignment.begin() + static_cast<std::ptrdiff_t>(p.num_primary()));
        if (!check_feasible(p, x).feasible) continue;
        const double f = p.objective.energy(x);
        if (!r) r = ObjectiveRange{f, f};
        r->f_min = std::min(r->f_min, f);
        r->f_max = std::max(r->f_max, f);
    }
    return r.value_or(ObjectiveRange{});
}

}  // namespace

int cmd_run(const RunOptions& o, Manifest& m) {
    check_solver(o.solver.solver);
    if (o.reference != "exact" && o.reference != "best-found" && o.reference != "auto") {
        throw InvalidArgument("--reference must be exact, best-found or auto");
    }
    const auto insts = require_instances(o.instances);
    record_inputs(m, insts);
    std::optional<std::map<std::string, StrengthEntry>> strengths;
    if (o.strengths_file) {
        m.input(*o.strengths_file);
        strengths = load_strengths(*o.strengths_file);
    }
    if (fs::is_regular_file(o.scheme)) m.input(o.scheme);

    // Resolve schemes up front so missing strengths fail before any sampling.
    struct Job {
        ConstrainedProblem problem;
        PenaltyScheme scheme;
        std::string label;
        bool skipped = false;
    };
    std::vector<Job> jobs(insts.size());
    std::vector<std::string> skipped;
    for (std::size_t k = 0; k < insts.size(); ++k) {
        const auto& inst = insts[k].file;
        Job& job = jobs[k];
        job.problem = inst.build();
        auto r = resolve_scheme(inst, job.problem, o.scheme, o.alpha2);
        job.label = r.label;
        job.scheme = r.base;
        if (r.linear_ids.empty()) continue;
        if (!strengths) {
            if (r.explicit_strengths) continue;
            throw InvalidArgument("scheme '" + r.label + "' has linear constraints; pass --strengths-file");
        }
        auto it = strengths->find(inst.id);
        if (it == strengths->end()) throw InvalidArgument("no strengths for instance '" + inst.id + "'");
        if (it->second.status != "converged") {
            job.skipped = true;
            skipped.push_back(inst.id);
            continue;
        }
        if (it->second.linear_ids != r.linear_ids || it->second.strengths.size() != r.linear_ids.size()) {
            throw InvalidArgument("strengths for instance '" + inst.id + "' do not match the scheme's linear constraints");
        }
        for (std::size_t q = 0; q < r.linear_ids.size(); ++q) {
            job.scheme[r.linear_ids[q]] = {PenaltyMethod::LinearIsing, it->second.strengths[q]};
        }
    }
    ensure_dir(o.out);
    if (o.save_samples) ensure_dir(join(o.out, "samples"));

    std::vector<std::optional<InstanceResult>> results(insts.size());
    std::vector<DynamicRangeReport> ranges(insts.size());
    std::vector<std::string> reference_used(insts.size());
    std::vector<std::shared_ptr<const SampleSet>> sample_sets(insts.size());
    parallel_for(insts.size(), o.jobs, [&](std::size_t k) {
        const auto& job = jobs[k];
        if (job.skipped) return;
        const auto& inst = insts[k].file;
        const auto enc = encode(job.problem, job.scheme);
        const auto ising = qubo_to_ising(enc.model);
        ranges[k] = dynamic_range(ising, o.h_limit, o.J_limit);
        const auto limits = limits_of(o.solver);
        SampleSet samples;
        if (o.solver.solver == "exact") {
            const auto gs = ground_state(enc.model, limits);
            SampleMetadata meta{"exact", 0, {}};
            samples = SampleSet::from_records(enc.model, {gs}, meta);
        } else {
            SaConfig sa;
            sa.num_reads = o.solver.reads;
            sa.sweeps_per_read = o.solver.sweeps;
            sa.seed = derive_seed(derive_seed(o.seed, inst.c.num_products()), inst.seed);
            samples = o.normalize ? simulated_annealing(normalize(ising, o.h_limit, o.J_limit).first, sa)
                                  : simulated_annealing(enc.model, sa);
        }
        ObjectiveRange range;
        if (o.reference == "best-found") {
            range = best_found_range(job.problem, samples);
            reference_used[k] = "best-found";
        } else if (o.reference == "exact") {
            range = extremal_objective_values(job.problem, limits);
            reference_used[k] = "exact";
        } else {
            try {
                range = extremal_objective_values(job.problem, limits);
                reference_used[k] = "exact";
            } catch (const RuntimeFailure&) {
                range = best_found_range(job.problem, samples);
                reference_used[k] = "best-found";
            }
        }
        auto r = score_sample_set(job.problem, samples, range.f_min, range.f_max);
        r.instance_id = inst.id;
        r.scheme = job.label;
        results[k] = std::move(r);
        sample_sets[k] = std::make_shared<SampleSet>(std::move(samples));
    });

    std::vector<InstanceResult> rows;
    std::string dr = "instance_id,max_abs_h,max_abs_J,normalization,effective_scale\n";
    json refs = json::object();
    for (std::size_t k = 0; k < insts.size(); ++k) {
        if (!results[k]) continue;
        rows.push_back(*results[k]);
        const auto& d = ranges[k];
        const auto& id = insts[k].file.id;
        dr += id + "," + format_real(d.max_abs_h) + "," + format_real(d.max_abs_J) + "," +
              format_real(d.normalization) + "," + format_real(d.effective_scale) + "\n";
        refs[id] = reference_used[k];
        if (o.save_samples) {
            m.output(join(join(o.out, "samples"), id + ".csv"), io::sample_set_to_csv(*sample_sets[k]));
            m.output(join(join(o.out, "samples"), id + ".meta.json"),
                     io::sample_metadata_to_json(sample_sets[k]->metadata()));
        }
    }
    m.output(join(o.out, "results.csv"), io::results_to_csv(rows));
    m.output(join(o.out, "dynamic_range.csv"), dr);

    m.parameter("scheme", o.scheme);
    m.parameter("strengths_file", o.strengths_file ? json(*o.strengths_file) : json(nullptr));
    m.parameter("solver", o.solver.solver);
    m.parameter("reads", o.solver.reads);
    m.parameter("sweeps", o.solver.sweeps);
    m.parameter("max_enumerated", o.solver.max_enumerated);
    m.parameter("seed", o.seed);
    m.parameter("normalize", o.normalize);
    m.parameter("h_limit", o.h_limit);
    m.parameter("J_limit", o.J_limit);
    m.parameter("reference", o.reference);
    m.parameter("jobs", o.jobs);
    m.parameter("alpha2", {{"single", o.alpha2.single}, {"c1", o.alpha2.c1}, {"c2", o.alpha2.c2}, {"c3", o.alpha2.c3}});
    m.note("skipped_unconverged", skipped);
    m.note("reference_used", refs);
    m.write(join(o.out, "manifest.json"));
    for (const auto& id : skipped) std::cerr << "note: skipped unconverged instance " << id << "\n";
    std::cout << "scored " << rows.size() << " instance(s)\n";
    return kOk;
}

int cmd_calibrate(const CalibrateOptions& o, Manifest& m) {
    const auto grid = parse_grid(o.grid);
    if (o.sweep != "c1" && o.sweep != "c2" && o.sweep != "c3") throw InvalidArgument("--sweep must be c1, c2 or c3");
    const auto insts = require_instances(o.instances);
    record_inputs(m, insts);
    const bool four = insts.front().file.problem == io::ProblemKind::Four;
    for (const auto& i : insts) {
        if ((i.file.problem == io::ProblemKind::Four) != four) {
            throw InvalidArgument("calibrate needs instances of one problem kind");
        }
    }
    ensure_dir(o.out);
    std::vector<CalibrationInstance> cal(insts.size());
    const auto limits = limits_of(o.solver);
    parallel_for(insts.size(), o.jobs, [&](std::size_t k) {
        cal[k].id = insts[k].file.id;
        cal[k].problem = insts[k].file.build();
        cal[k].range = extremal_objective_values(cal[k].problem, limits);
    });
    const Alpha2Defaults a2 = o.alpha2;
    const std::string sweep = o.sweep;
    SchemeBuilder builder = [four, a2, sweep](const ConstrainedProblem& p, double alpha2) {
        PenaltyScheme s;
        for (const auto& c : p.constraints) {
            if (!four) {
                s[c.id] = {PenaltyMethod::QuadraticEquality, alpha2};
            } else if (c.id.rfind("C1", 0) == 0) {
                s[c.id] = {PenaltyMethod::QuadraticEquality, sweep == "c1" ? alpha2 : a2.c1};
            } else if (c.id.rfind("C2", 0) == 0) {
                s[c.id] = {PenaltyMethod::QuadraticSlack, sweep == "c2" ? alpha2 : a2.c2};
            } else {
                s[c.id] = {PenaltyMethod::QuadraticPairwise, sweep == "c3" ? alpha2 : a2.c3};
            }
        }
        return s;
    };
    SaConfig sa;
    sa.num_reads = o.solver.reads;
    sa.sweeps_per_read = o.solver.sweeps;
    sa.seed = o.seed;
    sa.num_threads = o.jobs;
    const auto table = calibration_sweep(cal, grid, builder, sa);

    std::string pts = "alpha2,s_ratio_mean,s_ratio_sem,s_ratio_p05,s_ratio_p95,F_mean,F_sem,F_p05,F_p95\n";
    for (const auto& p : table.points) {
        pts += format_real(p.alpha2);
        for (const auto* b : {&p.s_ratio, &p.F}) {
            pts += "," + format_real(b->mean) + "," + format_real(b->sem) + "," + format_real(b->p05) + "," +
                   format_real(b->p95);
        }
        pts += "\n";
    }
    std::string per = "instance_id,alpha2,S,F,S_max,excluded\n";
    for (const auto& row : table.instances) {
        for (std::size_t g = 0; g < grid.size(); ++g) {
            per += row.instance_id + "," + format_real(grid[g]) + "," + format_real(row.S[g]) + "," +
                   format_real(row.F[g]) + "," + format_real(row.S_max) + "," + (row.excluded ? "1" : "0") + "\n";
        }
    }
    m.output(join(o.out, "calibration.csv"), pts);
    m.output(join(o.out, "calibration_instances.csv"), per);
    json summary{{"instances", insts.size()}, {"excluded", table.excluded_ids}, {"grid", grid}, {"sweep", o.sweep}};
    m.output(join(o.out, "summary.json"), summary.dump(1) + "\n");
    m.parameter("grid", grid);
    m.parameter("sweep", o.sweep);
    m.parameter("reads", o.solver.reads);
    m.parameter("sweeps", o.solver.sweeps);
    m.parameter("max_enumerated", o.solver.max_enumerated);
    m.parameter("seed", o.seed);
    m.parameter("jobs", o.jobs);
    m.parameter("alpha2", {{"single", o.alpha2.single}, {"c1", o.alpha2.c1}, {"c2", o.alpha2.c2}, {"c3", o.alpha2.c3}});
    m.write(join(o.out, "manifest.json"));
    std::cout << "calibrated " << insts.size() << " instance(s) over " << grid.size() << " grid point(s)\n";
    return kOk;
}

int cmd_analyze(const AnalyzeOptions& o, Manifest& m) {
    if (o.results.size() != 2) throw InvalidArgument("--results takes exactly two files");
    if (!(o.bin_width > 0)) throw InvalidArgument("--bin-width must be positive");
    const auto a = io::results_from_csv(io::read_file(o.results[0]));
    const auto b = io::results_from_csv(io::read_file(o.results[1]));
    m.input(o.results[0]);
    m.input(o.results[1]);
    if (!o.allow_partial) {
        std::set<std::string> ia, ib;
        for (const auto& r : a) ia.insert(r.instance_id);
        for (const auto& r : b) ib.insert(r.instance_id);
        if (ia != ib) {
            std::vector<std::string> diff;
            std::set_symmetric_difference(ia.begin(), ia.end(), ib.begin(), ib.end(), std::back_inserter(diff));
            throw InvalidArgument("instance sets differ (" + std::to_string(diff.size()) + " id(s), first '" +
                                  diff.front() + "'); pass --allow-partial to compare the intersection");
        }
    }
    const auto cmp = compare_schemes(a, b);
    ensure_dir(o.out);
    m.output(join(o.out, "comparison.csv"), io::comparison_to_csv(cmp.records));
    std::string hist = "lower,upper,count\n";
    for (const auto& bin : histogram_deltas(cmp.records, o.bin_width)) {
        hist += format_real(bin.lower) + "," + format_real(bin.upper) + "," + std::to_string(bin.count) + "\n";
    }
    m.output(join(o.out, "histogram.csv"), hist);
    json summary{{"n_b", cmp.n_b}, {"n_w", cmp.n_w}, {"n_tie", cmp.n_tie}, {"n_incomparable", cmp.n_incomparable}};
    const bool refuse = o.sign_test && cmp.n_b + cmp.n_w == 0;
    if (o.sign_test && !refuse) {
        const auto st = sign_test_p(cmp.n_b, cmp.n_w);
        summary["sign_test"] = {{"p", st.p}, {"p_tilde", st.p_tilde}};
    } else {
        summary["sign_test"] = nullptr;
    }
    m.output(join(o.out, "summary.json"), summary.dump(1) + "\n");
    m.parameter("sign_test", o.sign_test);
    m.parameter("bin_width", o.bin_width);
    m.parameter("allow_partial", o.allow_partial);
    m.write(join(o.out, "manifest.json"));
    std::cout << "n_b=" << cmp.n_b << " n_w=" << cmp.n_w << " n_tie=" << cmp.n_tie
              << " n_incomparable=" << cmp.n_incomparable;
    if (summary["sign_test"].is_object()) {
        std::cout << " p=" << format_real(summary["sign_test"]["p"].get<double>())
                  << " p_tilde=" << format_real(summary["sign_test"]["p_tilde"].get<double>());
    }
    std::cout << "\n";
    if (refuse) {
        std::cerr << "error[runtime]: sign test undefined: no better or worse instances (n_b + n_w = 0)\n";
        return kRuntimeFailure;
    }
    return kOk;
}

}  // namespace cqubo::cli
