#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cli_support.hpp"
#include "commands.hpp"
#include "cqubo/error.hpp"
#include "cqubo/io.hpp"

namespace {

using namespace cqubo;
using namespace cqubo::cli;
namespace fs = std::filesystem;

const char* kEnvHelp =
    "Environment overrides (used when the flag is not given; the resolved value is recorded in the manifest):\n"
    "  CQUBO_SA_READS   default for --reads\n"
    "  CQUBO_SA_SWEEPS  default for --sweeps\n"
    "  CQUBO_JOBS       default for --jobs\n"
    "Exit codes: 0 success, 2 invalid arguments, 3 runtime failure.";

void add_solver(CLI::App* sub, SolverOptions& s, bool with_solver_choice) {
    if (with_solver_choice) sub->add_option("--solver", s.solver, "exact or sa")->capture_default_str();
    sub->add_option("--reads", s.reads, "SA reads")->capture_default_str();
    sub->add_option("--sweeps", s.sweeps, "SA sweeps per read")->capture_default_str();
    sub->add_option("--max-enumerated", s.max_enumerated, "exact solver variable cap")->capture_default_str();
}

void add_alpha2(CLI::App* sub, Alpha2Defaults& a) {
    sub->add_option("--alpha2", a.single, "quadratic strength, single-quarter C1")->capture_default_str();
    sub->add_option("--alpha2-c1", a.c1, "quadratic strength, four-quarter C1")->capture_default_str();
    sub->add_option("--alpha2-c2", a.c2, "quadratic strength, C2")->capture_default_str();
    sub->add_option("--alpha2-c3", a.c3, "quadratic strength, C3")->capture_default_str();
}

// Applies an environment default to an unset flag and records it in argv.
void env_default(CLI::App* sub, const char* flag, const char* env, std::size_t& value,
                 std::vector<std::string>& argv) {
    auto* opt = sub->get_option_no_throw(flag);
    if (!opt || opt->count() > 0) return;
    const std::size_t before = value;
    value = env_count(env, before);
    if (value != before || std::getenv(env)) {
        argv.push_back(flag);
        argv.push_back(std::to_string(value));
    }
}

int run_cli(std::vector<std::string> args);

int cmd_replay(const std::string& manifest_path, bool check) {
    nlohmann::json m;
    try {
        m = nlohmann::json::parse(io::read_file(manifest_path));
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument("manifest: " + std::string(e.what()));
    }
    const auto argv = m.at("argv").get<std::vector<std::string>>();
    if (argv.empty() || argv.front() == "replay") throw InvalidArgument("manifest has no replayable command");
    std::map<std::string, std::string> expected;
    for (const auto& o : m.at("outputs")) expected[o.at("path").get<std::string>()] = o.at("sha256").get<std::string>();
    const auto cwd = fs::current_path();
    if (m.contains("notes") && m["notes"].contains("cwd")) fs::current_path(m["notes"]["cwd"].get<std::string>());
    const int rc = run_cli(argv);
    if (rc != 0) {
        fs::current_path(cwd);
        return rc;
    }
    int status = kOk;
    if (check) {
        std::size_t same = 0;
        for (const auto& [path, digest] : expected) {
            const bool exists = fs::exists(path);
            const auto actual = exists ? sha256_hex(io::read_file(path)) : std::string();
            if (actual == digest) {
                ++same;
            } else {
                std::cerr << "error[runtime]: replay mismatch: " << path << "\n";
                status = kRuntimeFailure;
            }
        }
        std::cout << "replay: " << same << "/" << expected.size() << " output(s) identical\n";
    }
    fs::current_path(cwd);
    return status;
}

int run_cli(std::vector<std::string> args) {
    CLI::App app{"Constrained QUBO penalty toolkit", "cqubo"};
    app.footer(kEnvHelp);
    app.require_subcommand(1);
    app.set_version_flag("--version", CQUBO_VERSION);

    GenOptions gen;
    auto* g = app.add_subcommand("gen", "generate promotion-cannibalization instances");
    g->add_option("--problem", gen.problem, "single or four")->capture_default_str();
    g->add_option("--n-products", gen.n_products)->required();
    g->add_option("--min-connectivity", gen.min_connectivity)->required();
    g->add_option("--count", gen.count)->required();
    g->add_option("--seed", gen.seed, "first instance seed")->capture_default_str();
    g->add_option("--out", gen.out)->required();
    g->add_option("--A", gen.A, "target Hamming weight (default n/2 single, max(1, 2n/5) four)");
    g->add_option("--B-min", gen.B_min)->capture_default_str();
    g->add_option("--B-max", gen.B_max)->capture_default_str();
    g->add_option("--lambda", gen.lambda, "four quarter weights")->expected(4);

    TuneOptions tune;
    auto* t = app.add_subcommand("tune", "search linear penalty strengths per instance");
    t->add_option("--instances", tune.instances, "instance files or directories")->required();
    t->add_option("--scheme", tune.scheme, "single, all-linear, LQQL, QLLQ, any L/Q pattern, or scheme file")
        ->capture_default_str();
    add_solver(t, tune.solver, true);
    t->add_option("--max-iter-1", tune.search.max_iterations_1)->capture_default_str();
    t->add_option("--max-iter-2", tune.search.max_iterations_2)->capture_default_str();
    t->add_option("--initial-strength", tune.search.initial_strength)->capture_default_str();
    t->add_option("--initial-step", tune.search.initial_step)->capture_default_str();
    t->add_option("--phase2-step-scale", tune.search.phase2_step_scale)->capture_default_str();
    t->add_option("--phase2-decay", tune.search.phase2_decay)->capture_default_str();
    t->add_option("--resolution", tune.search.resolution, "bisection bracket width")->capture_default_str();
    t->add_flag("--window", tune.window, "bisect the feasible alpha1 window and draw from it (single, exact)");
    t->add_option("--window-resolution", tune.window_resolution)->capture_default_str();
    t->add_flag("--untied", tune.untied, "search mixed-pattern linear strengths independently");
    t->add_option("--seed", tune.seed)->capture_default_str();
    t->add_option("--jobs", tune.jobs)->capture_default_str();
    add_alpha2(t, tune.alpha2);
    t->add_option("--out", tune.out)->required();

    RunOptions run;
    auto* r = app.add_subcommand("run", "encode, sample and score instances");
    r->add_option("--instances", run.instances)->required();
    r->add_option("--scheme", run.scheme, "single, quadratic, all-linear, all-quadratic, L/Q pattern, or scheme file")
        ->capture_default_str();
    r->add_option("--strengths-file", run.strengths_file, "strengths.json from tune");
    run.solver.solver = "sa";
    add_solver(r, run.solver, true);
    r->add_option("--seed", run.seed)->capture_default_str();
    r->add_flag("--normalize", run.normalize, "sample the range-normalized Ising model");
    r->add_option("--h-limit", run.h_limit)->capture_default_str();
    r->add_option("--J-limit", run.J_limit)->capture_default_str();
    r->add_option("--reference", run.reference, "exact, best-found or auto")->capture_default_str();
    r->add_option("--jobs", run.jobs)->capture_default_str();
    r->add_flag("--save-samples", run.save_samples);
    add_alpha2(r, run.alpha2);
    r->add_option("--out", run.out)->required();

    CalibrateOptions cal;
    auto* c = app.add_subcommand("calibrate", "sweep a quadratic strength and report S/S_max and F");
    c->add_option("--instances", cal.instances)->required();
    c->add_option("--alpha2-grid", cal.grid, "start:stop:step or comma list")->capture_default_str();
    c->add_option("--sweep", cal.sweep, "constraint family swept on four-quarter instances")->capture_default_str();
    add_solver(c, cal.solver, false);
    c->add_option("--seed", cal.seed)->capture_default_str();
    c->add_option("--jobs", cal.jobs)->capture_default_str();
    add_alpha2(c, cal.alpha2);
    c->add_option("--out", cal.out)->required();

    AnalyzeOptions an;
    auto* a = app.add_subcommand("analyze", "compare two results tables");
    a->add_option("--results", an.results, "A.csv B.csv")->required()->expected(2);
    a->add_flag("--sign-test", an.sign_test);
    a->add_option("--bin-width", an.bin_width)->capture_default_str();
    a->add_flag("--allow-partial", an.allow_partial, "compare only the shared instance ids");
    a->add_option("--out", an.out)->required();

    std::string manifest_path;
    bool check = false;
    auto* rp = app.add_subcommand("replay", "re-run the command recorded in a manifest");
    rp->add_option("manifest", manifest_path)->required();
    rp->add_flag("--check", check, "compare output digests with the manifest");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        throw InvalidArgument(e.what());
    }

    std::vector<std::string> argv = args;
    auto manifest = [&](const char* name) {
        Manifest m(name, argv);
        m.note("cwd", fs::current_path().string());
        return m;
    };
    if (*g) {
        Manifest m = manifest("gen");
        return cmd_gen(gen, m);
    }
    if (*t) {
        env_default(t, "--reads", "CQUBO_SA_READS", tune.solver.reads, argv);
        env_default(t, "--sweeps", "CQUBO_SA_SWEEPS", tune.solver.sweeps, argv);
        env_default(t, "--jobs", "CQUBO_JOBS", tune.jobs, argv);
        Manifest m = manifest("tune");
        return cmd_tune(tune, m);
    }
    if (*r) {
        env_default(r, "--reads", "CQUBO_SA_READS", run.solver.reads, argv);
        env_default(r, "--sweeps", "CQUBO_SA_SWEEPS", run.solver.sweeps, argv);
        env_default(r, "--jobs", "CQUBO_JOBS", run.jobs, argv);
        Manifest m = manifest("run");
        return cmd_run(run, m);
    }
    if (*c) {
        env_default(c, "--reads", "CQUBO_SA_READS", cal.solver.reads, argv);
        env_default(c, "--sweeps", "CQUBO_SA_SWEEPS", cal.solver.sweeps, argv);
        env_default(c, "--jobs", "CQUBO_JOBS", cal.jobs, argv);
        Manifest m = manifest("calibrate");
        return cmd_calibrate(cal, m);
    }
    if (*a) {
        Manifest m = manifest("analyze");
        return cmd_analyze(an, m);
    }
    return cmd_replay(manifest_path, check);
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        return run_cli(args);
    } catch (const InvalidArgument& e) {
        std::cerr << "error[invalid-argument]: " << e.what() << "\n";
        return kInvalidArgument;
    } catch (const RuntimeFailure& e) {
        std::cerr << "error[runtime]: " << e.what() << "\n";
        return kRuntimeFailure;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error[invalid-argument]: " << e.what() << "\n";
        return kInvalidArgument;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "error[runtime]: " << e.what() << "\n";
        return kRuntimeFailure;
    } catch (const std::exception& e) {
        std::cerr << "error[runtime]: " << e.what() << "\n";
        return kRuntimeFailure;
    }
}
