#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cli_support.hpp"

namespace cqubo::cli {

// Default quadratic strengths for the four-quarter constraint families and
// for the single-quarter C1 constraint.
struct Alpha2Defaults {
    double single = 1.2;
    double c1 = 2.4;
    double c2 = 0.6;
    double c3 = 1.2;
};

struct GenOptions {
    std::string problem = "single";
    Index n_products = 0;
    Index min_connectivity = 0;
    std::size_t count = 0;
    std::uint64_t seed = 0;
    std::string out;
    std::optional<Index> A;
    Index B_min = 1;
    Index B_max = 2;
    std::vector<double> lambda{1.5, 1.0, 1.0, 1.5};
};

struct SolverOptions {
    std::string solver = "exact";
    std::size_t reads = 1000;
    std::size_t sweeps = 1000;
    std::size_t max_enumerated = 26;
};

struct TuneOptions {
    std::vector<std::string> instances;
    std::string scheme = "single";
    SolverOptions solver;
    SearchConfig search;
    bool window = false;
    double window_resolution = 1e-6;
    bool untied = false;
    std::uint64_t seed = 0;
    std::size_t jobs = 1;
    Alpha2Defaults alpha2;
    std::string out;
};

struct RunOptions {
    std::vector<std::string> instances;
    std::string scheme = "single";
    std::optional<std::string> strengths_file;
    SolverOptions solver;
    std::uint64_t seed = 0;
    bool normalize = false;
    double h_limit = kDefaultHLimit;
    double J_limit = kDefaultJLimit;
    // exact, best-found, or auto (exact when enumerable).
    std::string reference = "exact";
    std::size_t jobs = 1;
    bool save_samples = false;
    Alpha2Defaults alpha2;
    std::string out;
};

struct CalibrateOptions {
    std::vector<std::string> instances;
    std::string grid = "0.2:3.0:0.2";
    std::string sweep = "c1";
    SolverOptions solver;
    std::uint64_t seed = 0;
    std::size_t jobs = 1;
    Alpha2Defaults alpha2;
    std::string out;
};

struct AnalyzeOptions {
    std::vector<std::string> results;
    bool sign_test = false;
    double bin_width = 0.125;
    bool allow_partial = false;
    std::string out;
};

// Each returns a process exit code and writes out/manifest.json.
int cmd_gen(const GenOptions& o, Manifest& m);
int cmd_tune(const TuneOptions& o, Manifest& m);
int cmd_run(const RunOptions& o, Manifest& m);
int cmd_calibrate(const CalibrateOptions& o, Manifest& m);
int cmd_analyze(const AnalyzeOptions& o, Manifest& m);

std::vector<double> parse_grid(const std::string& text);

}  // namespace cqubo::cli
