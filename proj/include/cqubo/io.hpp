#pragma once

// File formats: models, instances, schemes and traces are JSON (traces as
// JSON lines); sample sets, results and comparisons are CSV.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cqubo/metrics.hpp"
#include "cqubo/model.hpp"
#include "cqubo/penalties.hpp"
#include "cqubo/problems.hpp"
#include "cqubo/search.hpp"
#include "cqubo/solvers.hpp"

namespace cqubo::io {

// Shortest decimal form that reads back to the same double.
std::string format_real(double v);

std::string model_to_json(const QuboModel& m);
std::string model_to_json(const IsingModel& m);
QuboModel qubo_from_json(const std::string& text);
IsingModel ising_from_json(const std::string& text);

enum class ProblemKind { Single, Four };

struct InstanceFile {
    std::string id;
    ProblemKind problem = ProblemKind::Single;
    CannibalizationMatrix c;
    Index A = 0;
    // Four-quarter only.
    Index B_min = 1;
    Index B_max = 2;
    std::array<double, 4> lambda{1.5, 1.0, 1.0, 1.5};
    std::uint64_t seed = 0;
    Index min_connectivity = 0;

    ConstrainedProblem build() const;
};

std::string instance_to_json(const InstanceFile& inst);
InstanceFile instance_from_json(const std::string& text);

// Either a JSON array of {constraint_id, method, strength} or a bare
// quarter shorthand such as "LQQL" (JSON string or plain text). Shorthand
// strengths: alpha1 from `shorthand_alpha1` (one per 'L'), alpha2 for C1 'Q'
// quarters from `shorthand_alpha2`; other constraints are left unassigned.
struct SchemeSpec {
    PenaltyScheme explicit_scheme;
    std::optional<std::string> shorthand;
};
SchemeSpec parse_scheme(const std::string& text);
std::string scheme_to_json(const PenaltyScheme& scheme);

std::string trace_to_jsonl(const std::vector<SearchStep>& trace);
std::vector<SearchStep> trace_from_jsonl(const std::string& text);

std::string sample_set_to_csv(const SampleSet& s);
std::string sample_metadata_to_json(const SampleMetadata& m);
// Energies are re-evaluated against `model` and must match the file.
SampleSet sample_set_from_csv(const QuboModel& model, const std::string& csv, const std::string& metadata_json);

std::string results_to_csv(const std::vector<InstanceResult>& rows);
std::vector<InstanceResult> results_from_csv(const std::string& csv);

std::string comparison_to_csv(const std::vector<ComparisonRecord>& rows);
std::vector<ComparisonRecord> comparison_from_csv(const std::string& csv);

std::string read_file(const std::string& path);
// Writes atomically via a temporary sibling file.
void write_file(const std::string& path, const std::string& content);

}  // namespace cqubo::io
