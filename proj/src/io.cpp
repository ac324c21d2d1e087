#include "cqubo/io.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cqubo/error.hpp"

namespace cqubo::io {

using nlohmann::json;

std::string format_real(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

namespace {

json parse_json(const std::string& text, const char* what) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw InvalidArgument(std::string("malformed ") + what + ": " + e.what());
    }
}

template <class T>
T field(const json& j, const char* key, const char* what) {
    if (!j.contains(key)) throw InvalidArgument(std::string(what) + " is missing '" + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw InvalidArgument(std::string(what) + " field '" + key + "': " + e.what());
    }
}

template <class Domain>
std::string model_json(const QuadraticModel<Domain>& m) {
    json j;
    j["n"] = m.num_variables();
    j["linear"] = json::array();
    for (const auto& [i, v] : m.linear_terms()) j["linear"].push_back({i, v});
    j["quadratic"] = json::array();
    for (const auto& [p, v] : m.quadratic_terms()) j["quadratic"].push_back({p.first, p.second, v});
    j["offset"] = m.offset();
    return j.dump();
}

template <class Domain>
QuadraticModel<Domain> model_from(const std::string& text) {
    const json j = parse_json(text, "model");
    QuadraticModel<Domain> m(field<Index>(j, "n", "model"));
    try {
        for (const auto& t : j.at("linear")) m.add_linear(t.at(0).get<Index>(), t.at(1).get<double>());
        for (const auto& t : j.at("quadratic"))
            m.add_quadratic(t.at(0).get<Index>(), t.at(1).get<Index>(), t.at(2).get<double>());
    } catch (const json::exception& e) {
        throw InvalidArgument(std::string("model terms: ") + e.what());
    }
    m.set_offset(field<double>(j, "offset", "model"));
    return m;
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream ss(line);
    while (std::getline(ss, cur, sep)) out.push_back(cur);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

std::vector<std::vector<std::string>> read_csv(const std::string& csv, const std::vector<std::string>& header,
                                               const char* what) {
    std::istringstream in(csv);
    std::string line;
    if (!std::getline(in, line)) throw InvalidArgument(std::string(what) + " is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (split(line, ',') != header) throw InvalidArgument(std::string(what) + " has an unexpected header");
    std::vector<std::vector<std::string>> rows;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto cells = split(line, ',');
        if (cells.size() != header.size()) throw InvalidArgument(std::string(what) + " row has wrong column count");
        rows.push_back(std::move(cells));
    }
    return rows;
}

double parse_real(const std::string& s) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw InvalidArgument("bad number '" + s + "'");
    return v;
}

std::optional<double> parse_optional(const std::string& s) {
    if (s.empty()) return std::nullopt;
    return parse_real(s);
}

std::size_t parse_count(const std::string& s) {
    std::size_t v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw InvalidArgument("bad count '" + s + "'");
    return v;
}

std::string optional_cell(const std::optional<double>& v) { return v ? format_real(*v) : std::string(); }

}  // namespace

std::string model_to_json(const QuboModel& m) { return model_json(m); }
std::string model_to_json(const IsingModel& m) { return model_json(m); }
QuboModel qubo_from_json(const std::string& text) { return model_from<BinaryTag>(text); }
IsingModel ising_from_json(const std::string& text) { return model_from<SpinTag>(text); }

ConstrainedProblem InstanceFile::build() const {
    if (problem == ProblemKind::Single) return build_single_quarter({c, A});
    return build_four_quarter({c, A, B_min, B_max, lambda});
}

std::string instance_to_json(const InstanceFile& inst) {
    json j;
    j["id"] = inst.id;
    j["n_p"] = inst.c.num_products();
    j["entries"] = json::array();
    for (const auto& [p, v] : inst.c.entries()) j["entries"].push_back({p.first, p.second, v});
    const bool four = inst.problem == ProblemKind::Four;
    j["problem"] = four ? "four" : "single";
    j["A"] = inst.A;
    j["B_min"] = four ? json(inst.B_min) : json(nullptr);
    j["B_max"] = four ? json(inst.B_max) : json(nullptr);
    j["lambda"] = four ? json(inst.lambda) : json(nullptr);
    j["seed"] = inst.seed;
    j["min_connectivity"] = inst.min_connectivity;
    return j.dump(1) + "\n";
}

InstanceFile instance_from_json(const std::string& text) {
    const json j = parse_json(text, "instance");
    InstanceFile inst;
    inst.id = field<std::string>(j, "id", "instance");
    const auto kind = field<std::string>(j, "problem", "instance");
    if (kind == "single")
        inst.problem = ProblemKind::Single;
    else if (kind == "four")
        inst.problem = ProblemKind::Four;
    else
        throw InvalidArgument("instance problem must be 'single' or 'four', got '" + kind + "'");
    inst.c = CannibalizationMatrix(field<Index>(j, "n_p", "instance"));
    try {
        for (const auto& e : j.at("entries")) inst.c.set(e.at(0).get<Index>(), e.at(1).get<Index>(), e.at(2).get<double>());
    } catch (const json::exception& e) {
        throw InvalidArgument(std::string("instance entries: ") + e.what());
    }
    inst.A = field<Index>(j, "A", "instance");
    if (inst.problem == ProblemKind::Four) {
        inst.B_min = field<Index>(j, "B_min", "instance");
        inst.B_max = field<Index>(j, "B_max", "instance");
        inst.lambda = field<std::array<double, 4>>(j, "lambda", "instance");
    }
    inst.seed = field<std::uint64_t>(j, "seed", "instance");
    inst.min_connectivity = field<Index>(j, "min_connectivity", "instance");
    return inst;
}

SchemeSpec parse_scheme(const std::string& text) {
    SchemeSpec spec;
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) throw InvalidArgument("scheme is empty");
    if (text[first] != '[' && text[first] != '"') {
        const auto last = text.find_last_not_of(" \t\r\n");
        spec.shorthand = text.substr(first, last - first + 1);
        return spec;
    }
    const json j = parse_json(text, "scheme");
    if (j.is_string()) {
        spec.shorthand = j.get<std::string>();
        return spec;
    }
    for (const auto& e : j) {
        const auto id = field<std::string>(e, "constraint_id", "scheme entry");
        const auto method = parse_penalty_method(field<std::string>(e, "method", "scheme entry"));
        const auto strength = field<double>(e, "strength", "scheme entry");
        if (!spec.explicit_scheme.emplace(id, PenaltyAssignment{method, strength}).second) {
            throw InvalidArgument("scheme lists constraint '" + id + "' twice");
        }
    }
    return spec;
}

std::string scheme_to_json(const PenaltyScheme& scheme) {
    json j = json::array();
    for (const auto& [id, a] : scheme) {
        j.push_back({{"constraint_id", id}, {"method", std::string(to_string(a.method))}, {"strength", a.strength}});
    }
    return j.dump(1) + "\n";
}

std::string trace_to_jsonl(const std::vector<SearchStep>& trace) {
    std::string out;
    for (const auto& s : trace) {
        json j{{"phase", s.phase}, {"strengths", s.strengths}, {"weights", s.weights}, {"step", s.step}};
        out += j.dump();
        out += '\n';
    }
    return out;
}

std::vector<SearchStep> trace_from_jsonl(const std::string& text) {
    std::vector<SearchStep> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const json j = parse_json(line, "trace line");
        out.push_back({field<int>(j, "phase", "trace"), field<std::vector<double>>(j, "strengths", "trace"),
                       field<std::vector<std::size_t>>(j, "weights", "trace"), field<double>(j, "step", "trace")});
    }
    return out;
}

std::string sample_set_to_csv(const SampleSet& s) {
    std::string out = "assignment,energy,multiplicity\n";
    for (const auto& r : s.records()) {
        for (auto b : r.assignment) out += b ? '1' : '0';
        out += ',' + format_real(r.energy) + ',' + std::to_string(r.multiplicity) + '\n';
    }
    return out;
}

std::string sample_metadata_to_json(const SampleMetadata& m) {
    json j{{"solver", m.solver}, {"seed", m.seed}, {"parameters", m.parameters}};
    return j.dump(1) + "\n";
}

SampleSet sample_set_from_csv(const QuboModel& model, const std::string& csv, const std::string& metadata_json) {
    const json mj = parse_json(metadata_json, "sample metadata");
    SampleMetadata meta{field<std::string>(mj, "solver", "sample metadata"),
                        field<std::uint64_t>(mj, "seed", "sample metadata"),
                        field<std::map<std::string, double>>(mj, "parameters", "sample metadata")};
    std::vector<SampleRecord> records;
    for (const auto& row : read_csv(csv, {"assignment", "energy", "multiplicity"}, "sample CSV")) {
        SampleRecord r;
        for (char c : row[0]) {
            if (c != '0' && c != '1') throw InvalidArgument("assignment must be a bitstring");
            r.assignment.push_back(static_cast<std::uint8_t>(c - '0'));
        }
        r.energy = parse_real(row[1]);
        r.multiplicity = parse_count(row[2]);
        records.push_back(std::move(r));
    }
    return SampleSet::from_records(model, std::move(records), std::move(meta));
}

std::string results_to_csv(const std::vector<InstanceResult>& rows) {
    std::string out = "instance_id,scheme,S,F,best_R,best_feasible_objective,f_min,f_max\n";
    for (const auto& r : rows) {
        out += r.instance_id + ',' + r.scheme + ',' + format_real(r.S) + ',' + format_real(r.F) + ',' +
               optional_cell(r.best_R) + ',' + optional_cell(r.best_feasible_objective) + ',' + format_real(r.f_min) +
               ',' + format_real(r.f_max) + '\n';
    }
    return out;
}

std::vector<InstanceResult> results_from_csv(const std::string& csv) {
    std::vector<InstanceResult> out;
    const std::vector<std::string> header{"instance_id", "scheme", "S", "F", "best_R", "best_feasible_objective",
                                          "f_min", "f_max"};
    for (const auto& row : read_csv(csv, header, "results CSV")) {
        InstanceResult r;
        r.instance_id = row[0];
        r.scheme = row[1];
        r.S = parse_real(row[2]);
        r.F = parse_real(row[3]);
        r.best_R = parse_optional(row[4]);
        r.best_feasible_objective = parse_optional(row[5]);
        r.f_min = parse_real(row[6]);
        r.f_max = parse_real(row[7]);
        out.push_back(std::move(r));
    }
    return out;
}

std::string comparison_to_csv(const std::vector<ComparisonRecord>& rows) {
    std::string out = "instance_id,delta_objective,classification\n";
    for (const auto& r : rows) {
        out += r.instance_id + ',' + optional_cell(r.delta_objective) + ',' + std::string(to_string(r.classification)) +
               '\n';
    }
    return out;
}

std::vector<ComparisonRecord> comparison_from_csv(const std::string& csv) {
    std::vector<ComparisonRecord> out;
    for (const auto& row : read_csv(csv, {"instance_id", "delta_objective", "classification"}, "comparison CSV")) {
        out.push_back({row[0], parse_optional(row[1]), parse_classification(row[2])});
    }
    return out;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidArgument("cannot open '" + path + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    const std::filesystem::path target(path);
    auto tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw RuntimeFailure("cannot open '" + tmp.string() + "' for writing");
        out << content;
        if (!out.flush()) throw RuntimeFailure("failed writing '" + tmp.string() + "'");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, target, ec);
    if (ec) throw RuntimeFailure("cannot move '" + tmp.string() + "' to '" + path + "': " + ec.message());
}

}  // namespace cqubo::io
