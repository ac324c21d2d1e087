#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cqubo/io.hpp"

namespace cqubo::cli {

enum ExitCode : int { kOk = 0, kInvalidArgument = 2, kRuntimeFailure = 3 };

std::string sha256_hex(const std::string& bytes);

// Loads instance files from any mix of files and directories (every *.json in
// a directory except manifest.json), sorted by instance id with numeric
// fields compared as numbers.
struct LoadedInstance {
    std::string path;
    io::InstanceFile file;
};
std::vector<LoadedInstance> load_instances(const std::vector<std::string>& paths);

bool instance_id_less(const std::string& a, const std::string& b);

// Runs fn(k) for k in [0, count) on up to `jobs` threads.
void parallel_for(std::size_t count, std::size_t jobs, const std::function<void(std::size_t)>& fn);

// Reads an unsigned default from the environment, falling back when unset.
std::size_t env_count(const char* name, std::size_t fallback);

class Manifest {
public:
    Manifest(std::string command, std::vector<std::string> argv);

    void parameter(const std::string& key, nlohmann::json value) { params_[key] = std::move(value); }
    void input(const std::string& path);
    // Writes the file and records its digest.
    void output(const std::string& path, const std::string& content);
    void note(const std::string& key, nlohmann::json value) { notes_[key] = std::move(value); }
    void write(const std::string& path) const;

private:
    std::string command_;
    std::vector<std::string> argv_;
    nlohmann::json params_ = nlohmann::json::object();
    nlohmann::json inputs_ = nlohmann::json::array();
    nlohmann::json outputs_ = nlohmann::json::array();
    nlohmann::json notes_ = nlohmann::json::object();
    std::chrono::steady_clock::time_point start_;
    std::string started_at_;
};

}  // namespace cqubo::cli
