#include "cli_support.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cstdlib>
#include <ctime>
#include <exception>
#include <filesystem>
#include <mutex>
#include <thread>

#include <openssl/evp.h>

#include "cqubo/error.hpp"

namespace cqubo::cli {

namespace fs = std::filesystem;

std::string sha256_hex(const std::string& bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw RuntimeFailure("SHA-256 digest failed");
    }
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xF];
    }
    return out;
}

bool instance_id_less(const std::string& a, const std::string& b) {
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (std::isdigit(static_cast<unsigned char>(a[i])) && std::isdigit(static_cast<unsigned char>(b[j]))) {
            std::size_t ie = i, je = j;
            while (ie < a.size() && std::isdigit(static_cast<unsigned char>(a[ie]))) ++ie;
            while (je < b.size() && std::isdigit(static_cast<unsigned char>(b[je]))) ++je;
            const auto na = a.substr(i, ie - i), nb = b.substr(j, je - j);
            const auto ta = na.substr(std::min(na.find_first_not_of('0'), na.size()));
            const auto tb = nb.substr(std::min(nb.find_first_not_of('0'), nb.size()));
            if (ta.size() != tb.size()) return ta.size() < tb.size();
            if (ta != tb) return ta < tb;
            i = ie;
            j = je;
        } else {
            if (a[i] != b[j]) return a[i] < b[j];
            ++i;
            ++j;
        }
    }
    if (a.size() - i != b.size() - j) return a.size() - i < b.size() - j;
    return a < b;
}

std::vector<LoadedInstance> load_instances(const std::vector<std::string>& paths) {
    std::vector<std::string> files;
    for (const auto& p : paths) {
        if (fs::is_directory(p)) {
            for (const auto& e : fs::directory_iterator(p)) {
                if (e.is_regular_file() && e.path().extension() == ".json" && e.path().filename() != "manifest.json") {
                    files.push_back(e.path().string());
                }
            }
        } else if (fs::exists(p)) {
            files.push_back(p);
        } else {
            throw InvalidArgument("instance path '" + p + "' does not exist");
        }
    }
    std::vector<LoadedInstance> out;
    for (const auto& f : files) out.push_back({f, io::instance_from_json(io::read_file(f))});
    std::sort(out.begin(), out.end(),
              [](const LoadedInstance& a, const LoadedInstance& b) { return instance_id_less(a.file.id, b.file.id); });
    for (std::size_t k = 1; k < out.size(); ++k) {
        if (out[k].file.id == out[k - 1].file.id) throw InvalidArgument("duplicate instance id '" + out[k].file.id + "'");
    }
    return out;
}

void parallel_for(std::size_t count, std::size_t jobs, const std::function<void(std::size_t)>& fn) {
    jobs = std::max<std::size_t>(1, std::min(jobs, count));
    if (jobs == 1) {
        for (std::size_t k = 0; k < count; ++k) fn(k);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < jobs; ++t) {
            pool.emplace_back([&] {
                for (std::size_t k = next++; k < count; k = next++) {
                    try {
                        fn(k);
                    } catch (...) {
                        std::lock_guard lock(failure_mutex);
                        if (!failure) failure = std::current_exception();
                        next = count;
                    }
                }
            });
        }
    }
    if (failure) std::rethrow_exception(failure);
}

std::size_t env_count(const char* name, std::size_t fallback) {
    const char* v = std::getenv(name);
    if (!v || !*v) return fallback;
    char* end = nullptr;
    const unsigned long long parsed = std::strtoull(v, &end, 10);
    if (*end != '\0' || parsed == 0) {
        throw InvalidArgument(std::string("environment variable ") + name + " must be a positive integer");
    }
    return static_cast<std::size_t>(parsed);
}

Manifest::Manifest(std::string command, std::vector<std::string> argv)
    : command_(std::move(command)), argv_(std::move(argv)), start_(std::chrono::steady_clock::now()) {
    const std::time_t now = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    started_at_ = buf;
}

void Manifest::input(const std::string& path) {
    inputs_.push_back({{"path", path}, {"sha256", sha256_hex(io::read_file(path))}});
}

void Manifest::output(const std::string& path, const std::string& content) {
    io::write_file(path, content);
    outputs_.push_back({{"path", path}, {"sha256", sha256_hex(content)}});
}

void Manifest::write(const std::string& path) const {
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    nlohmann::json j{{"command", command_},
                     {"argv", argv_},
                     {"parameters", params_},
                     {"toolkit_version", CQUBO_VERSION},
                     {"inputs", inputs_},
                     {"outputs", outputs_},
                     {"started_at", started_at_},
                     {"wall_clock_seconds", wall}};
    if (!notes_.empty()) j["notes"] = notes_;
    io::write_file(path, j.dump(1) + "\n");
}

}  // namespace cqubo::cli
