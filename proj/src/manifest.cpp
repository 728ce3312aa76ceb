#include "enclosure/manifest.hpp"

#include <ctime>
#include <filesystem>
#include <fstream>

#include "enclosure/errors.hpp"
#include "enclosure/trace_io.hpp"

namespace enclosure::cli {

namespace {
std::string utc_now() {
    std::time_t t = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}
}  // namespace

RunManifest::RunManifest(const std::string& config_text) {
    doc_["version"] = kVersionString;
    doc_["created_utc"] = utc_now();
    doc_["config_digest"] = io::digest_bytes(config_text.data(), config_text.size());
    doc_["files"] = nlohmann::json::array();
}

void RunManifest::set_solver_stats(int steps, double cfl_ratio, double max_field) {
    doc_["solver"] = {{"steps", steps}, {"cfl_ratio", cfl_ratio}, {"max_field", max_field}};
}

void RunManifest::set_config_facts(const nlohmann::json& facts) { doc_["config"] = facts; }

void RunManifest::set_result(const nlohmann::json& result) { doc_["result"] = result; }

void RunManifest::add_file(const std::string& output_dir, const std::string& relative_path) {
    const std::filesystem::path full = std::filesystem::path(output_dir) / relative_path;
    doc_["files"].push_back({{"path", relative_path},
                             {"bytes", std::filesystem::file_size(full)},
                             {"digest", io::digest_file(full.string())}});
}

void RunManifest::write(const std::string& path) const {
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot open manifest for writing: " + path);
    os << doc_.dump(2) << "\n";
    if (!os) throw ConfigError("short write to manifest: " + path);
}

nlohmann::json RunManifest::read(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open manifest: " + path);
    nlohmann::json doc;
    is >> doc;
    return doc;
}

}  // namespace enclosure::cli
