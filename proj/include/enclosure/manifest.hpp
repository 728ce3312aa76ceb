#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace enclosure::cli {

inline constexpr const char* kVersionString = "enclosure 0.1.0";

/// Run manifest: config digest, solver stats, and a digest inventory of every
/// file the run wrote.
class RunManifest {
  public:
    explicit RunManifest(const std::string& config_text);

    void set_solver_stats(int steps, double cfl_ratio, double max_field);
    void set_config_facts(const nlohmann::json& facts);
    void set_result(const nlohmann::json& result);

    /// Registers a file (path relative to the output directory); reads it to
    /// record byte count and content digest.
    void add_file(const std::string& output_dir, const std::string& relative_path);

    const nlohmann::json& json() const { return doc_; }
    void write(const std::string& path) const;
    static nlohmann::json read(const std::string& path);

  private:
    nlohmann::json doc_;
};

}  // namespace enclosure::cli
