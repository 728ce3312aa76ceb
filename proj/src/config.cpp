#include "enclosure/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "enclosure/errors.hpp"
#include "enclosure/reference_field.hpp"

namespace enclosure::cli {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<double> parse_numbers(const std::string& value, const std::string& key) {
    std::vector<double> out;
    std::string item;
    std::istringstream is(value);
    while (std::getline(is, item, ',')) {
        item = trim(item);
        if (item.empty()) throw ConfigError("empty number in key '" + key + "'");
        char* end = nullptr;
        const double v = std::strtod(item.c_str(), &end);
        if (end == item.c_str() || *end != '\0')
            throw ConfigError("bad number '" + item + "' in key '" + key + "'");
        out.push_back(v);
    }
    return out;
}

Vec3 parse_vec3(const std::string& value, const std::string& key) {
    const std::vector<double> v = parse_numbers(value, key);
    if (v.size() != 3) throw ConfigError("key '" + key + "' needs three numbers x,y,z");
    return {v[0], v[1], v[2]};
}

class KeyMap {
  public:
    explicit KeyMap(const std::string& text) {
        std::istringstream is(text);
        std::string line;
        int lineno = 0;
        while (std::getline(is, line)) {
            ++lineno;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line = line.substr(0, hash);
            line = trim(line);
            if (line.empty()) continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
            const std::string key = trim(line.substr(0, eq));
            const std::string value = trim(line.substr(eq + 1));
            if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
            if (!map_.emplace(key, value).second)
                throw ConfigError("duplicate key '" + key + "'");
        }
    }

    std::optional<std::string> take(const std::string& key) {
        auto it = map_.find(key);
        if (it == map_.end()) return std::nullopt;
        std::string v = it->second;
        map_.erase(it);
        return v;
    }

    void require_empty() const {
        if (map_.empty()) return;
        std::ostringstream os;
        os << "unknown config key(s):";
        for (const auto& [k, v] : map_) os << " '" << k << "'";
        throw ConfigError(os.str());
    }

  private:
    std::map<std::string, std::string> map_;
};

geom::Domain parse_domain(KeyMap& keys, const std::string& prefix) {
    const auto shape = keys.take(prefix + ".shape");
    if (!shape) throw ConfigError("missing key '" + prefix + ".shape'");
    if (*shape == "ball") {
        const auto center = keys.take(prefix + ".center");
        const auto radius = keys.take(prefix + ".radius");
        if (!center || !radius)
            throw ConfigError(prefix + ": ball needs '.center' and '.radius'");
        return geom::Domain(geom::Ball{parse_vec3(*center, prefix + ".center"),
                                       parse_numbers(*radius, prefix + ".radius").at(0)});
    }
    if (*shape == "box") {
        const auto lo = keys.take(prefix + ".min");
        const auto hi = keys.take(prefix + ".max");
        if (!lo || !hi) throw ConfigError(prefix + ": box needs '.min' and '.max'");
        return geom::Domain(geom::Box{parse_vec3(*lo, prefix + ".min"),
                                      parse_vec3(*hi, prefix + ".max")});
    }
    if (*shape == "balls") {
        const auto spec = keys.take(prefix + ".balls");
        if (!spec) throw ConfigError(prefix + ": union needs '.balls'");
        std::vector<geom::Ball> balls;
        std::istringstream is(*spec);
        std::string member;
        while (std::getline(is, member, ';')) {
            member = trim(member);
            if (member.empty()) continue;
            const std::vector<double> v = parse_numbers(member, prefix + ".balls");
            if (v.size() != 4)
                throw ConfigError(prefix + ".balls: each member needs cx,cy,cz,r");
            balls.push_back({{v[0], v[1], v[2]}, v[3]});
        }
        return geom::Domain(std::move(balls));
    }
    throw ConfigError(prefix + ".shape must be ball, box, or balls");
}

double take_number(KeyMap& keys, const std::string& key, double fallback) {
    const auto v = keys.take(key);
    if (!v) return fallback;
    return parse_numbers(*v, key).at(0);
}

long take_integer(KeyMap& keys, const std::string& key, long fallback) {
    const auto v = keys.take(key);
    if (!v) return fallback;
    const double d = parse_numbers(*v, key).at(0);
    if (d != std::floor(d)) throw ConfigError("key '" + key + "' must be an integer");
    return static_cast<long>(d);
}

ExperimentConfig build(KeyMap& keys, const std::string& raw_text) {
    ExperimentConfig cfg;
    cfg.raw_text = raw_text;

    cfg.omega = parse_domain(keys, "omega");
    if (auto shape = keys.take("obstacle.shape")) {
        if (*shape != "none") {
            // Re-insert via a tiny sub-map is awkward; parse inline instead.
            if (*shape == "ball") {
                const auto center = keys.take("obstacle.center");
                const auto radius = keys.take("obstacle.radius");
                if (!center || !radius)
                    throw ConfigError("obstacle: ball needs '.center' and '.radius'");
                cfg.obstacle = geom::Domain(
                    geom::Ball{parse_vec3(*center, "obstacle.center"),
                               parse_numbers(*radius, "obstacle.radius").at(0)});
            } else if (*shape == "balls") {
                const auto spec = keys.take("obstacle.balls");
                if (!spec) throw ConfigError("obstacle: union needs '.balls'");
                std::vector<geom::Ball> balls;
                std::istringstream is(*spec);
                std::string member;
                while (std::getline(is, member, ';')) {
                    member = trim(member);
                    if (member.empty()) continue;
                    const std::vector<double> v = parse_numbers(member, "obstacle.balls");
                    if (v.size() != 4)
                        throw ConfigError("obstacle.balls: each member needs cx,cy,cz,r");
                    balls.push_back({{v[0], v[1], v[2]}, v[3]});
                }
                cfg.obstacle = geom::Domain(std::move(balls));
            } else {
                throw ConfigError("obstacle.shape must be ball, balls, or none");
            }
        }
    }

    const auto pc = keys.take("pulse.center");
    const auto pr = keys.take("pulse.radius");
    if (!pc || !pr) throw ConfigError("missing 'pulse.center' / 'pulse.radius'");
    cfg.pulse.center = parse_vec3(*pc, "pulse.center");
    cfg.pulse.radius = parse_numbers(*pr, "pulse.radius").at(0);
    if (!(cfg.pulse.radius > 0.0)) throw ConfigError("pulse.radius must be positive");

    const auto horizon = keys.take("horizon");
    if (!horizon) throw ConfigError("missing 'horizon'");
    cfg.horizon = parse_numbers(*horizon, "horizon").at(0);
    if (!(cfg.horizon > 0.0)) throw ConfigError("horizon must be positive");

    cfg.tau_min = take_number(keys, "tau.min", cfg.tau_min);
    cfg.tau_max = take_number(keys, "tau.max", cfg.tau_max);
    cfg.tau_count = static_cast<int>(take_integer(keys, "tau.count", cfg.tau_count));
    if (auto spacing = keys.take("tau.spacing")) {
        if (*spacing == "log") cfg.tau_log = true;
        else if (*spacing == "linear") cfg.tau_log = false;
        else throw ConfigError("tau.spacing must be log or linear");
    }
    cfg.resolution = static_cast<int>(take_integer(keys, "resolution", cfg.resolution));
    cfg.surface_order = static_cast<int>(take_integer(keys, "surface_order", cfg.surface_order));
    cfg.seed = take_integer(keys, "seed", cfg.seed);
    if (auto dir = keys.take("output_dir")) cfg.output_dir = *dir;
    cfg.threads = static_cast<int>(take_integer(keys, "threads", cfg.threads));
    cfg.snapshot_every =
        static_cast<int>(take_integer(keys, "snapshot_every", cfg.snapshot_every));
    if (auto tf = keys.take("trace_file")) cfg.trace_file = *tf;
    cfg.noise_factor = take_number(keys, "noise_factor", cfg.noise_factor);

    keys.require_empty();

    // Structural validation.
    if (cfg.tau_count < 1) throw ConfigError("tau.count must be >= 1");
    if (!(cfg.tau_min > 0.0) || !(cfg.tau_max > cfg.tau_min))
        throw ConfigError("tau range must satisfy 0 < tau.min < tau.max");
    if (cfg.resolution < 8) throw ConfigError("resolution must be >= 8");
    if (cfg.surface_order < 2) throw ConfigError("surface_order must be >= 2");
    if (cfg.obstacle && !geom::strictly_inside(*cfg.obstacle, *cfg.omega, 0.0))
        throw ConfigError("obstacle must lie strictly inside the cavity");

    // Required time-window condition: hard failure at load.
    reffield::require_time_window(*cfg.omega, cfg.pulse, cfg.horizon);
    return cfg;
}

}  // namespace

const geom::Domain& ExperimentConfig::cavity() const {
    if (!omega) throw ConfigError("config has no cavity domain");
    return *omega;
}

indic::TauGrid ExperimentConfig::tau_grid() const {
    return tau_log ? indic::TauGrid::log_spaced(tau_min, tau_max, tau_count)
                   : indic::TauGrid::linear(tau_min, tau_max, tau_count);
}

ExperimentConfig parse_config(const std::string& text) {
    KeyMap keys(text);
    return build(keys, text);
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file: " + path);
    std::stringstream buf;
    buf << is.rdbuf();
    return parse_config(buf.str());
}

ExperimentConfig with_override(const ExperimentConfig& base, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos)
        throw ConfigError("override must look like key=value: " + assignment);
    const std::string key = trim(assignment.substr(0, eq));
    // Rebuild from amended text so every override passes full validation.
    std::ostringstream text;
    std::istringstream is(base.raw_text);
    std::string line;
    bool replaced = false;
    while (std::getline(is, line)) {
        std::string body = line;
        const auto hash = body.find('#');
        if (hash != std::string::npos) body = body.substr(0, hash);
        const auto e = body.find('=');
        if (e != std::string::npos && trim(body.substr(0, e)) == key) {
            text << assignment << "\n";
            replaced = true;
        } else {
            text << line << "\n";
        }
    }
    if (!replaced) text << assignment << "\n";
    return parse_config(text.str());
}

}  // namespace enclosure::cli
