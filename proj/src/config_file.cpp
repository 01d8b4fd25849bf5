#include "intersim/config_file.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <sstream>

#include "intersim/dtse.hpp"
#include "intersim/metrics.hpp"

namespace intersim {

namespace {

std::string trim(std::string_view s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string_view::npos) return {};
    std::size_t b = s.find_last_not_of(" \t\r");
    return std::string(s.substr(a, b - a + 1));
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        std::size_t comma = s.find(',', start);
        if (comma == std::string::npos) {
            std::string item = trim(std::string_view(s).substr(start));
            if (!item.empty()) out.push_back(std::move(item));
            break;
        }
        std::string item = trim(std::string_view(s).substr(start, comma - start));
        if (!item.empty()) out.push_back(std::move(item));
        start = comma + 1;
    }
    return out;
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(const std::string& text) {
    KeyValueConfig cfg;
    std::istringstream is(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                throw ConfigError("line " + std::to_string(lineno) +
                                  ": unterminated section header");
            section = trim(std::string_view(t).substr(1, t.size() - 2));
            if (section.empty())
                throw ConfigError("line " + std::to_string(lineno) + ": empty section");
            continue;
        }
        std::size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(std::string_view(t).substr(0, eq));
        std::string value = trim(std::string_view(t).substr(eq + 1));
        if (key.empty())
            throw ConfigError("line " + std::to_string(lineno) + ": empty key");
        cfg.kv_[section.empty() ? key : section + "." + key] = value;
    }
    return cfg;
}

KeyValueConfig KeyValueConfig::from_file(const std::string& path) {
    return parse(read_text_file(path));
}

void KeyValueConfig::set(const std::string& dotted_key, const std::string& value) {
    kv_[dotted_key] = value;
}

std::optional<std::string> KeyValueConfig::get(const std::string& key) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) return std::nullopt;
    touched_[key] = true;
    return it->second;
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
    auto v = get(key);
    if (!v) return fallback;
    try {
        return parse_double(*v);
    } catch (const ConfigError&) {
        throw ConfigError(key + ": expected a number, got '" + *v + "'");
    }
}

long KeyValueConfig::get_long(const std::string& key, long fallback) const {
    auto v = get(key);
    if (!v) return fallback;
    char* end = nullptr;
    long out = std::strtol(v->c_str(), &end, 10);
    if (end != v->c_str() + v->size() || v->empty())
        throw ConfigError(key + ": expected an integer, got '" + *v + "'");
    return out;
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) const {
    auto v = get(key);
    if (!v) return fallback;
    std::string s = *v;
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) {
        return char(std::tolower(c));
    });
    if (s == "1" || s == "true" || s == "yes" || s == "on") return true;
    if (s == "0" || s == "false" || s == "no" || s == "off") return false;
    throw ConfigError(key + ": expected a boolean, got '" + *v + "'");
}

std::string KeyValueConfig::get_string(const std::string& key,
                                       const std::string& fallback) const {
    auto v = get(key);
    return v ? *v : fallback;
}

std::vector<double> KeyValueConfig::get_doubles(
    const std::string& key, const std::vector<double>& fallback) const {
    auto v = get(key);
    if (!v) return fallback;
    std::vector<double> out;
    for (const auto& item : split_list(*v)) {
        try {
            out.push_back(parse_double(item));
        } catch (const ConfigError&) {
            throw ConfigError(key + ": expected numbers, got '" + item + "'");
        }
    }
    return out;
}

std::vector<std::string> KeyValueConfig::get_strings(
    const std::string& key, const std::vector<std::string>& fallback) const {
    auto v = get(key);
    if (!v) return fallback;
    return split_list(*v);
}

std::vector<std::string> KeyValueConfig::unrecognized() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : kv_)
        if (!touched_.count(k)) out.push_back(k);
    return out;
}

void ExperimentConfig::validate() const {
    if (controllers.empty()) throw ConfigError("controllers: empty grid");
    for (const auto& c : controllers)
        if (c != "fixed" && c != "dqn")
            throw ConfigError("controllers: unknown controller '" + c + "'");
    if (penetration_rates.empty()) throw ConfigError("penetration_rates: empty grid");
    for (double pr : penetration_rates)
        if (pr < 0.0 || pr > 1.0)
            throw ConfigError("penetration_rates: rate outside [0,1]");
    if (seeds.empty()) throw ConfigError("seeds: empty grid");
    if (workers < 1) throw ConfigError("workers: must be at least 1");
    if (out_dir.empty()) throw ConfigError("out: empty output directory");
    if (agent.alpha <= 0.0) throw ConfigError("agent.alpha: must be positive");
    if (agent.gamma < 0.0 || agent.gamma > 1.0)
        throw ConfigError("agent.gamma: must be in [0,1]");
    if (agent.batch_size < 1) throw ConfigError("agent.batch_size: must be positive");
    if (agent.episodes < 1) throw ConfigError("agent.episodes: must be positive");
    if (agent.warmup < 0) throw ConfigError("agent.warmup: must be nonnegative");
    if (agent.layer_sizes.size() < 2 || agent.layer_sizes.back() != kNumPhases)
        throw ConfigError("agent.layers: output layer must have 4 units");
    if (ssm.hdv_ttc <= 0.0 || ssm.cav_ttc <= 0.0)
        throw ConfigError("ssm: thresholds must be positive");
    world.validate();
    (void)DtseEncoder(world.dtse_boundaries);  // boundary sanity
    if (agent.layer_sizes.front() != DtseEncoder::kCells)
        throw ConfigError("agent.layers: input layer must match the state encoding");
}

ExperimentConfig experiment_from(const KeyValueConfig& doc) {
    ExperimentConfig cfg;

    cfg.controllers = doc.get_strings("experiment.controllers", cfg.controllers);
    cfg.penetration_rates =
        doc.get_doubles("experiment.penetration_rates", cfg.penetration_rates);
    {
        std::vector<double> seed_vals;
        for (auto s : cfg.seeds) seed_vals.push_back(double(s));
        seed_vals = doc.get_doubles("experiment.seeds", seed_vals);
        cfg.seeds.clear();
        for (double s : seed_vals) cfg.seeds.push_back(std::uint64_t(s));
    }
    cfg.out_dir = doc.get_string("experiment.out", cfg.out_dir);
    cfg.workers = int(doc.get_long("experiment.workers", cfg.workers));

    WorldConfig& w = cfg.world;
    w.approach_length = doc.get_double("world.approach_length", w.approach_length);
    w.lanes_per_approach =
        int(doc.get_long("world.lanes_per_approach", w.lanes_per_approach));
    w.speed_limit = doc.get_double("world.speed_limit", w.speed_limit);
    w.dt = doc.get_double("world.dt", w.dt);
    w.duration = doc.get_double("world.duration", w.duration);
    w.expected_vehicles = doc.get_double("world.expected_vehicles", w.expected_vehicles);
    w.vehicle_length = doc.get_double("world.vehicle_length", w.vehicle_length);
    w.dtse_boundaries = doc.get_doubles("world.dtse_boundaries", w.dtse_boundaries);
    w.box.left = doc.get_double("world.left_path_length", w.box.left);
    w.box.straight = doc.get_double("world.straight_path_length", w.box.straight);
    w.box.right = doc.get_double("world.right_path_length", w.box.right);

    KraussParams& k = w.krauss;
    k.reaction_time = doc.get_double("krauss.reaction_time", k.reaction_time);
    k.max_accel = doc.get_double("krauss.max_accel", k.max_accel);
    k.max_decel = doc.get_double("krauss.max_decel", k.max_decel);
    k.v_max = doc.get_double("krauss.v_max", k.v_max);
    k.sigma = doc.get_double("krauss.sigma", k.sigma);
    k.min_gap = doc.get_double("krauss.min_gap", k.min_gap);
    k.time_headway = doc.get_double("krauss.time_headway", k.time_headway);

    CaccParams& c = w.cacc;
    c.speed_gain = doc.get_double("cacc.speed_gain", c.speed_gain);
    auto pair = [&doc](const std::string& key, CaccGains g) {
        std::vector<double> v = doc.get_doubles(key, {g.k_gap, g.k_rel});
        if (v.size() != 2) throw ConfigError(key + ": expected two gains");
        return CaccGains{v[0], v[1]};
    };
    c.gap_control = pair("cacc.gap_control", c.gap_control);
    c.gap_closing = pair("cacc.gap_closing", c.gap_closing);
    c.collision_avoidance = pair("cacc.collision_avoidance", c.collision_avoidance);
    c.desired_time_gap = doc.get_double("cacc.desired_time_gap", c.desired_time_gap);
    c.min_gap = doc.get_double("cacc.min_gap", c.min_gap);
    c.desired_speed = doc.get_double("cacc.desired_speed", c.desired_speed);
    c.speed_mode_time_gap =
        doc.get_double("cacc.speed_mode_time_gap", c.speed_mode_time_gap);
    c.gap_tolerance = doc.get_double("cacc.gap_tolerance", c.gap_tolerance);
    c.speed_tolerance = doc.get_double("cacc.speed_tolerance", c.speed_tolerance);
    c.ca_trigger = doc.get_double("cacc.ca_trigger", c.ca_trigger);
    c.max_accel = doc.get_double("cacc.max_accel", c.max_accel);
    c.max_decel = doc.get_double("cacc.max_decel", c.max_decel);
    c.v_max = doc.get_double("cacc.v_max", c.v_max);

    AgentConfig& a = cfg.agent;
    a.alpha = doc.get_double("agent.alpha", a.alpha);
    a.gamma = doc.get_double("agent.gamma", a.gamma);
    a.batch_size = int(doc.get_long("agent.batch_size", a.batch_size));
    a.replay_capacity =
        std::size_t(doc.get_long("agent.replay_capacity", long(a.replay_capacity)));
    a.episodes = int(doc.get_long("agent.episodes", a.episodes));
    a.warmup = int(doc.get_long("agent.warmup", a.warmup));
    a.adam = doc.get_bool("agent.adam", a.adam);
    {
        std::vector<double> layers;
        for (int n : a.layer_sizes) layers.push_back(double(n));
        layers = doc.get_doubles("agent.layers", layers);
        a.layer_sizes.clear();
        for (double n : layers) a.layer_sizes.push_back(int(n));
    }

    SsmThresholds& s = cfg.ssm;
    s.hdv_ttc = doc.get_double("ssm.hdv_ttc", s.hdv_ttc);
    s.cav_ttc = doc.get_double("ssm.cav_ttc", s.cav_ttc);
    s.close_after = doc.get_double("ssm.close_after", s.close_after);
    s.crossing_radius = doc.get_double("ssm.crossing_radius", s.crossing_radius);

    auto unknown = doc.unrecognized();
    if (!unknown.empty()) {
        std::string msg = "unknown configuration key(s):";
        for (const auto& k2 : unknown) msg += " " + k2;
        throw ConfigError(msg);
    }

    // SIM_SEED re-bases the whole seed list, preserving the grid size.
    if (const char* env = std::getenv("SIM_SEED")) {
        char* end = nullptr;
        unsigned long long s0 = std::strtoull(env, &end, 10);
        if (end == env || *end != '\0')
            throw ConfigError("SIM_SEED: expected an integer, got '" + std::string(env) + "'");
        for (std::size_t i = 0; i < cfg.seeds.size(); ++i)
            cfg.seeds[i] = std::uint64_t(s0) + i;
    }

    cfg.validate();
    return cfg;
}

std::uint64_t base_seed_override(std::uint64_t fallback) {
    if (const char* env = std::getenv("SIM_SEED")) {
        char* end = nullptr;
        unsigned long long s0 = std::strtoull(env, &end, 10);
        if (end != env && *end == '\0') return std::uint64_t(s0);
    }
    return fallback;
}

}  // namespace intersim
