#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "intersim/agent.hpp"
#include "intersim/ssm.hpp"
#include "intersim/world.hpp"

namespace intersim {

// Sectioned key = value text. Keys are addressed as "section.key"; lines
// starting with # or ; are comments. Values keep their raw text until a
// typed getter interprets them.
class KeyValueConfig {
  public:
    KeyValueConfig() = default;
    static KeyValueConfig parse(const std::string& text);
    static KeyValueConfig from_file(const std::string& path);

    void set(const std::string& dotted_key, const std::string& value);
    std::optional<std::string> get(const std::string& dotted_key) const;

    double get_double(const std::string& key, double fallback) const;
    long get_long(const std::string& key, long fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    std::vector<double> get_doubles(const std::string& key,
                                    const std::vector<double>& fallback) const;
    std::vector<std::string> get_strings(const std::string& key,
                                         const std::vector<std::string>& fallback) const;

    const std::map<std::string, std::string>& entries() const { return kv_; }
    // keys never consumed by a typed getter; used to reject typos
    std::vector<std::string> unrecognized() const;

  private:
    std::map<std::string, std::string> kv_;
    mutable std::map<std::string, bool> touched_;
};

struct ExperimentConfig {
    std::vector<std::string> controllers{"fixed", "dqn"};
    std::vector<double> penetration_rates{0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
    std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
    WorldConfig world;
    AgentConfig agent;
    SsmThresholds ssm;
    std::string out_dir = "out";
    int workers = 1;

    void validate() const;
};

// Builds the experiment configuration from a parsed document, rejecting
// unknown keys. SIM_SEED in the environment, when set, replaces the base
// seed of every grid cell.
ExperimentConfig experiment_from(const KeyValueConfig& doc);

std::uint64_t base_seed_override(std::uint64_t fallback);  // reads SIM_SEED

}  // namespace intersim
