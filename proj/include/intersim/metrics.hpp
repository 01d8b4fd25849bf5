#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "intersim/ssm.hpp"

namespace intersim {

// One line of episode_metrics.csv.
struct MetricsRow {
    std::string controller;  // "fixed" or "dqn"
    double pr = 0.0;
    std::uint64_t seed = 0;
    int episode = 0;
    double cum_neg_reward = 0.0;
    double cum_delay_s = 0.0;
    int total_conflicts = 0;
    int rear_end = 0;
    int crossing = 0;
    double mean_travel_time_s = 0.0;
    long vehicles_completed = 0;
};

// One line of conflicts.csv.
struct ConflictRow {
    std::string controller;
    double pr = 0.0;
    std::uint64_t seed = 0;
    std::string kind;  // "rear_end" or "crossing"
    int veh_a = 0;
    std::string class_a;  // "hdv" or "cav"
    int veh_b = 0;
    std::string class_b;
    double t_begin_s = 0.0;
    double t_end_s = 0.0;
    double min_ttc_s = 0.0;
    double threshold_s = 0.0;
};

extern const char* const kMetricsHeader;
extern const char* const kConflictsHeader;

// Shortest decimal form that parses back to the same double; locale-free.
std::string format_double(double v);
double parse_double(std::string_view text);

ConflictRow to_conflict_row(const ConflictEvent& e, const std::string& controller,
                            double pr, std::uint64_t seed);

std::string metrics_csv(const std::vector<MetricsRow>& rows);
std::string conflicts_csv(const std::vector<ConflictRow>& rows);

std::vector<MetricsRow> parse_metrics_csv(const std::string& text);
std::vector<ConflictRow> parse_conflicts_csv(const std::string& text);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace intersim
