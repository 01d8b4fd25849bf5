#include "intersim/metrics.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

#include "intersim/types.hpp"

namespace intersim {

const char* const kMetricsHeader =
    "controller,pr,seed,episode,cum_neg_reward,cum_delay_s,total_conflicts,"
    "rear_end,crossing,mean_travel_time_s,vehicles_completed";
const char* const kConflictsHeader =
    "controller,pr,seed,kind,veh_a,class_a,veh_b,class_b,t_begin_s,t_end_s,"
    "min_ttc_s,threshold_s";

std::string format_double(double v) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc{}) throw InvariantViolation("double formatting failed");
    return std::string(buf, p);
}

double parse_double(std::string_view text) {
    double v = 0.0;
    auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || p != text.data() + text.size())
        throw ConfigError("bad number: '" + std::string(text) + "'");
    return v;
}

namespace {

long parse_long(std::string_view text) {
    long v = 0;
    auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || p != text.data() + text.size())
        throw ConfigError("bad integer: '" + std::string(text) + "'");
    return v;
}

std::uint64_t parse_u64(std::string_view text) {
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || p != text.data() + text.size())
        throw ConfigError("bad integer: '" + std::string(text) + "'");
    return v;
}

std::vector<std::string_view> split_csv_line(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

// header plus body lines, validating the header and field counts
std::vector<std::vector<std::string_view>> csv_body(const std::string& text,
                                                    const char* header,
                                                    std::size_t fields) {
    std::vector<std::vector<std::string_view>> rows;
    std::string_view rest(text);
    bool first = true;
    while (!rest.empty()) {
        std::size_t nl = rest.find('\n');
        std::string_view line = nl == std::string_view::npos ? rest : rest.substr(0, nl);
        rest = nl == std::string_view::npos ? std::string_view{} : rest.substr(nl + 1);
        if (line.empty()) continue;
        if (first) {
            if (line != header) throw ConfigError("unexpected CSV header");
            first = false;
            continue;
        }
        auto cells = split_csv_line(line);
        if (cells.size() != fields)
            throw ConfigError("wrong CSV field count: " + std::string(line));
        rows.push_back(std::move(cells));
    }
    if (first) throw ConfigError("CSV missing header");
    return rows;
}

}  // namespace

ConflictRow to_conflict_row(const ConflictEvent& e, const std::string& controller,
                            double pr, std::uint64_t seed) {
    ConflictRow r;
    r.controller = controller;
    r.pr = pr;
    r.seed = seed;
    r.kind = conflict_kind_name(e.kind);
    r.veh_a = e.vehicle_a;
    r.class_a = kind_name(e.class_a);
    r.veh_b = e.vehicle_b;
    r.class_b = kind_name(e.class_b);
    r.t_begin_s = e.t_begin;
    r.t_end_s = e.t_end;
    r.min_ttc_s = e.min_ttc;
    r.threshold_s = e.threshold;
    return r;
}

std::string metrics_csv(const std::vector<MetricsRow>& rows) {
    std::string out = kMetricsHeader;
    out += '\n';
    for (const auto& r : rows) {
        out += r.controller;
        out += ',';
        out += format_double(r.pr);
        out += ',';
        out += std::to_string(r.seed);
        out += ',';
        out += std::to_string(r.episode);
        out += ',';
        out += format_double(r.cum_neg_reward);
        out += ',';
        out += format_double(r.cum_delay_s);
        out += ',';
        out += std::to_string(r.total_conflicts);
        out += ',';
        out += std::to_string(r.rear_end);
        out += ',';
        out += std::to_string(r.crossing);
        out += ',';
        out += format_double(r.mean_travel_time_s);
        out += ',';
        out += std::to_string(r.vehicles_completed);
        out += '\n';
    }
    return out;
}

std::string conflicts_csv(const std::vector<ConflictRow>& rows) {
    std::string out = kConflictsHeader;
    out += '\n';
    for (const auto& r : rows) {
        out += r.controller;
        out += ',';
        out += format_double(r.pr);
        out += ',';
        out += std::to_string(r.seed);
        out += ',';
        out += r.kind;
        out += ',';
        out += std::to_string(r.veh_a);
        out += ',';
        out += r.class_a;
        out += ',';
        out += std::to_string(r.veh_b);
        out += ',';
        out += r.class_b;
        out += ',';
        out += format_double(r.t_begin_s);
        out += ',';
        out += format_double(r.t_end_s);
        out += ',';
        out += format_double(r.min_ttc_s);
        out += ',';
        out += format_double(r.threshold_s);
        out += '\n';
    }
    return out;
}

std::vector<MetricsRow> parse_metrics_csv(const std::string& text) {
    std::vector<MetricsRow> rows;
    for (const auto& c : csv_body(text, kMetricsHeader, 11)) {
        MetricsRow r;
        r.controller = std::string(c[0]);
        r.pr = parse_double(c[1]);
        r.seed = parse_u64(c[2]);
        r.episode = int(parse_long(c[3]));
        r.cum_neg_reward = parse_double(c[4]);
        r.cum_delay_s = parse_double(c[5]);
        r.total_conflicts = int(parse_long(c[6]));
        r.rear_end = int(parse_long(c[7]));
        r.crossing = int(parse_long(c[8]));
        r.mean_travel_time_s = parse_double(c[9]);
        r.vehicles_completed = parse_long(c[10]);
        rows.push_back(std::move(r));
    }
    return rows;
}

std::vector<ConflictRow> parse_conflicts_csv(const std::string& text) {
    std::vector<ConflictRow> rows;
    for (const auto& c : csv_body(text, kConflictsHeader, 12)) {
        ConflictRow r;
        r.controller = std::string(c[0]);
        r.pr = parse_double(c[1]);
        r.seed = parse_u64(c[2]);
        r.kind = std::string(c[3]);
        r.veh_a = int(parse_long(c[4]));
        r.class_a = std::string(c[5]);
        r.veh_b = int(parse_long(c[6]));
        r.class_b = std::string(c[7]);
        r.t_begin_s = parse_double(c[8]);
        r.t_end_s = parse_double(c[9]);
        r.min_ttc_s = parse_double(c[10]);
        r.threshold_s = parse_double(c[11]);
        rows.push_back(std::move(r));
    }
    return rows;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigError("cannot write " + path);
    os << content;
    if (!os) throw ConfigError("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError("cannot read " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

}  // namespace intersim
