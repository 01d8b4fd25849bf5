#include "intersim/experiment.hpp"

#include <atomic>
#include <filesystem>
#include <iomanip>
#include <map>
#include <sstream>
#include <thread>

namespace intersim {

namespace {

MetricsRow to_row(const EpisodeResult& e, const std::string& controller, double pr,
                  std::uint64_t seed, int episode) {
    MetricsRow r;
    r.controller = controller;
    r.pr = pr;
    r.seed = seed;
    r.episode = episode;
    r.cum_neg_reward = e.cum_neg_reward;
    r.cum_delay_s = e.cum_delay_s;
    r.total_conflicts = e.total_conflicts;
    r.rear_end = e.rear_end;
    r.crossing = e.crossing;
    r.mean_travel_time_s = e.mean_travel_time_s;
    r.vehicles_completed = e.vehicles_completed;
    return r;
}

void append_conflicts(CellResult& cell, const EpisodeResult& e) {
    for (const auto& ev : e.conflicts)
        cell.conflicts.push_back(to_conflict_row(ev, cell.controller, cell.pr, cell.seed));
}

}  // namespace

std::string checkpoint_path(const std::string& out_dir, double pr,
                            std::uint64_t seed) {
    return out_dir + "/checkpoints/dqn_pr" + format_double(pr) + "_seed" +
           std::to_string(seed) + ".ckpt";
}

CellResult run_scenario(const ExperimentConfig& cfg, const std::string& controller,
                        double pr, std::uint64_t seed) {
    CellResult cell;
    cell.controller = controller;
    cell.pr = pr;
    cell.seed = seed;
    try {
        WorldConfig wc = cfg.world;
        wc.cav_penetration = pr;
        wc.seed = seed;
        if (controller == "fixed") {
            EpisodeResult e = run_fixed_episode(wc, cfg.ssm);
            cell.rows.push_back(to_row(e, controller, pr, seed, 0));
            append_conflicts(cell, e);
        } else if (controller == "dqn") {
            TrainingResult tr = run_training(wc, cfg.ssm, cfg.agent, seed);
            for (std::size_t e = 0; e < tr.episodes.size(); ++e)
                cell.rows.push_back(
                    to_row(tr.episodes[e], controller, pr, seed, int(e)));
            std::string ckpt = checkpoint_path(cfg.out_dir, pr, seed);
            std::filesystem::create_directories(
                std::filesystem::path(ckpt).parent_path());
            tr.net->save_file(ckpt);
            EpisodeResult eval = run_greedy_episode(wc, cfg.ssm, *tr.net, seed);
            cell.rows.push_back(
                to_row(eval, controller, pr, seed, cfg.agent.episodes));
            append_conflicts(cell, eval);
        } else {
            throw ConfigError("unknown controller '" + controller + "'");
        }
    } catch (const std::exception& ex) {
        cell.failed = true;
        cell.error = ex.what();
        cell.rows.clear();
        cell.conflicts.clear();
    }
    return cell;
}

CellResult run_eval(const ExperimentConfig& cfg, const std::string& checkpoint,
                    double pr, std::uint64_t seed) {
    CellResult cell;
    cell.controller = "dqn";
    cell.pr = pr;
    cell.seed = seed;
    try {
        if (!std::filesystem::exists(checkpoint))
            throw ConfigError("checkpoint not found: " + checkpoint +
                              " (train this cell first)");
        QNetwork net = QNetwork::load_file(checkpoint);
        WorldConfig wc = cfg.world;
        wc.cav_penetration = pr;
        wc.seed = seed;
        EpisodeResult e = run_greedy_episode(wc, cfg.ssm, net, seed);
        cell.rows.push_back(to_row(e, "dqn", pr, seed, net.episode()));
        append_conflicts(cell, e);
    } catch (const std::exception& ex) {
        cell.failed = true;
        cell.error = ex.what();
        cell.rows.clear();
        cell.conflicts.clear();
    }
    return cell;
}

SweepResult sweep(const ExperimentConfig& cfg) {
    struct Task {
        std::string controller;
        double pr;
        std::uint64_t seed;
    };
    std::vector<Task> tasks;
    for (const auto& c : cfg.controllers)
        for (double pr : cfg.penetration_rates)
            for (auto seed : cfg.seeds) tasks.push_back({c, pr, seed});

    SweepResult result;
    result.cells.resize(tasks.size());

    int workers = std::min<int>(cfg.workers, int(tasks.size()));
    if (workers <= 1) {
        for (std::size_t i = 0; i < tasks.size(); ++i)
            result.cells[i] =
                run_scenario(cfg, tasks[i].controller, tasks[i].pr, tasks[i].seed);
    } else {
        std::atomic<std::size_t> next{0};
        auto worker = [&] {
            while (true) {
                std::size_t i = next.fetch_add(1);
                if (i >= tasks.size()) return;
                result.cells[i] = run_scenario(cfg, tasks[i].controller,
                                               tasks[i].pr, tasks[i].seed);
            }
        };
        std::vector<std::thread> pool;
        for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    for (const auto& c : result.cells)
        if (c.failed) ++result.failed_cells;
    return result;
}

std::vector<MetricsRow> merged_metrics(const SweepResult& r) {
    std::vector<MetricsRow> rows;
    for (const auto& c : r.cells)
        rows.insert(rows.end(), c.rows.begin(), c.rows.end());
    return rows;
}

std::vector<ConflictRow> merged_conflicts(const SweepResult& r) {
    std::vector<ConflictRow> rows;
    for (const auto& c : r.cells)
        rows.insert(rows.end(), c.conflicts.begin(), c.conflicts.end());
    return rows;
}

std::string summary_table(const SweepResult& r) {
    struct Acc {
        int n = 0;
        double delay = 0.0, total = 0.0, rear = 0.0, cross = 0.0, travel = 0.0;
        std::vector<std::string> errors;
    };
    std::map<std::pair<std::string, double>, Acc> groups;
    std::vector<std::pair<std::string, double>> order;
    for (const auto& c : r.cells) {
        auto key = std::make_pair(c.controller, c.pr);
        if (!groups.count(key)) order.push_back(key);
        Acc& g = groups[key];
        if (c.failed) {
            g.errors.push_back("seed " + std::to_string(c.seed) + ": " + c.error);
            continue;
        }
        const MetricsRow& row = c.rows.back();  // the reported episode
        ++g.n;
        g.delay += row.cum_delay_s;
        g.total += row.total_conflicts;
        g.rear += row.rear_end;
        g.cross += row.crossing;
        g.travel += row.mean_travel_time_s;
    }

    std::ostringstream os;
    os << std::left << std::setw(8) << "ctrl" << std::right << std::setw(6) << "pr"
       << std::setw(7) << "seeds" << std::setw(14) << "delay_s" << std::setw(11)
       << "conflicts" << std::setw(10) << "rear" << std::setw(10) << "cross"
       << std::setw(12) << "travel_s" << '\n';
    os << std::fixed;
    for (const auto& key : order) {
        const Acc& g = groups[key];
        os << std::left << std::setw(8) << key.first << std::right
           << std::setprecision(1) << std::setw(6) << key.second;
        if (g.n == 0) {
            os << std::setw(7) << 0 << "  all seeds failed\n";
        } else {
            os << std::setw(7) << g.n << std::setprecision(1) << std::setw(14)
               << g.delay / g.n << std::setw(11) << g.total / g.n << std::setw(10)
               << g.rear / g.n << std::setw(10) << g.cross / g.n << std::setw(12)
               << g.travel / g.n << '\n';
        }
        for (const auto& e : g.errors) os << "    FAILED " << e << '\n';
    }
    return os.str();
}

void write_outputs(const SweepResult& r, const std::string& dir) {
    std::filesystem::create_directories(dir);
    write_text_file(dir + "/episode_metrics.csv", metrics_csv(merged_metrics(r)));
    write_text_file(dir + "/conflicts.csv", conflicts_csv(merged_conflicts(r)));
    if (r.failed_cells > 0) {
        std::string report;
        for (const auto& c : r.cells)
            if (c.failed)
                report += c.controller + " pr=" + format_double(c.pr) + " seed=" +
                          std::to_string(c.seed) + ": " + c.error + "\n";
        write_text_file(dir + "/failures.txt", report);
    }
}

}  // namespace intersim
