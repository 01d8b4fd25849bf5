#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "intersim/experiment.hpp"

namespace {

using namespace intersim;

KeyValueConfig load_doc(const std::string& config_path,
    const std::vector<std::string>& sets) {
    KeyValueConfig doc;
    if (!config_path.empty()) doc = KeyValueConfig::from_file(config_path);
    for (const auto& kv : sets) {
        std::size_t eq = kv.find('=');
        if (eq == std::string::npos || eq == 0)
            throw ConfigError("--set expects section.key=value, got '" + kv + "'");
        doc.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    return doc;
}

int finish_cell(const ExperimentConfig& cfg, CellResult cell) {
    SweepResult r;
    r.cells.push_back(std::move(cell));
    r.failed_cells = r.cells[0].failed ? 1 : 0;
    write_outputs(r, cfg.out_dir);
    std::cout << summary_table(r);
    if (r.failed_cells) {
        std::cerr << "error: " << r.cells[0].error << "\n";
        return 1;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"signalized intersection simulator: fixed-time vs. DQN control "
                 "with surrogate safety analysis"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::string checkpoint;
    std::vector<std::string> sets;
    double pr = 0.0;
    std::uint64_t seed = 1;
    int episodes = -1;
    int workers = -1;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "configuration file");
        sub->add_option("--set", sets,
                        "override any configuration key, section.key=value");
        sub->add_option("--out", out_dir, "output directory");
    };

    CLI::App* train = app.add_subcommand("train", "train the adaptive controller "
                                                  "on one grid cell");
    add_common(train);
    train->add_option("--pr", pr, "CAV penetration rate")->check(CLI::Range(0.0, 1.0));
    train->add_option("--seed", seed, "base seed of the cell");
    train->add_option("--episodes", episodes, "training episodes");

    CLI::App* eval = app.add_subcommand("eval", "evaluate a trained checkpoint "
                                                "on one grid cell");
    add_common(eval);
    eval->add_option("--pr", pr, "CAV penetration rate")->check(CLI::Range(0.0, 1.0));
    eval->add_option("--seed", seed, "base seed of the cell");
    eval->add_option("--checkpoint", checkpoint, "checkpoint file (defaults to the "
                                                 "cell's path under --out)");

    CLI::App* swp = app.add_subcommand("sweep", "run the full controller x "
                                                "penetration x seed grid");
    add_common(swp);
    swp->add_option("--workers", workers, "parallel cells")->check(CLI::PositiveNumber);

    CLI::App* val = app.add_subcommand("validate-config", "parse and check a "
                                                          "configuration");
    add_common(val);

    CLI11_PARSE(app, argc, argv);

    try {
        KeyValueConfig doc = load_doc(config_path, sets);
        if (!out_dir.empty()) doc.set("experiment.out", out_dir);
        if (workers > 0) doc.set("experiment.workers", std::to_string(workers));
        if (episodes > 0) doc.set("agent.episodes", std::to_string(episodes));
        ExperimentConfig cfg = experiment_from(doc);

        if (app.got_subcommand(train)) {
            std::uint64_t s = base_seed_override(seed);
            return finish_cell(cfg, run_scenario(cfg, "dqn", pr, s));
        }
        if (app.got_subcommand(eval)) {
            std::uint64_t s = base_seed_override(seed);
            std::string ckpt =
                checkpoint.empty() ? checkpoint_path(cfg.out_dir, pr, s) : checkpoint;
            return finish_cell(cfg, run_eval(cfg, ckpt, pr, s));
        }
        if (app.got_subcommand(swp)) {
            SweepResult r = sweep(cfg);
            write_outputs(r, cfg.out_dir);
            std::cout << summary_table(r);
            if (r.failed_cells > 0) {
                std::cerr << "error: " << r.failed_cells << " of " << r.cells.size()
                          << " cells failed; see " << cfg.out_dir << "/failures.txt\n";
                return 1;
            }
            return 0;
        }
        // validate-config
        std::cout << "configuration OK: " << cfg.controllers.size()
                  << " controller(s) x " << cfg.penetration_rates.size()
                  << " rate(s) x " << cfg.seeds.size() << " seed(s), output to "
                  << cfg.out_dir << "\n";
        return 0;
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    }
}
