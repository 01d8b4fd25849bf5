#pragma once

#include <Eigen/Dense>
#include <memory>
#include <optional>
#include <vector>

#include "intersim/agent.hpp"
#include "intersim/dtse.hpp"
#include "intersim/signal.hpp"
#include "intersim/ssm.hpp"
#include "intersim/world.hpp"

namespace intersim {

// Everything a metrics row needs from one simulated episode.
struct EpisodeResult {
    double cum_neg_reward = 0.0;  // sum of negative-valued epoch rewards
    double cum_delay_s = 0.0;     // waiting seconds accrued by all vehicles
    int total_conflicts = 0;
    int rear_end = 0;
    int crossing = 0;
    double mean_travel_time_s = 0.0;
    long vehicles_completed = 0;
    long vehicles_spawned = 0;
    long vehicles_in_network = 0;
    std::vector<ConflictEvent> conflicts;
};

// One intersection under agent control. Between reset() and done(), callers
// alternate state() / step_action(); each step_action runs the signal machine
// through the chosen interval(s) and returns the waiting-time reward.
class SignalEnv {
  public:
    SignalEnv(WorldConfig wc, SsmThresholds thr);

    void reset(std::uint64_t seed);

    Eigen::VectorXd state() const;
    double step_action(int action);  // reward = atwt before - atwt after
    bool done() const;

    double time() const { return world_->time(); }
    const World& world() const { return *world_; }
    ConflictTracker& tracker() { return *tracker_; }

    EpisodeResult harvest();  // finalizes conflicts; call once, after done()

  private:
    void run_to_epoch();

    WorldConfig cfg_;
    SsmThresholds thr_;
    std::unique_ptr<World> world_;
    std::unique_ptr<ConflictTracker> tracker_;
    SignalMachine machine_;
    DtseEncoder encoder_;
};

// One episode under the cyclic fixed-time plan.
EpisodeResult run_fixed_episode(const WorldConfig& wc, const SsmThresholds& thr);

// One greedy (epsilon = 0) episode under a trained network.
EpisodeResult run_greedy_episode(const WorldConfig& wc, const SsmThresholds& thr,
                                 const QNetwork& net, std::uint64_t seed);

struct TrainingResult {
    std::vector<EpisodeResult> episodes;  // one per training episode
    std::unique_ptr<QNetwork> net;
};

// Full training run: episode e draws arrivals from base_seed + e and explores
// with epsilon = 1 - e/E; one batch update per decision epoch once the replay
// holds `warmup` transitions.
TrainingResult run_training(const WorldConfig& wc, const SsmThresholds& thr,
                            const AgentConfig& acfg, std::uint64_t base_seed);

}  // namespace intersim
