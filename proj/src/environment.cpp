#include "intersim/environment.hpp"

#include <algorithm>

#include "intersim/rng.hpp"

namespace intersim {

namespace {

EpisodeResult harvest_world(const World& w, ConflictTracker& tracker,
                            double cum_neg_reward) {
    tracker.finalize();
    EpisodeResult r;
    r.cum_neg_reward = cum_neg_reward;
    r.cum_delay_s = w.total_delay();
    r.rear_end = tracker.count(ConflictKind::RearEnd);
    r.crossing = tracker.count(ConflictKind::Crossing);
    r.total_conflicts = r.rear_end + r.crossing;
    r.mean_travel_time_s = w.mean_travel_time();
    r.vehicles_completed = w.vehicles_completed();
    r.vehicles_spawned = w.vehicles_spawned();
    r.vehicles_in_network = w.vehicles_in_network();
    r.conflicts = tracker.events();
    return r;
}

}  // namespace

SignalEnv::SignalEnv(WorldConfig wc, SsmThresholds thr)
    : cfg_(std::move(wc)), thr_(thr), encoder_(cfg_.dtse_boundaries) {
    cfg_.validate();
    reset(cfg_.seed);
}

void SignalEnv::reset(std::uint64_t seed) {
    cfg_.seed = seed;
    world_ = std::make_unique<World>(cfg_);
    tracker_ = std::make_unique<ConflictTracker>(thr_, cfg_.vehicle_length);
    machine_ = SignalMachine(Phase::NSA);
    // The machine starts inside the initial green, so play it out; every
    // observation the agent sees is then taken at a decision epoch.
    run_to_epoch();
}

void SignalEnv::run_to_epoch() {
    while (!machine_.at_decision_epoch() && !done()) {
        world_->step(machine_.state());
        machine_.tick(cfg_.dt);
        tracker_->observe(*world_);
    }
}

Eigen::VectorXd SignalEnv::state() const { return encoder_.encode(*world_); }

double SignalEnv::step_action(int action) {
    if (action < 0 || action >= kNumPhases)
        throw ContractViolation("action out of range");
    if (done()) throw ContractViolation("episode already finished");
    double before = world_->accumulated_total_waiting();
    machine_.choose(Phase(action));
    run_to_epoch();
    return compute_reward(before, world_->accumulated_total_waiting());
}

bool SignalEnv::done() const { return world_->time() >= cfg_.duration - 1e-9; }

EpisodeResult SignalEnv::harvest() {
    return harvest_world(*world_, *tracker_, 0.0);
}

EpisodeResult run_fixed_episode(const WorldConfig& wc, const SsmThresholds& thr) {
    wc.validate();
    World world(wc);
    ConflictTracker tracker(thr, wc.vehicle_length);
    while (world.time() < wc.duration - 1e-9) {
        world.step(fixed_time_next(world.time()));
        tracker.observe(world);
    }
    return harvest_world(world, tracker, 0.0);
}

EpisodeResult run_greedy_episode(const WorldConfig& wc, const SsmThresholds& thr,
                                 const QNetwork& net, std::uint64_t seed) {
    SignalEnv env(wc, thr);
    env.reset(seed);
    double cnr = 0.0;
    while (!env.done()) {
        int a = greedy_action(net.forward(env.state()));
        double r = env.step_action(a);
        cnr += std::min(r, 0.0);
    }
    EpisodeResult res = env.harvest();
    res.cum_neg_reward = cnr;
    return res;
}

TrainingResult run_training(const WorldConfig& wc, const SsmThresholds& thr,
                            const AgentConfig& acfg, std::uint64_t base_seed) {
    if (acfg.episodes <= 0) throw ConfigError("episodes must be positive");
    TrainingResult out;
    out.net = std::make_unique<QNetwork>(acfg.network(), base_seed);
    ReplayBuffer replay(acfg.replay_capacity);
    auto policy_rng = make_rng(base_seed, 0x504f4c49);

    SignalEnv env(wc, thr);
    for (int e = 0; e < acfg.episodes; ++e) {
        env.reset(base_seed + std::uint64_t(e));
        double eps = acfg.epsilon(e);
        double cnr = 0.0;
        Eigen::VectorXd s = env.state();
        while (!env.done()) {
            int a = select_action(*out.net, s, eps, policy_rng);
            double r = env.step_action(a);
            Eigen::VectorXd s2 = env.state();
            bool terminal = env.done();
            replay.push({s, a, r, s2, terminal});
            if (replay.size() >= std::size_t(acfg.warmup))
                train_batch(*out.net, replay, acfg, policy_rng);
            cnr += std::min(r, 0.0);
            s = std::move(s2);
        }
        EpisodeResult res = env.harvest();
        res.cum_neg_reward = cnr;
        out.episodes.push_back(std::move(res));
        out.net->set_episode(e + 1);
    }
    return out;
}

}  // namespace intersim
