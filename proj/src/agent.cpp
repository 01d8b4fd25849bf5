#include "intersim/agent.hpp"

#include "intersim/types.hpp"

namespace intersim {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : cap_(capacity) {
    if (capacity == 0) throw ConfigError("replay capacity must be positive");
}

void ReplayBuffer::push(Transition t) {
    if (buf_.size() == cap_) buf_.pop_front();
    buf_.push_back(std::move(t));
}

int greedy_action(const Eigen::VectorXd& q) {
    int best = 0;
    for (int i = 1; i < q.size(); ++i)
        if (q(i) > q(best)) best = i;
    return best;
}

int select_action(const QNetwork& net, const Eigen::VectorXd& s, double epsilon,
                  std::mt19937_64& rng) {
    double u = double(rng() >> 11) * 0x1.0p-53;
    if (u < epsilon)
        return int(rng() % std::uint64_t(net.output_size()));
    return greedy_action(net.forward(s));
}

double train_batch(QNetwork& net, const ReplayBuffer& replay,
                   const AgentConfig& cfg, std::mt19937_64& rng) {
    if (replay.size() == 0) throw ContractViolation("train_batch on empty replay");
    const int n = net.input_size();
    const int batch = cfg.batch_size;

    Eigen::MatrixXd states(n, batch);
    Eigen::MatrixXd next_states(n, batch);
    auto actions = std::vector<int>(std::size_t(batch));
    Eigen::VectorXd rewards(batch);
    auto terminal = std::vector<bool>(std::size_t(batch));

    for (int i = 0; i < batch; ++i) {
        const Transition& t = replay[std::size_t(rng() % replay.size())];
        states.col(i) = t.s;
        next_states.col(i) = t.s_next;
        actions[std::size_t(i)] = t.a;
        rewards(i) = t.r;
        terminal[std::size_t(i)] = t.terminal;
    }

    // Bootstrap targets from the network as it stands before this update.
    Eigen::MatrixXd q_next = net.forward_batch(next_states);
    Eigen::VectorXd targets(batch);
    for (int i = 0; i < batch; ++i) {
        double y = rewards(i);
        if (!terminal[std::size_t(i)]) y += cfg.gamma * q_next.col(i).maxCoeff();
        targets(i) = y;
    }
    return net.train_on_batch(states, actions, targets);
}

}  // namespace intersim
