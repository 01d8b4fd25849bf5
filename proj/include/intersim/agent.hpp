#pragma once

#include <cstddef>
#include <deque>
#include <random>
#include <vector>

#include "intersim/qnetwork.hpp"

namespace intersim {

struct Transition {
    Eigen::VectorXd s;
    int a = 0;
    double r = 0.0;
    Eigen::VectorXd s_next;
    bool terminal = false;
};

// Bounded FIFO of transitions; pushing past capacity evicts the oldest.
class ReplayBuffer {
  public:
    explicit ReplayBuffer(std::size_t capacity);

    void push(Transition t);
    std::size_t size() const { return buf_.size(); }
    std::size_t capacity() const { return cap_; }
    const Transition& operator[](std::size_t i) const { return buf_[i]; }  // 0 = oldest

  private:
    std::size_t cap_;
    std::deque<Transition> buf_;
};

struct AgentConfig {
    double alpha = 1e-4;   // learning rate
    double gamma = 0.9;    // discount
    int batch_size = 64;
    std::size_t replay_capacity = 50000;
    int episodes = 40;
    int warmup = 500;      // transitions gathered before updates start
    bool adam = false;     // optimizer variant; plain SGD otherwise
    std::vector<int> layer_sizes{80, 400, 400, 400, 400, 400, 4};

    // linear exploration decay over the training run
    double epsilon(int episode) const {
        double e = 1.0 - double(episode) / double(episodes);
        return e < 0.0 ? 0.0 : e;
    }

    QNetworkConfig network() const {
        QNetworkConfig n;
        n.layer_sizes = layer_sizes;
        n.learning_rate = alpha;
        n.adam = adam;
        return n;
    }
};

// Epsilon-greedy over the network's Q-values; greedy ties resolve to the
// lowest action index so behaviour is reproducible.
int select_action(const QNetwork& net, const Eigen::VectorXd& s, double epsilon,
                  std::mt19937_64& rng);

int greedy_action(const Eigen::VectorXd& q);

// One update on a uniform random batch: y = r, or r + gamma * max_a Q(s', a)
// for non-terminal transitions, with Q from the same network being updated.
// Returns the pre-update batch loss.
double train_batch(QNetwork& net, const ReplayBuffer& replay,
                   const AgentConfig& cfg, std::mt19937_64& rng);

}  // namespace intersim
