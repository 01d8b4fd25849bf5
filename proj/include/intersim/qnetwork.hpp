#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace intersim {

struct QNetworkConfig {
    // input layer, hidden layers, output layer
    std::vector<int> layer_sizes{80, 400, 400, 400, 400, 400, 4};
    double learning_rate = 1e-4;
    bool adam = false;  // plain SGD unless enabled
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;
};

// Fully connected ReLU network trained with squared error on the Q-value of
// the action actually taken. Forward/backward are written out by hand on
// Eigen matrices; no autograd involved.
class QNetwork {
  public:
    QNetwork(QNetworkConfig cfg, std::uint64_t seed);

    int input_size() const { return cfg_.layer_sizes.front(); }
    int output_size() const { return cfg_.layer_sizes.back(); }
    int num_layers() const { return int(w_.size()); }  // weight layers

    Eigen::VectorXd forward(const Eigen::VectorXd& x) const;
    // columns are samples
    Eigen::MatrixXd forward_batch(const Eigen::MatrixXd& x) const;

    // Mean squared error over the batch on the taken actions only.
    double loss_on_batch(const Eigen::MatrixXd& x, const std::vector<int>& actions,
                         const Eigen::VectorXd& targets) const;

    // One optimizer step; returns the pre-update batch loss.
    double train_on_batch(const Eigen::MatrixXd& x, const std::vector<int>& actions,
                          const Eigen::VectorXd& targets);

    // direct parameter access (tests, checkpoint tooling)
    Eigen::MatrixXd& weight(int layer) { return w_[layer]; }
    Eigen::VectorXd& bias(int layer) { return b_[layer]; }
    const Eigen::MatrixXd& weight(int layer) const { return w_[layer]; }
    const Eigen::VectorXd& bias(int layer) const { return b_[layer]; }

    const QNetworkConfig& config() const { return cfg_; }

    // provenance recorded in checkpoints
    std::uint64_t seed() const { return seed_; }
    int episode() const { return episode_; }
    void set_episode(int e) { episode_ = e; }

    void save(std::ostream& os) const;
    static QNetwork load(std::istream& is);
    void save_file(const std::string& path) const;
    static QNetwork load_file(const std::string& path);

  private:
    explicit QNetwork(QNetworkConfig cfg);  // uninitialized weights (load path)
    void alloc();

    QNetworkConfig cfg_;
    std::uint64_t seed_ = 0;
    int episode_ = 0;
    std::vector<Eigen::MatrixXd> w_;  // out x in
    std::vector<Eigen::VectorXd> b_;

    // Adam state, allocated lazily on first update
    std::vector<Eigen::MatrixXd> mw_, vw_;
    std::vector<Eigen::VectorXd> mb_, vb_;
    long adam_t_ = 0;
};

}  // namespace intersim
