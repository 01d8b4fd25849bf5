#include "intersim/qnetwork.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "intersim/rng.hpp"
#include "intersim/types.hpp"

namespace intersim {

namespace {

double canonical(std::mt19937_64& rng) {
    // 53 random bits into [0,1); avoids the implementation-defined behaviour
    // of std::uniform_real_distribution
    return double(rng() >> 11) * 0x1.0p-53;
}

void validate_sizes(const std::vector<int>& sizes) {
    if (sizes.size() < 2)
        throw ConfigError("network needs at least input and output layers");
    for (int n : sizes)
        if (n <= 0) throw ConfigError("network layer sizes must be positive");
}

}  // namespace

QNetwork::QNetwork(QNetworkConfig cfg) : cfg_(std::move(cfg)) {
    validate_sizes(cfg_.layer_sizes);
    alloc();
}

QNetwork::QNetwork(QNetworkConfig cfg, std::uint64_t seed) : QNetwork(std::move(cfg)) {
    seed_ = seed;
    auto rng = make_rng(seed, 0x514e4554);
    for (std::size_t l = 0; l < w_.size(); ++l) {
        double limit = std::sqrt(6.0 / double(w_[l].cols()));
        for (Eigen::Index i = 0; i < w_[l].rows(); ++i)
            for (Eigen::Index j = 0; j < w_[l].cols(); ++j)
                w_[l](i, j) = (2.0 * canonical(rng) - 1.0) * limit;
        b_[l].setZero();
    }
}

void QNetwork::alloc() {
    int layers = int(cfg_.layer_sizes.size()) - 1;
    w_.resize(layers);
    b_.resize(layers);
    for (int l = 0; l < layers; ++l) {
        w_[l].resize(cfg_.layer_sizes[l + 1], cfg_.layer_sizes[l]);
        b_[l].resize(cfg_.layer_sizes[l + 1]);
    }
}

Eigen::VectorXd QNetwork::forward(const Eigen::VectorXd& x) const {
    return forward_batch(x);
}

Eigen::MatrixXd QNetwork::forward_batch(const Eigen::MatrixXd& x) const {
    if (x.rows() != input_size())
        throw ContractViolation("input rows do not match network input size");
    Eigen::MatrixXd a = x;
    for (std::size_t l = 0; l < w_.size(); ++l) {
        Eigen::MatrixXd z = (w_[l] * a).colwise() + b_[l];
        if (l + 1 < w_.size())
            a = z.cwiseMax(0.0);
        else
            a = std::move(z);
    }
    return a;
}

double QNetwork::loss_on_batch(const Eigen::MatrixXd& x, const std::vector<int>& actions,
                               const Eigen::VectorXd& targets) const {
    if (int(actions.size()) != x.cols() || targets.size() != x.cols())
        throw ContractViolation("batch size mismatch");
    Eigen::MatrixXd q = forward_batch(x);
    double loss = 0.0;
    for (Eigen::Index i = 0; i < x.cols(); ++i) {
        int a = actions[std::size_t(i)];
        if (a < 0 || a >= output_size()) throw ContractViolation("action out of range");
        double d = q(a, i) - targets(i);
        loss += d * d;
    }
    return loss / double(x.cols());
}

double QNetwork::train_on_batch(const Eigen::MatrixXd& x, const std::vector<int>& actions,
                                const Eigen::VectorXd& targets) {
    if (int(actions.size()) != x.cols() || targets.size() != x.cols())
        throw ContractViolation("batch size mismatch");
    const Eigen::Index batch = x.cols();
    const int layers = num_layers();

    std::vector<Eigen::MatrixXd> act(std::size_t(layers) + 1);
    act[0] = x;
    for (int l = 0; l < layers; ++l) {
        Eigen::MatrixXd z = (w_[std::size_t(l)] * act[std::size_t(l)]).colwise() +
                            b_[std::size_t(l)];
        act[std::size_t(l) + 1] = l + 1 < layers ? z.cwiseMax(0.0).eval() : std::move(z);
    }

    const Eigen::MatrixXd& q = act.back();
    double loss = 0.0;
    Eigen::MatrixXd delta = Eigen::MatrixXd::Zero(output_size(), batch);
    for (Eigen::Index i = 0; i < batch; ++i) {
        int a = actions[std::size_t(i)];
        if (a < 0 || a >= output_size()) throw ContractViolation("action out of range");
        double d = q(a, i) - targets(i);
        loss += d * d;
        delta(a, i) = 2.0 * d / double(batch);
    }
    loss /= double(batch);

    auto gw = std::vector<Eigen::MatrixXd>(std::size_t(layers));
    auto gb = std::vector<Eigen::VectorXd>(std::size_t(layers));
    for (int l = layers - 1; l >= 0; --l) {
        gw[std::size_t(l)].noalias() = delta * act[std::size_t(l)].transpose();
        gb[std::size_t(l)] = delta.rowwise().sum();
        if (l > 0) {
            Eigen::MatrixXd back = w_[std::size_t(l)].transpose() * delta;
            // ReLU passes gradient only where the forward pass was active
            delta = back.cwiseProduct(
                (act[std::size_t(l)].array() > 0.0).cast<double>().matrix());
        }
    }

    if (!cfg_.adam) {
        for (int l = 0; l < layers; ++l) {
            w_[std::size_t(l)] -= cfg_.learning_rate * gw[std::size_t(l)];
            b_[std::size_t(l)] -= cfg_.learning_rate * gb[std::size_t(l)];
        }
        return loss;
    }

    if (mw_.empty()) {
        mw_.resize(w_.size());
        vw_.resize(w_.size());
        mb_.resize(b_.size());
        vb_.resize(b_.size());
        for (std::size_t l = 0; l < w_.size(); ++l) {
            mw_[l] = Eigen::MatrixXd::Zero(w_[l].rows(), w_[l].cols());
            vw_[l] = mw_[l];
            mb_[l] = Eigen::VectorXd::Zero(b_[l].size());
            vb_[l] = mb_[l];
        }
    }
    ++adam_t_;
    double b1 = cfg_.adam_beta1, b2 = cfg_.adam_beta2;
    double corr1 = 1.0 - std::pow(b1, double(adam_t_));
    double corr2 = 1.0 - std::pow(b2, double(adam_t_));
    for (std::size_t l = 0; l < w_.size(); ++l) {
        mw_[l] = b1 * mw_[l] + (1.0 - b1) * gw[l];
        vw_[l] = b2 * vw_[l] + (1.0 - b2) * gw[l].cwiseProduct(gw[l]);
        mb_[l] = b1 * mb_[l] + (1.0 - b1) * gb[l];
        vb_[l] = b2 * vb_[l] + (1.0 - b2) * gb[l].cwiseProduct(gb[l]);
        w_[l].array() -= cfg_.learning_rate * (mw_[l].array() / corr1) /
                         ((vw_[l].array() / corr2).sqrt() + cfg_.adam_eps);
        b_[l].array() -= cfg_.learning_rate * (mb_[l].array() / corr1) /
                         ((vb_[l].array() / corr2).sqrt() + cfg_.adam_eps);
    }
    return loss;
}

// The checkpoint is plain text with hexfloat payloads, so round-tripping is
// exact and diffs stay readable.
void QNetwork::save(std::ostream& os) const {
    os << "qnet 1\n";
    os << "layers";
    for (int n : cfg_.layer_sizes) os << ' ' << n;
    os << '\n';
    os << "seed " << seed_ << '\n';
    os << "episode " << episode_ << '\n';
    os << "lr " << std::hexfloat << cfg_.learning_rate << std::defaultfloat << '\n';
    os << "adam " << (cfg_.adam ? 1 : 0) << '\n';
    char buf[64];
    for (std::size_t l = 0; l < w_.size(); ++l) {
        os << "W" << l << ' ' << w_[l].rows() << ' ' << w_[l].cols() << '\n';
        for (Eigen::Index i = 0; i < w_[l].rows(); ++i) {
            for (Eigen::Index j = 0; j < w_[l].cols(); ++j) {
                std::snprintf(buf, sizeof buf, j ? " %a" : "%a", w_[l](i, j));
                os << buf;
            }
            os << '\n';
        }
        os << "b" << l << ' ' << b_[l].size() << '\n';
        for (Eigen::Index i = 0; i < b_[l].size(); ++i) {
            std::snprintf(buf, sizeof buf, i ? " %a" : "%a", b_[l](i));
            os << buf;
        }
        os << '\n';
    }
}

QNetwork QNetwork::load(std::istream& is) {
    std::string tag;
    int version = 0;
    is >> tag >> version;
    if (tag != "qnet" || version != 1)
        throw ConfigError("unrecognized checkpoint header");
    is >> tag;
    if (tag != "layers") throw ConfigError("checkpoint missing layer sizes");
    std::string line;
    std::getline(is, line);
    QNetworkConfig cfg;
    cfg.layer_sizes.clear();
    {
        std::istringstream ls(line);
        int n;
        while (ls >> n) cfg.layer_sizes.push_back(n);
    }
    std::uint64_t seed = 0;
    int episode = 0;
    is >> tag >> seed;
    if (tag != "seed") throw ConfigError("checkpoint missing seed");
    is >> tag >> episode;
    if (tag != "episode") throw ConfigError("checkpoint missing episode");
    is >> tag;
    if (tag != "lr") throw ConfigError("checkpoint missing learning rate");
    std::string lr_text;
    is >> lr_text;
    cfg.learning_rate = std::strtod(lr_text.c_str(), nullptr);
    int adam = 0;
    is >> tag >> adam;
    if (tag != "adam") throw ConfigError("checkpoint missing optimizer flag");
    cfg.adam = adam != 0;

    QNetwork net(cfg);
    net.seed_ = seed;
    net.episode_ = episode;
    auto read_row = [&is](double* dst, Eigen::Index n) {
        std::string tok;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (!(is >> tok)) throw ConfigError("checkpoint truncated");
            dst[j] = std::strtod(tok.c_str(), nullptr);
        }
    };
    for (int l = 0; l < net.num_layers(); ++l) {
        Eigen::Index rows, cols;
        is >> tag >> rows >> cols;
        if (tag != "W" + std::to_string(l) || rows != net.w_[std::size_t(l)].rows() ||
            cols != net.w_[std::size_t(l)].cols())
            throw ConfigError("checkpoint weight block mismatch");
        std::vector<double> row(static_cast<std::size_t>(cols), 0.0);
        for (Eigen::Index i = 0; i < rows; ++i) {
            read_row(row.data(), cols);
            for (Eigen::Index j = 0; j < cols; ++j)
                net.w_[std::size_t(l)](i, j) = row[std::size_t(j)];
        }
        Eigen::Index bn;
        is >> tag >> bn;
        if (tag != "b" + std::to_string(l) || bn != net.b_[std::size_t(l)].size())
            throw ConfigError("checkpoint bias block mismatch");
        std::vector<double> bias(static_cast<std::size_t>(bn), 0.0);
        read_row(bias.data(), bn);
        for (Eigen::Index i = 0; i < bn; ++i) net.b_[std::size_t(l)](i) = bias[std::size_t(i)];
    }
    return net;
}

void QNetwork::save_file(const std::string& path) const {
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot write checkpoint: " + path);
    save(os);
}

QNetwork QNetwork::load_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot read checkpoint: " + path);
    return load(is);
}

}  // namespace intersim
