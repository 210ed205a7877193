#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include <json.hpp>

#include "raincast/errors.hpp"
#include "raincast/rng.hpp"

namespace raincast {

struct MlpSpec {
    std::size_t input_dim = 1;
    std::vector<std::size_t> hidden_units = {8, 4};
    double learning_rate = 1e-3;
    double l1_alpha = 0.0;   // L1 penalty on weights (not biases)
    std::size_t epochs = 100;
    std::size_t batch_size = 32;
    std::uint64_t seed = 0;
    std::size_t patience = 10;
};

// Dense ReLU stack with a single linear output. Inputs are standardized with
// statistics captured at training time; zero-variance features get scale 1.
struct TrainedMlp {
    MlpSpec spec;
    std::vector<std::vector<std::vector<double>>> weights; // [layer][out][in]
    std::vector<std::vector<double>> biases;               // [layer][out]
    std::vector<double> input_mean;
    std::vector<double> input_scale;
    double best_val_rmse = std::numeric_limits<double>::quiet_NaN();

    std::size_t layer_count() const { return weights.size(); }
};

// Glorot-uniform weights, zero biases, identity standardizer.
inline TrainedMlp init_mlp(const MlpSpec& spec) {
    if (spec.input_dim == 0) throw Error("mlp: input_dim must be >= 1");
    if (spec.learning_rate <= 0.0) throw Error("mlp: learning rate must be > 0");
    for (std::size_t u : spec.hidden_units)
        if (u == 0) throw Error("mlp: hidden layer width must be >= 1");

    TrainedMlp net;
    net.spec = spec;
    net.input_mean.assign(spec.input_dim, 0.0);
    net.input_scale.assign(spec.input_dim, 1.0);

    std::vector<std::size_t> dims;
    dims.push_back(spec.input_dim);
    for (std::size_t u : spec.hidden_units) dims.push_back(u);
    dims.push_back(1);

    Rng rng(mix_seed(spec.seed, 0x696e6974)); // "init"
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        const std::size_t fan_in = dims[l], fan_out = dims[l + 1];
        const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
        std::vector<std::vector<double>> w(fan_out, std::vector<double>(fan_in, 0.0));
        for (auto& row : w)
            for (auto& v : row) v = rng.uniform_range(-limit, limit);
        net.weights.push_back(std::move(w));
        net.biases.emplace_back(fan_out, 0.0);
    }
    return net;
}

namespace detail {

struct ForwardCache {
    std::vector<double> standardized;
    std::vector<std::vector<double>> pre;  // pre-activation per layer
    std::vector<std::vector<double>> post; // post-activation per layer
};

inline double forward_cached(const TrainedMlp& net, const std::vector<double>& x,
                             ForwardCache& cache) {
    if (x.size() != net.spec.input_dim)
        throw DimensionMismatchError("mlp forward: expected " +
                                     std::to_string(net.spec.input_dim) + " inputs, got " +
                                     std::to_string(x.size()));
    cache.standardized.resize(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        cache.standardized[i] = (x[i] - net.input_mean[i]) / net.input_scale[i];

    cache.pre.resize(net.layer_count());
    cache.post.resize(net.layer_count());
    const std::vector<double>* in = &cache.standardized;
    for (std::size_t l = 0; l < net.layer_count(); ++l) {
        const auto& w = net.weights[l];
        const auto& b = net.biases[l];
        auto& pre = cache.pre[l];
        pre.assign(w.size(), 0.0);
        for (std::size_t o = 0; o < w.size(); ++o) {
            double acc = b[o];
            const auto& row = w[o];
            for (std::size_t i = 0; i < row.size(); ++i) acc += row[i] * (*in)[i];
            pre[o] = acc;
        }
        auto& post = cache.post[l];
        post = pre;
        if (l + 1 < net.layer_count())
            for (auto& v : post) v = std::max(0.0, v); // ReLU on hidden layers
        in = &post;
    }
    return cache.post.back()[0];
}

} // namespace detail

inline double forward(const TrainedMlp& net, const std::vector<double>& x) {
    detail::ForwardCache cache;
    return detail::forward_cached(net, x, cache);
}

struct MlpGradients {
    std::vector<std::vector<std::vector<double>>> weights;
    std::vector<std::vector<double>> biases;

    static MlpGradients zeros_like(const TrainedMlp& net) {
        MlpGradients g;
        g.weights.resize(net.layer_count());
        g.biases.resize(net.layer_count());
        for (std::size_t l = 0; l < net.layer_count(); ++l) {
            g.weights[l].assign(net.weights[l].size(),
                                std::vector<double>(net.weights[l][0].size(), 0.0));
            g.biases[l].assign(net.biases[l].size(), 0.0);
        }
        return g;
    }
};

// Exact gradient of mean((yhat - y)^2) over the batch plus the L1 subgradient
// alpha*sign(w) on weights (0 at w = 0).
inline MlpGradients grad(const TrainedMlp& net, const std::vector<std::vector<double>>& X,
                         const std::vector<double>& y) {
    if (X.empty() || X.size() != y.size()) throw DimensionMismatchError("mlp grad: bad batch");
    MlpGradients g = MlpGradients::zeros_like(net);
    const double inv_b = 1.0 / static_cast<double>(X.size());

    detail::ForwardCache cache;
    std::vector<double> delta, delta_prev;
    for (std::size_t n = 0; n < X.size(); ++n) {
        const double yhat = detail::forward_cached(net, X[n], cache);
        delta.assign(1, 2.0 * (yhat - y[n]) * inv_b); // d(mse)/d(output)
        for (std::size_t l = net.layer_count(); l-- > 0;) {
            const auto& input = l == 0 ? cache.standardized : cache.post[l - 1];
            auto& gw = g.weights[l];
            auto& gb = g.biases[l];
            for (std::size_t o = 0; o < delta.size(); ++o) {
                gb[o] += delta[o];
                auto& grow = gw[o];
                for (std::size_t i = 0; i < grow.size(); ++i) grow[i] += delta[o] * input[i];
            }
            if (l == 0) break;
            delta_prev.assign(net.weights[l][0].size(), 0.0);
            for (std::size_t o = 0; o < delta.size(); ++o) {
                const auto& wrow = net.weights[l][o];
                for (std::size_t i = 0; i < wrow.size(); ++i) delta_prev[i] += delta[o] * wrow[i];
            }
            // ReLU gate of layer l-1
            for (std::size_t i = 0; i < delta_prev.size(); ++i)
                if (cache.pre[l - 1][i] <= 0.0) delta_prev[i] = 0.0;
            delta.swap(delta_prev);
        }
    }
    if (net.spec.l1_alpha > 0.0) {
        for (std::size_t l = 0; l < net.layer_count(); ++l)
            for (std::size_t o = 0; o < net.weights[l].size(); ++o)
                for (std::size_t i = 0; i < net.weights[l][o].size(); ++i) {
                    const double w = net.weights[l][o][i];
                    if (w > 0.0) g.weights[l][o][i] += net.spec.l1_alpha;
                    else if (w < 0.0) g.weights[l][o][i] -= net.spec.l1_alpha;
                }
    }
    return g;
}

// Batch loss the gradient corresponds to.
inline double mlp_loss(const TrainedMlp& net, const std::vector<std::vector<double>>& X,
                       const std::vector<double>& y) {
    double mse = 0.0;
    for (std::size_t n = 0; n < X.size(); ++n) {
        const double r = forward(net, X[n]) - y[n];
        mse += r * r;
    }
    mse /= static_cast<double>(X.size());
    double l1 = 0.0;
    for (const auto& layer : net.weights)
        for (const auto& row : layer)
            for (double w : row) l1 += std::fabs(w);
    return mse + net.spec.l1_alpha * l1;
}

struct TrainReport {
    std::vector<double> train_rmse; // per epoch, over the shuffled training part
    std::vector<double> val_rmse;   // per epoch (empty when no validation rows)
    std::size_t best_epoch = 0;
};

// Adam training with seeded shuffling, chronological-tail validation and
// early stopping on validation RMSE. Returns the weights of the best
// validation epoch.
inline TrainedMlp train(TrainedMlp net, const std::vector<std::vector<double>>& X,
                        const std::vector<double>& y, double val_fraction = 0.1,
                        TrainReport* report = nullptr) {
    const std::size_t N = X.size();
    if (N != y.size()) throw DimensionMismatchError("mlp train: X/y size mismatch");
    if (N <= 10) throw TooFewSamplesError("mlp train: need more than 10 samples");
    if (net.spec.epochs == 0) return net; // no-op: keep the initialized net

    // Standardizer from the training data; zero-variance features keep scale 1.
    for (std::size_t j = 0; j < net.spec.input_dim; ++j) {
        double mean = 0.0;
        for (std::size_t i = 0; i < N; ++i) mean += X[i][j];
        mean /= static_cast<double>(N);
        double var = 0.0;
        for (std::size_t i = 0; i < N; ++i) var += (X[i][j] - mean) * (X[i][j] - mean);
        var /= static_cast<double>(N);
        net.input_mean[j] = mean;
        net.input_scale[j] = var > 0.0 ? std::sqrt(var) : 1.0;
    }

    const std::size_t n_val = static_cast<std::size_t>(val_fraction * static_cast<double>(N));
    const std::size_t n_train = N - n_val;

    constexpr double kBeta1 = 0.9, kBeta2 = 0.999, kEps = 1e-8;
    MlpGradients m = MlpGradients::zeros_like(net);
    MlpGradients v = MlpGradients::zeros_like(net);
    double beta1_t = 1.0, beta2_t = 1.0;

    Rng rng(mix_seed(net.spec.seed, 0x74726169)); // "trai"
    std::vector<std::size_t> order(n_train);
    std::iota(order.begin(), order.end(), 0);

    auto rmse_over = [&](std::size_t begin, std::size_t end) {
        double acc = 0.0;
        for (std::size_t i = begin; i < end; ++i) {
            const double r = forward(net, X[i]) - y[i];
            acc += r * r;
        }
        return std::sqrt(acc / static_cast<double>(end - begin));
    };

    TrainedMlp best = net;
    double best_val = std::numeric_limits<double>::infinity();
    std::size_t best_epoch = 0;
    std::vector<std::vector<double>> batch_x;
    std::vector<double> batch_y;

    for (std::size_t epoch = 0; epoch < net.spec.epochs; ++epoch) {
        rng.shuffle(order);
        for (std::size_t start = 0; start < n_train; start += net.spec.batch_size) {
            const std::size_t stop = std::min(start + net.spec.batch_size, n_train);
            batch_x.clear();
            batch_y.clear();
            for (std::size_t i = start; i < stop; ++i) {
                batch_x.push_back(X[order[i]]);
                batch_y.push_back(y[order[i]]);
            }
            const MlpGradients g = grad(net, batch_x, batch_y);
            beta1_t *= kBeta1;
            beta2_t *= kBeta2;
            for (std::size_t l = 0; l < net.layer_count(); ++l) {
                for (std::size_t o = 0; o < net.weights[l].size(); ++o) {
                    for (std::size_t i = 0; i < net.weights[l][o].size(); ++i) {
                        double& mw = m.weights[l][o][i];
                        double& vw = v.weights[l][o][i];
                        const double gw = g.weights[l][o][i];
                        mw = kBeta1 * mw + (1.0 - kBeta1) * gw;
                        vw = kBeta2 * vw + (1.0 - kBeta2) * gw * gw;
                        const double mhat = mw / (1.0 - beta1_t);
                        const double vhat = vw / (1.0 - beta2_t);
                        net.weights[l][o][i] -= net.spec.learning_rate * mhat / (std::sqrt(vhat) + kEps);
                    }
                    double& mb = m.biases[l][o];
                    double& vb = v.biases[l][o];
                    const double gb = g.biases[l][o];
                    mb = kBeta1 * mb + (1.0 - kBeta1) * gb;
                    vb = kBeta2 * vb + (1.0 - kBeta2) * gb * gb;
                    const double mhat = mb / (1.0 - beta1_t);
                    const double vhat = vb / (1.0 - beta2_t);
                    net.biases[l][o] -= net.spec.learning_rate * mhat / (std::sqrt(vhat) + kEps);
                }
            }
        }

        if (report) report->train_rmse.push_back(rmse_over(0, n_train));
        if (n_val > 0) {
            const double val = rmse_over(n_train, N);
            if (report) report->val_rmse.push_back(val);
            if (val < best_val) {
                best_val = val;
                best.weights = net.weights;
                best.biases = net.biases;
                best_epoch = epoch;
            }
            // Patience counts consecutive non-improving epochs; 0 disables.
            if (net.spec.patience > 0 && epoch - best_epoch >= net.spec.patience &&
                epoch != best_epoch)
                break;
        }
    }

    if (n_val > 0) {
        best.input_mean = net.input_mean;
        best.input_scale = net.input_scale;
        best.best_val_rmse = best_val;
        if (report) report->best_epoch = best_epoch;
        return best;
    }
    return net;
}

inline nlohmann::json mlp_json(const TrainedMlp& net) {
    nlohmann::json j;
    j["input_dim"] = net.spec.input_dim;
    j["hidden_units"] = net.spec.hidden_units;
    j["learning_rate"] = net.spec.learning_rate;
    j["l1_alpha"] = net.spec.l1_alpha;
    j["epochs"] = net.spec.epochs;
    j["batch_size"] = net.spec.batch_size;
    j["seed"] = net.spec.seed;
    j["patience"] = net.spec.patience;
    j["weights"] = net.weights;
    j["biases"] = net.biases;
    j["input_mean"] = net.input_mean;
    j["input_scale"] = net.input_scale;
    if (std::isfinite(net.best_val_rmse)) j["best_val_rmse"] = net.best_val_rmse;
    return j;
}

inline TrainedMlp mlp_from_json(const nlohmann::json& j) {
    MlpSpec spec;
    spec.input_dim = j.at("input_dim").get<std::size_t>();
    spec.hidden_units = j.at("hidden_units").get<std::vector<std::size_t>>();
    spec.learning_rate = j.at("learning_rate").get<double>();
    spec.l1_alpha = j.at("l1_alpha").get<double>();
    spec.epochs = j.at("epochs").get<std::size_t>();
    spec.batch_size = j.at("batch_size").get<std::size_t>();
    spec.seed = j.at("seed").get<std::uint64_t>();
    spec.patience = j.at("patience").get<std::size_t>();
    TrainedMlp net;
    net.spec = spec;
    net.weights = j.at("weights").get<std::vector<std::vector<std::vector<double>>>>();
    net.biases = j.at("biases").get<std::vector<std::vector<double>>>();
    net.input_mean = j.at("input_mean").get<std::vector<double>>();
    net.input_scale = j.at("input_scale").get<std::vector<double>>();
    if (j.contains("best_val_rmse")) net.best_val_rmse = j.at("best_val_rmse").get<double>();
    return net;
}

} // namespace raincast
