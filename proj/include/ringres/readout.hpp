#pragma once

// Readouts mapping harvested reservoir features to targets: a closed-form ridge
// regression and a feedforward network with batch normalization trained by SGD.
// Neither readout ever touches reservoir weights.

#include "errors.hpp"
#include "linalg.hpp"
#include "random.hpp"

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ringres {

enum class LossKind { cross_entropy, mean_squared_error };
enum class Mode { train, inference };

inline const char* to_string(LossKind k)
{
    return k == LossKind::cross_entropy ? "cross_entropy" : "mean_squared_error";
}

// ---------------------------------------------------------------------------
// Targets and metrics

/// Index of the largest entry; ties resolve to the lowest index.
inline std::size_t argmax(std::span<const double> v)
{
    std::size_t best = 0;
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] > v[best]) best = i;
    return best;
}

inline Matrix one_hot(std::span<const std::size_t> labels, std::size_t num_classes)
{
    Matrix m(labels.size(), num_classes);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] >= num_classes)
            throw std::invalid_argument(
              "one_hot: class index " + std::to_string(labels[i]) + " out of range [0, "
              + std::to_string(num_classes) + ")");
        m(i, labels[i]) = 1.0;
    }
    return m;
}

/// Class per row from either a one-hot matrix (num_classes wide) or a single index column.
inline std::vector<std::size_t> class_indices(const Matrix& targets, std::size_t num_classes)
{
    std::vector<std::size_t> out(targets.rows());
    if (targets.cols() == 1 && num_classes > 1) {
        for (std::size_t i = 0; i < targets.rows(); ++i) {
            const double v = targets(i, 0);
            if (!(v >= 0.0) || v != std::floor(v) || v >= static_cast<double>(num_classes))
                throw std::invalid_argument(
                  "invalid class index " + std::to_string(v) + " for " + std::to_string(num_classes)
                  + " classes");
            out[i] = static_cast<std::size_t>(v);
        }
        return out;
    }
    if (targets.cols() != num_classes)
        throw std::invalid_argument("targets are neither one-hot nor a class index column");
    for (std::size_t i = 0; i < targets.rows(); ++i) {
        auto r = targets.row(i);
        std::size_t hot = num_classes;
        for (std::size_t c = 0; c < num_classes; ++c) {
            if (r[c] == 1.0 && hot == num_classes) hot = c;
            else if (r[c] != 0.0) hot = num_classes + 1;
        }
        if (hot >= num_classes)
            throw std::invalid_argument("invalid one-hot target row " + std::to_string(i));
        out[i] = hot;
    }
    return out;
}

/// Percentage of rows whose argmax equals the label.
inline double accuracy_percent(const Matrix& scores, std::span<const std::size_t> labels)
{
    if (scores.rows() != labels.size() || labels.empty())
        throw std::invalid_argument("accuracy: shape mismatch or empty batch");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) hits += argmax(scores.row(i)) == labels[i];
    return 100.0 * static_cast<double>(hits) / static_cast<double>(labels.size());
}

inline double mean_squared_error(const Matrix& predictions, const Matrix& targets)
{
    if (predictions.rows() != targets.rows() || predictions.cols() != targets.cols()
        || predictions.empty())
        throw std::invalid_argument("mean_squared_error: shape mismatch or empty batch");
    double s = 0.0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const double d = predictions.values()[i] - targets.values()[i];
        s += d * d;
    }
    return s / static_cast<double>(predictions.size());
}

namespace detail {

inline Vector log_softmax_row(std::span<const double> z)
{
    double mx = z[0];
    for (double v : z) mx = std::max(mx, v);
    double s = 0.0;
    for (double v : z) s += std::exp(v - mx);
    const double lse = mx + std::log(s);
    Vector out(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) out[i] = z[i] - lse;
    return out;
}

} // namespace detail

/// Mean cross-entropy of softmax(logits) or mean squared error over the batch.
inline double loss(const Matrix& predictions, const Matrix& targets, LossKind kind)
{
    if (predictions.rows() != targets.rows() || predictions.rows() == 0)
        throw std::invalid_argument("loss: batch size mismatch or empty batch");
    if (kind == LossKind::mean_squared_error) return mean_squared_error(predictions, targets);
    const auto labels = class_indices(targets, predictions.cols());
    double s = 0.0;
    for (std::size_t i = 0; i < labels.size(); ++i)
        s -= detail::log_softmax_row(predictions.row(i))[labels[i]];
    return s / static_cast<double>(labels.size());
}

/// dLoss/dPredictions for the batch-mean losses above.
inline Matrix loss_gradient(const Matrix& predictions, const Matrix& targets, LossKind kind)
{
    const double m = static_cast<double>(predictions.rows());
    Matrix g(predictions.rows(), predictions.cols());
    if (kind == LossKind::mean_squared_error) {
        if (predictions.cols() != targets.cols())
            throw std::invalid_argument("loss_gradient: target width mismatch");
        const double scale = 2.0 / static_cast<double>(predictions.size());
        for (std::size_t i = 0; i < g.size(); ++i)
            g.values()[i] = scale * (predictions.values()[i] - targets.values()[i]);
        return g;
    }
    const auto labels = class_indices(targets, predictions.cols());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const Vector ls = detail::log_softmax_row(predictions.row(i));
        auto gi = g.row(i);
        for (std::size_t c = 0; c < ls.size(); ++c) gi[c] = std::exp(ls[c]) / m;
        gi[labels[i]] -= 1.0 / m;
    }
    return g;
}

// ---------------------------------------------------------------------------
// Feedforward readout network

struct NetSpec {
    std::size_t input_dim = 0;
    std::vector<std::size_t> hidden{256, 128};
    std::size_t output_dim = 0;
    bool batch_norm = true;

    friend bool operator==(const NetSpec&, const NetSpec&) = default;
};

struct TrainConfig {
    double learning_rate = 0.001;
    double weight_decay = 0.001;
    double momentum = 0.01;
    std::size_t batch_size = 64;
    std::size_t epochs = 100;
    LossKind loss = LossKind::cross_entropy;
    std::uint64_t seed = 0;
    bool early_stop = true;
    std::size_t plateau_window = 10;
    double plateau_tolerance = 1e-5;

    void validate() const
    {
        if (!(learning_rate >= 0.0) || !(weight_decay >= 0.0) || !(momentum >= 0.0))
            throw std::invalid_argument("train config: rates must be >= 0");
        if (batch_size < 1) throw std::invalid_argument("train config: batch_size must be >= 1");
    }
};

/// Affine map followed, on hidden layers, by batch normalization and ReLU.
struct DenseLayer {
    Matrix weights;  ///< out × in
    Vector bias;
    bool batch_norm = false;
    bool relu = false;
    Vector gamma;
    Vector shift;
    Vector running_mean;
    Vector running_var;

    std::size_t in() const noexcept { return weights.cols(); }
    std::size_t out() const noexcept { return weights.rows(); }

    friend bool operator==(const DenseLayer&, const DenseLayer&) = default;
};

/// Gradient (or velocity) tensors, in the order of ReadoutNet::parameters().
struct Gradients {
    std::vector<Vector> tensors;
};

class ReadoutNet {
public:
    static constexpr double bn_epsilon = 1e-5;
    static constexpr double bn_momentum = 0.1;

    ReadoutNet() = default;

    /// Scaled-uniform weights, zero biases, γ = 1, shift 0, running mean 0, running var 1.
    ReadoutNet(const NetSpec& spec, std::uint64_t seed)
    {
        if (spec.input_dim == 0 || spec.output_dim == 0)
            throw std::invalid_argument("ReadoutNet: input and output widths must be >= 1");
        Rng rng{seed};
        std::size_t fan_in = spec.input_dim;
        auto make = [&](std::size_t out, bool hidden) {
            DenseLayer l;
            const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + out));
            l.weights = Matrix(out, fan_in);
            for (double& w : l.weights.values()) w = rng.uniform(-bound, bound);
            l.bias.assign(out, 0.0);
            l.relu = hidden;
            l.batch_norm = hidden && spec.batch_norm;
            if (l.batch_norm) {
                l.gamma.assign(out, 1.0);
                l.shift.assign(out, 0.0);
                l.running_mean.assign(out, 0.0);
                l.running_var.assign(out, 1.0);
            }
            fan_in = out;
            return l;
        };
        for (std::size_t h : spec.hidden) {
            if (h == 0) throw std::invalid_argument("ReadoutNet: hidden layer width must be >= 1");
            layers_.push_back(make(h, true));
        }
        layers_.push_back(make(spec.output_dim, false));
    }

    explicit ReadoutNet(std::vector<DenseLayer> layers) : layers_{std::move(layers)}
    {
        if (layers_.empty()) throw std::invalid_argument("ReadoutNet: no layers");
        for (std::size_t i = 1; i < layers_.size(); ++i)
            if (layers_[i].in() != layers_[i - 1].out())
                throw std::invalid_argument("ReadoutNet: layer widths do not chain");
        const auto& last = layers_.back();
        if (last.batch_norm || last.relu)
            throw std::invalid_argument("ReadoutNet: output layer must be affine only");
    }

    std::size_t input_dim() const noexcept { return layers_.front().in(); }
    std::size_t output_dim() const noexcept { return layers_.back().out(); }
    const std::vector<DenseLayer>& layers() const noexcept { return layers_; }
    Mode mode() const noexcept { return mode_; }
    void set_mode(Mode m) noexcept
    {
        mode_ = m;
        cache_.clear();
    }

    std::size_t parameter_count() const noexcept
    {
        std::size_t n = 0;
        for (const auto& l : layers_)
            n += l.weights.size() + l.bias.size() + l.gamma.size() + l.shift.size();
        return n;
    }

    /// Trainable tensors: per layer weights, bias, then γ and shift when batch-normalized.
    std::vector<std::span<double>> parameters()
    {
        std::vector<std::span<double>> p;
        for (auto& l : layers_) {
            p.emplace_back(l.weights.values());
            p.emplace_back(l.bias);
            if (l.batch_norm) {
                p.emplace_back(l.gamma);
                p.emplace_back(l.shift);
            }
        }
        return p;
    }

    /// Whether each tensor of parameters() receives weight decay (affine weights only).
    std::vector<bool> decayed() const
    {
        std::vector<bool> d;
        for (const auto& l : layers_) {
            d.insert(d.end(), {true, false});
            if (l.batch_norm) d.insert(d.end(), {false, false});
        }
        return d;
    }

    Gradients zero_gradients() const
    {
        Gradients g;
        for (const auto& l : layers_) {
            g.tensors.emplace_back(l.weights.size(), 0.0);
            g.tensors.emplace_back(l.bias.size(), 0.0);
            if (l.batch_norm) {
                g.tensors.emplace_back(l.gamma.size(), 0.0);
                g.tensors.emplace_back(l.shift.size(), 0.0);
            }
        }
        return g;
    }

    /// Train mode uses batch statistics, updates running statistics, and caches
    /// activations for backward(). Inference mode uses running statistics only.
    Matrix forward(const Matrix& batch, Mode mode)
    {
        if (mode == Mode::inference) return predict(batch);
        check_width(batch);
        if (batch.rows() < 2)
            throw std::invalid_argument("forward: train mode needs a batch of at least 2 rows");
        mode_ = Mode::train;
        cache_.assign(layers_.size(), {});
        Matrix a = batch;
        for (std::size_t li = 0; li < layers_.size(); ++li) {
            auto& l = layers_[li];
            auto& c = cache_[li];
            c.input = std::move(a);
            Matrix z = affine(l, c.input);
            if (l.batch_norm) {
                const std::size_t m = z.rows();
                c.mean.assign(l.out(), 0.0);
                c.inv_std.assign(l.out(), 0.0);
                Vector var(l.out(), 0.0);
                for (std::size_t i = 0; i < m; ++i)
                    for (std::size_t j = 0; j < l.out(); ++j) c.mean[j] += z(i, j);
                for (double& v : c.mean) v /= static_cast<double>(m);
                for (std::size_t i = 0; i < m; ++i)
                    for (std::size_t j = 0; j < l.out(); ++j) {
                        const double d = z(i, j) - c.mean[j];
                        var[j] += d * d;
                    }
                for (std::size_t j = 0; j < l.out(); ++j) {
                    var[j] /= static_cast<double>(m);
                    c.inv_std[j] = 1.0 / std::sqrt(var[j] + bn_epsilon);
                    const double unbiased = var[j] * static_cast<double>(m) / static_cast<double>(m - 1);
                    l.running_mean[j] = (1.0 - bn_momentum) * l.running_mean[j] + bn_momentum * c.mean[j];
                    l.running_var[j] = (1.0 - bn_momentum) * l.running_var[j] + bn_momentum * unbiased;
                }
                c.normalized = Matrix(m, l.out());
                for (std::size_t i = 0; i < m; ++i)
                    for (std::size_t j = 0; j < l.out(); ++j) {
                        const double xh = (z(i, j) - c.mean[j]) * c.inv_std[j];
                        c.normalized(i, j) = xh;
                        z(i, j) = l.gamma[j] * xh + l.shift[j];
                    }
            }
            if (l.relu)
                for (double& v : z.values()) v = v > 0.0 ? v : 0.0;
            c.output = z;
            a = std::move(z);
        }
        return a;
    }

    /// Inference-mode forward pass; a pure function of the batch.
    Matrix predict(const Matrix& batch) const
    {
        check_width(batch);
        Matrix a = batch;
        for (const auto& l : layers_) {
            Matrix z = affine(l, a);
            if (l.batch_norm)
                for (std::size_t i = 0; i < z.rows(); ++i)
                    for (std::size_t j = 0; j < l.out(); ++j) {
                        const double xh = (z(i, j) - l.running_mean[j])
                                          / std::sqrt(l.running_var[j] + bn_epsilon);
                        z(i, j) = l.gamma[j] * xh + l.shift[j];
                    }
            if (l.relu)
                for (double& v : z.values()) v = v > 0.0 ? v : 0.0;
            a = std::move(z);
        }
        return a;
    }

    /// Post-normalization, pre-γ activations of hidden layer `layer` from the last train forward.
    const Matrix& normalized_activations(std::size_t layer) const
    {
        if (cache_.empty()) throw std::logic_error("no train-mode forward pass cached");
        return cache_.at(layer).normalized;
    }

    struct BackwardResult {
        Gradients grads;
        double loss = 0.0;  ///< data loss plus ½·wd·Σ‖W‖²
    };

    /// Exact gradients of the batch loss plus ½·wd·Σ‖W‖² over affine weights,
    /// for the batch passed to the preceding train-mode forward().
    BackwardResult backward(const Matrix& targets, const TrainConfig& cfg) const
    {
        if (mode_ != Mode::train || cache_.empty())
            throw std::logic_error("backward: requires a preceding train-mode forward pass");
        const Matrix& out = cache_.back().output;
        BackwardResult res;
        res.loss = loss(out, targets, cfg.loss);
        Matrix delta = loss_gradient(out, targets, cfg.loss);

        std::vector<Vector> per_layer;  // collected back to front
        for (std::size_t li = layers_.size(); li-- > 0;) {
            const auto& l = layers_[li];
            const auto& c = cache_[li];
            const std::size_t m = delta.rows();
            if (l.relu)
                for (std::size_t i = 0; i < delta.size(); ++i)
                    if (!(c.output.values()[i] > 0.0)) delta.values()[i] = 0.0;
            Vector g_gamma, g_shift;
            if (l.batch_norm) {
                g_gamma.assign(l.out(), 0.0);
                g_shift.assign(l.out(), 0.0);
                Vector sum_dxh(l.out(), 0.0), sum_dxh_xh(l.out(), 0.0);
                for (std::size_t i = 0; i < m; ++i)
                    for (std::size_t j = 0; j < l.out(); ++j) {
                        const double dy = delta(i, j);
                        const double xh = c.normalized(i, j);
                        g_gamma[j] += dy * xh;
                        g_shift[j] += dy;
                        const double dxh = dy * l.gamma[j];
                        sum_dxh[j] += dxh;
                        sum_dxh_xh[j] += dxh * xh;
                    }
                const double md = static_cast<double>(m);
                for (std::size_t i = 0; i < m; ++i)
                    for (std::size_t j = 0; j < l.out(); ++j) {
                        const double dxh = delta(i, j) * l.gamma[j];
                        delta(i, j) = c.inv_std[j] / md
                                      * (md * dxh - sum_dxh[j] - c.normalized(i, j) * sum_dxh_xh[j]);
                    }
            }
            Matrix g_w = matmul_at_b(delta, c.input);
            if (cfg.weight_decay != 0.0) {
                for (std::size_t k = 0; k < g_w.size(); ++k)
                    g_w.values()[k] += cfg.weight_decay * l.weights.values()[k];
                res.loss += 0.5 * cfg.weight_decay * dot(l.weights.values(), l.weights.values());
            }
            Vector g_b(l.out(), 0.0);
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t j = 0; j < l.out(); ++j) g_b[j] += delta(i, j);
            if (l.batch_norm) {
                per_layer.push_back(std::move(g_shift));
                per_layer.push_back(std::move(g_gamma));
            }
            per_layer.push_back(std::move(g_b));
            per_layer.push_back(std::move(g_w.storage()));
            if (li > 0) delta = matmul(delta, l.weights);
        }
        res.grads.tensors.assign(per_layer.rbegin(), per_layer.rend());
        return res;
    }

    friend bool operator==(const ReadoutNet& a, const ReadoutNet& b) { return a.layers_ == b.layers_; }

private:
    struct Cache {
        Matrix input;
        Matrix normalized;
        Matrix output;
        Vector mean;
        Vector inv_std;
    };

    void check_width(const Matrix& batch) const
    {
        if (batch.cols() != input_dim())
            throw std::invalid_argument(
              "readout: batch width " + std::to_string(batch.cols()) + " != input width "
              + std::to_string(input_dim()));
    }

    static Matrix affine(const DenseLayer& l, const Matrix& x)
    {
        Matrix z = matmul_a_bt(x, l.weights);
        for (std::size_t i = 0; i < z.rows(); ++i)
            for (std::size_t j = 0; j < z.cols(); ++j) z(i, j) += l.bias[j];
        return z;
    }

    std::vector<DenseLayer> layers_;
    Mode mode_ = Mode::train;
    std::vector<Cache> cache_;
};

/// Classical (heavy-ball) momentum: v ← μv + g; θ ← θ − lr·v.
class SgdMomentum {
public:
    void step(ReadoutNet& net, const Gradients& grads, const TrainConfig& cfg)
    {
        auto params = net.parameters();
        if (grads.tensors.size() != params.size())
            throw std::invalid_argument("sgd_step: gradient set does not match the network");
        if (velocity_.tensors.empty()) velocity_ = net.zero_gradients();
        for (std::size_t t = 0; t < params.size(); ++t) {
            auto& v = velocity_.tensors[t];
            const auto& g = grads.tensors[t];
            if (g.size() != params[t].size())
                throw std::invalid_argument("sgd_step: gradient tensor size mismatch");
            for (std::size_t k = 0; k < g.size(); ++k) {
                v[k] = cfg.momentum * v[k] + g[k];
                params[t][k] -= cfg.learning_rate * v[k];
            }
        }
        ++steps_;
    }

    std::size_t steps() const noexcept { return steps_; }
    const Gradients& velocity() const noexcept { return velocity_; }

private:
    Gradients velocity_;
    std::size_t steps_ = 0;
};

struct BackpropFit {
    ReadoutNet net;
    std::vector<double> loss_history;  ///< mean training loss per epoch
    std::size_t steps = 0;
};

inline Matrix gather_rows(const Matrix& m, std::span<const std::size_t> idx)
{
    Matrix out(idx.size(), m.cols());
    for (std::size_t i = 0; i < idx.size(); ++i) {
        auto src = m.row(idx[i]);
        std::copy(src.begin(), src.end(), out.row(i).begin());
    }
    return out;
}

/// Minibatch SGD over seeded per-epoch permutations. A trailing partial batch is
/// kept when it has at least two rows. Returns the network in inference mode.
/// `on_epoch(epoch, loss)` is called after every epoch when provided.
inline BackpropFit fit_backprop(const Matrix& features, const Matrix& targets, NetSpec spec,
                                const TrainConfig& cfg,
                                const std::function<void(std::size_t, double)>& on_epoch = {})
{
    cfg.validate();
    if (features.rows() < 2) throw std::invalid_argument("fit_backprop: need at least 2 samples");
    if (features.rows() != targets.rows())
        throw std::invalid_argument("fit_backprop: features and targets differ in row count");
    if (cfg.epochs < 1) throw std::invalid_argument("fit_backprop: epochs must be >= 1");
    spec.input_dim = features.cols();

    BackpropFit fit{ReadoutNet{spec, derive_seed(cfg.seed, 0)}, {}, 0};
    Rng order_rng{derive_seed(cfg.seed, 1)};
    SgdMomentum opt;
    const std::size_t n = features.rows();
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        const auto perm = order_rng.permutation(n);
        double total = 0.0;
        std::size_t seen = 0;
        for (std::size_t start = 0; start < n; start += cfg.batch_size) {
            const std::size_t len = std::min(cfg.batch_size, n - start);
            if (len < 2) break;
            std::span<const std::size_t> idx{perm.data() + start, len};
            const Matrix xb = gather_rows(features, idx);
            const Matrix yb = gather_rows(targets, idx);
            fit.net.forward(xb, Mode::train);
            auto [grads, batch_loss] = fit.net.backward(yb, cfg);
            if (!std::isfinite(batch_loss))
                throw numerical_error(
                  "fit_backprop: non-finite loss at epoch " + std::to_string(epoch));
            opt.step(fit.net, grads, cfg);
            total += batch_loss * static_cast<double>(len);
            seen += len;
        }
        const double epoch_loss = total / static_cast<double>(seen);
        fit.loss_history.push_back(epoch_loss);
        if (on_epoch) on_epoch(epoch, epoch_loss);
        const std::size_t w = cfg.plateau_window;
        if (cfg.early_stop && w > 0 && fit.loss_history.size() > w) {
            const double before = fit.loss_history[fit.loss_history.size() - 1 - w];
            const double improvement = (before - epoch_loss) / std::abs(before);
            if (!(improvement >= cfg.plateau_tolerance)) break;
        }
    }
    for (auto p : fit.net.parameters())
        if (!all_finite(p)) throw numerical_error("fit_backprop: non-finite parameters after training");
    fit.net.set_mode(Mode::inference);
    fit.steps = opt.steps();
    return fit;
}

// ---------------------------------------------------------------------------
// Linear readout

/// y = x W (+ b). Weights are features × outputs.
struct LinearReadout {
    Matrix weights;
    Vector bias;  ///< empty when fitted without an intercept

    Matrix predict(const Matrix& features) const
    {
        if (features.cols() != weights.rows())
            throw std::invalid_argument(
              "linear readout: feature width " + std::to_string(features.cols()) + " != "
              + std::to_string(weights.rows()));
        Matrix y = matmul(features, weights);
        if (!bias.empty())
            for (std::size_t i = 0; i < y.rows(); ++i)
                for (std::size_t j = 0; j < y.cols(); ++j) y(i, j) += bias[j];
        return y;
    }

    friend bool operator==(const LinearReadout&, const LinearReadout&) = default;
};

/// Ridge-regression readout. With `intercept`, features and targets are centered
/// before solving and the offset is returned as a separate unpenalized bias.
inline LinearReadout fit_ridge(const Matrix& features, const Matrix& targets, double lambda,
                               bool intercept = false)
{
    if (!intercept) return {solve_ridge(features, targets, lambda), {}};
    const std::size_t n = features.rows();
    if (n == 0 || targets.rows() != n) throw std::invalid_argument("fit_ridge: shape mismatch");
    Vector fx(features.cols(), 0.0), fy(targets.cols(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < fx.size(); ++j) fx[j] += features(i, j);
        for (std::size_t j = 0; j < fy.size(); ++j) fy[j] += targets(i, j);
    }
    for (double& v : fx) v /= static_cast<double>(n);
    for (double& v : fy) v /= static_cast<double>(n);
    Matrix xc = features, yc = targets;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < fx.size(); ++j) xc(i, j) -= fx[j];
        for (std::size_t j = 0; j < fy.size(); ++j) yc(i, j) -= fy[j];
    }
    LinearReadout r{solve_ridge(xc, yc, lambda), {}};
    r.bias = fy;
    const Vector offset = transpose_matvec(r.weights, fx);
    for (std::size_t j = 0; j < fy.size(); ++j) r.bias[j] -= offset[j];
    return r;
}

} // namespace ringres
