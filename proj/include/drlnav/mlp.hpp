#pragma once

#include <iosfwd>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "drlnav/matrix.hpp"

namespace drlnav {

using Rng = std::mt19937_64;

enum class Activation { Relu, Linear, Tanh };
enum class Head { Plain, Dueling };

struct LayerSpec {
    int in = 0;
    int out = 0;
    Activation act = Activation::Linear;
};

struct DenseLayer {
    Matrix w;  // out x in
    std::vector<double> b;
    Activation act = Activation::Linear;
};

/// Batch of one-hot rows, stored as the hot index per row. Lets the first
/// layer skip the full input-width product (the discrete stage feeds
/// one-hot state encodings, where this is the dominant cost).
struct OneHotBatch {
    int width = 0;
    std::vector<int> indices;
    int rows() const { return static_cast<int>(indices.size()); }
};

/// Everything forward() touched, kept so backward() can replay it exactly.
struct BatchTrace {
    Matrix input;                // empty when the input was one-hot
    OneHotBatch onehot;          // width 0 when the input was dense
    std::vector<Matrix> pre;     // per trunk layer, batch x out
    std::vector<Matrix> post;    // activations of `pre`
    Matrix value_pre;            // dueling head: batch x 1
    Matrix adv_pre;              // dueling head: batch x actions
    Matrix output;               // batch x output_width
    int batch = 0;
};

struct DenseGrad {
    Matrix dw;
    std::vector<double> db;
};

/// Gradient blocks aligned with Mlp::unit_count() (trunk layers, then the
/// value and advantage heads for dueling nets).
struct MlpGrads {
    std::vector<DenseGrad> units;
    Matrix dinput;  // filled only when requested from backward()
};

/// Dense feed-forward net with manual reverse-mode gradients. Holds either a
/// plain chain (last trunk layer is the output) or a dueling head where the
/// final hidden representation feeds parallel value/advantage streams.
class Mlp {
public:
    Mlp() = default;

    /// Plain chain; consecutive widths must match. Weights and biases drawn
    /// uniformly from +-1/sqrt(fan_in).
    static Mlp plain(const std::vector<LayerSpec>& specs, Rng& rng);

    /// Hidden chain followed by linear value (width 1) and advantage
    /// (width action_count) streams combined with mean-centred advantages.
    static Mlp dueling(const std::vector<LayerSpec>& hidden, int action_count, Rng& rng);

    BatchTrace forward(const Matrix& input) const;
    BatchTrace forward(const OneHotBatch& input) const;
    std::vector<double> forward(std::span<const double> input) const;
    std::vector<double> forward_onehot(int index, int width) const;

    /// Gradients of sum_b dot(output[b], output_grad[b]) w.r.t. every
    /// parameter; trace must come from forward() on this net.
    MlpGrads backward(const BatchTrace& trace, const Matrix& output_grad,
                      bool want_input_grad = false) const;

    int input_width() const;
    int output_width() const;
    Head head() const { return head_; }
    int unit_count() const;
    size_t param_count() const;

    /// Parameter storage as ordered spans (per unit: weights then bias);
    /// the same order grads and Adam state use.
    std::vector<std::span<double>> param_blocks();
    std::vector<std::span<const double>> param_blocks() const;

    bool same_architecture(const Mlp& o) const;
    MlpGrads zero_grads() const;

    void save(std::ostream& os) const;
    static Mlp load(std::istream& is);
    void save_file(const std::string& path) const;
    static Mlp load_file(const std::string& path);

    const std::vector<DenseLayer>& trunk() const { return trunk_; }
    const DenseLayer& value_head() const { return value_; }
    const DenseLayer& advantage_head() const { return advantage_; }

private:
    std::vector<DenseLayer> trunk_;
    DenseLayer value_;      // dueling only
    DenseLayer advantage_;  // dueling only
    Head head_ = Head::Plain;
};

/// Q[a] = value + advantage[a] - mean(advantage); mean(Q) == value.
std::vector<double> dueling_combine(double value, std::span<const double> advantages);

/// Mean squared error and its gradient 2*(pred-target)/N.
std::pair<double, std::vector<double>> mse_loss(std::span<const double> pred,
                                                std::span<const double> target);

/// target <- tau*source + (1-tau)*target, parameter-wise.
void soft_update(Mlp& target, const Mlp& source, double tau);
void hard_update(Mlp& target, const Mlp& source);

const char* activation_name(Activation a);

}  // namespace drlnav
