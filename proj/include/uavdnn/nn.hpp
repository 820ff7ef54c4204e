#pragma once

#include <Eigen/Dense>
#include <vector>

#include "uavdnn/rng.hpp"

namespace uavdnn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Gradients (or any same-shaped quantity) for an Mlp.
struct MlpGrads {
    std::vector<Matrix> weights;
    std::vector<Vector> biases;

    void set_zero();
    MlpGrads& operator+=(const MlpGrads& o);
    MlpGrads& operator*=(double k);
    double squared_norm() const;
};

/// Activations kept from a forward pass, consumed by backward().
struct MlpTape {
    /// inputs to each layer; inputs[0] is the network input
    std::vector<Matrix> inputs;
};

/// Fully connected network: tanh hidden layers, linear head. Columns of the
/// input matrix are samples.
class Mlp {
public:
    Mlp() = default;
    /// sizes = {in, hidden..., out}; weights ~ N(0,1)/sqrt(fan_in), biases 0.
    Mlp(const std::vector<int>& sizes, Rng& rng);

    int input_dim() const { return static_cast<int>(weights_.front().cols()); }
    int output_dim() const { return static_cast<int>(weights_.back().rows()); }
    std::size_t num_layers() const { return weights_.size(); }

    Matrix forward(const Matrix& x) const;
    Matrix forward(const Matrix& x, MlpTape& tape) const;
    /// Accumulates parameter gradients into `grads` and returns dL/dx.
    Matrix backward(const MlpTape& tape, const Matrix& d_out, MlpGrads& grads) const;

    MlpGrads zero_grads() const;

    std::vector<Matrix>& weights() { return weights_; }
    std::vector<Vector>& biases() { return biases_; }
    const std::vector<Matrix>& weights() const { return weights_; }
    const std::vector<Vector>& biases() const { return biases_; }

    std::size_t parameter_count() const;
    std::vector<double> flatten() const;
    void unflatten(const std::vector<double>& values);
    bool all_finite() const;

private:
    std::vector<Matrix> weights_;
    std::vector<Vector> biases_;
};

/// target <- tau * online + (1 - tau) * target
void soft_update(Mlp& target, const Mlp& online, double tau);

struct OptimizerConfig {
    double learning_rate = 1e-3;
    bool adam = false;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    /// gradients are rescaled to this global norm when larger; 0 disables
    double clip_norm = 0.0;
};

class Optimizer {
public:
    Optimizer() = default;
    Optimizer(const Mlp& net, OptimizerConfig cfg);
    /// Descends along `grads`.
    void step(Mlp& net, const MlpGrads& grads);

private:
    OptimizerConfig cfg_;
    MlpGrads m_;
    MlpGrads v_;
    long steps_ = 0;
};

} // namespace uavdnn
