#pragma once

#include <vector>

#include "uavdnn/nn.hpp"
#include "uavdnn/rng.hpp"

namespace uavdnn {

/// Linear beta schedule; index t runs 1..steps (vectors are 0-based).
struct NoiseSchedule {
    int steps = 0;
    std::vector<double> betas;
    std::vector<double> alphas;
    std::vector<double> alpha_bars;

    double beta(int t) const { return betas.at(static_cast<std::size_t>(t - 1)); }
    double alpha(int t) const { return alphas.at(static_cast<std::size_t>(t - 1)); }
    double alpha_bar(int t) const { return alpha_bars.at(static_cast<std::size_t>(t - 1)); }
};

NoiseSchedule make_schedule(int steps, double beta_start, double beta_end);

/// Columns are samples.
Matrix forward_sample(const Matrix& x0, int t, const Matrix& noise, const NoiseSchedule& sched);
Matrix reverse_step(const Matrix& xt, int t, const Matrix& eps_pred, const Matrix& fresh_noise,
                    const NoiseSchedule& sched);

/// Noise predictor conditioned on an observation; input is [x_t; g; t/T].
class Denoiser {
public:
    Denoiser() = default;
    Denoiser(int action_dim, int cond_dim, const std::vector<int>& hidden, NoiseSchedule sched, Rng& rng);

    int action_dim() const { return action_dim_; }
    int cond_dim() const { return cond_dim_; }
    const NoiseSchedule& schedule() const { return sched_; }
    Mlp& net() { return net_; }
    const Mlp& net() const { return net_; }

    Matrix predict_noise(const Matrix& xt, const Matrix& cond, int t, MlpTape* tape = nullptr) const;

    /// Everything needed to differentiate through a generated chain.
    struct Chain {
        Matrix cond;
        /// x[t] for t = 0..T
        std::vector<Matrix> x;
        /// tapes[t] from predicting noise at step t (index 0 unused)
        std::vector<MlpTape> tapes;
    };

    /// Runs the reverse chain from x_T. Fresh noise is drawn from `fresh` for
    /// t > 1 (none at all when `fresh` is null); the last step is noise-free.
    Matrix generate(const Matrix& cond, const Matrix& x_T, Rng* fresh, Chain* chain = nullptr) const;
    /// Same, drawing x_T from `rng`.
    Matrix sample(const Matrix& cond, Rng& rng, bool fresh_noise, Chain* chain = nullptr) const;

    /// Accumulates parameter gradients of a loss given dL/dx_0. Fresh noises
    /// are treated as constants.
    void backward_chain(const Chain& chain, const Matrix& d_x0, MlpGrads& grads) const;

    /// Mean over samples of ||eps - eps_theta(x_t, g, t)||^2 with t uniform in
    /// 1..T. Accumulates gradients when `grads` is given.
    double denoising_loss(const Matrix& x0, const Matrix& cond, Rng& rng, MlpGrads* grads = nullptr) const;

private:
    Matrix build_input(const Matrix& xt, const Matrix& cond, const std::vector<int>& t) const;

    int action_dim_ = 0;
    int cond_dim_ = 0;
    NoiseSchedule sched_;
    Mlp net_;
};

} // namespace uavdnn
