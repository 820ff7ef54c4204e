#pragma once

// Numerical checks shared by the unit tests and the acceptance binary.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "uavdnn/diffusion.hpp"
#include "uavdnn/marl.hpp"
#include "uavdnn/nn.hpp"

namespace uavdnn::test {

inline constexpr double kFdStep = 1e-5;
// entries whose magnitude is below this are compared absolutely
inline constexpr double kGradFloor = 1e-6;

inline std::vector<double> flatten_grads(const MlpGrads& g)
{
    std::vector<double> out;
    for (std::size_t i = 0; i < g.weights.size(); ++i) {
        out.insert(out.end(), g.weights[i].data(), g.weights[i].data() + g.weights[i].size());
        out.insert(out.end(), g.biases[i].data(), g.biases[i].data() + g.biases[i].size());
    }
    return out;
}

inline double entry_rel_err(double analytic, double numeric)
{
    return std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), kGradFloor});
}

// Largest per-parameter relative error between `analytic` and central differences of `loss`.
inline double param_grad_error(Mlp& net, const std::function<double()>& loss, const MlpGrads& analytic)
{
    const auto a = flatten_grads(analytic);
    auto p = net.flatten();
    double worst = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double keep = p[i];
        p[i] = keep + kFdStep;
        net.unflatten(p);
        const double up = loss();
        p[i] = keep - kFdStep;
        net.unflatten(p);
        const double down = loss();
        p[i] = keep;
        net.unflatten(p);
        worst = std::max(worst, entry_rel_err(a[i], (up - down) / (2 * kFdStep)));
    }
    return worst;
}

inline Matrix gaussian(Eigen::Index rows, Eigen::Index cols, Rng& rng)
{
    Matrix m(rows, cols);
    for (Eigen::Index c = 0; c < cols; ++c)
        for (Eigen::Index r = 0; r < rows; ++r)
            m(r, c) = rng.normal();
    return m;
}

// Loss = sum(w .* f(x)) for a 3-layer tanh net.
inline double mlp_grad_check(std::uint64_t seed)
{
    Rng rng(seed);
    Mlp net({4, 6, 5, 3}, rng);
    const Matrix x = gaussian(4, 7, rng);
    const Matrix w = gaussian(3, 7, rng);
    auto loss = [&] { return (net.forward(x).array() * w.array()).sum(); };
    MlpTape tape;
    net.forward(x, tape);
    auto g = net.zero_grads();
    net.backward(tape, w, g);
    return param_grad_error(net, loss, g);
}

// dQ/d(action one-hot) from the critic's input gradient.
inline double critic_action_grad_check(std::uint64_t seed)
{
    Rng rng(seed);
    const int obs = 5, actions = 4, n = 6;
    Mlp critic({obs + actions, 8, 8, 1}, rng);
    Matrix x = Matrix::Zero(obs + actions, n);
    x.topRows(obs) = gaussian(obs, n, rng);
    for (int c = 0; c < n; ++c)
        x(obs + static_cast<int>(rng.uniform_index(actions)), c) = 1.0;
    MlpTape tape;
    critic.forward(x, tape);
    auto scratch = critic.zero_grads();
    const Matrix dx = critic.backward(tape, Matrix::Ones(1, n), scratch);
    double worst = 0.0;
    for (int c = 0; c < n; ++c)
        for (int r = obs; r < obs + actions; ++r) {
            Matrix up = x, down = x;
            up(r, c) += kFdStep;
            down(r, c) -= kFdStep;
            const double num = (critic.forward(up).sum() - critic.forward(down).sum()) / (2 * kFdStep);
            worst = std::max(worst, entry_rel_err(dx(r, c), num));
        }
    return worst;
}

// Actor loss -mean Q(g, softmax(x_0)) differentiated through a 3-step reverse
// chain with fresh noise; the same noise stream is replayed for every probe.
inline double chain_grad_check(std::uint64_t seed)
{
    Rng rng(seed);
    const int adim = 3, cdim = 2, n = 4;
    Denoiser actor(adim, cdim, {5}, make_schedule(3, 0.05, 0.2), rng);
    Mlp critic({cdim + adim, 6, 1}, rng);
    const Matrix cond = gaussian(cdim, n, rng);
    const Matrix x_T = gaussian(adim, n, rng);
    const Rng noise(split_seed(seed, 99));
    std::vector<std::uint8_t> mask{1, 0, 1};
    const std::vector<const std::vector<std::uint8_t>*> masks(n, &mask);

    auto q_input = [&](const Matrix& probs) {
        Matrix in(cdim + adim, n);
        in.topRows(cdim) = cond;
        in.bottomRows(adim) = probs;
        return in;
    };
    auto loss = [&] {
        Rng z = noise;
        const Matrix probs = masked_softmax(actor.generate(cond, x_T, &z), masks);
        return -critic.forward(q_input(probs)).sum() / n;
    };

    Rng z = noise;
    Denoiser::Chain chain;
    const Matrix probs = masked_softmax(actor.generate(cond, x_T, &z, &chain), masks);
    MlpTape ct;
    critic.forward(q_input(probs), ct);
    auto scratch = critic.zero_grads();
    const Matrix d_in = critic.backward(ct, Matrix::Constant(1, n, -1.0 / n), scratch);
    auto g = actor.net().zero_grads();
    actor.backward_chain(chain, softmax_backward(probs, d_in.bottomRows(adim)), g);
    return param_grad_error(actor.net(), loss, g);
}

// Largest |empirical var - (1 - abar_t)| in standard errors over every t,
// starting from x_0 = 0.
inline double forward_variance_zscore(const NoiseSchedule& sched, int samples, std::uint64_t seed)
{
    Rng rng(seed);
    double worst = 0.0;
    for (int t = 1; t <= sched.steps; ++t) {
        const Matrix noise = gaussian(1, samples, rng);
        const Matrix xt = forward_sample(Matrix::Zero(1, samples), t, noise, sched);
        const double mean = xt.mean();
        const double var = (xt.array() - mean).square().sum() / (samples - 1);
        const double expected = 1.0 - sched.alpha_bar(t);
        const double se = expected * std::sqrt(2.0 / (samples - 1));
        worst = std::max(worst, std::abs(var - expected) / se);
    }
    return worst;
}

struct LossDrop {
    double initial = 0.0;
    double final = 0.0;
    double ratio() const { return initial / final; }
};

// Two clusters selected by a +/-1 condition; loss measured on a fixed
// evaluation set with a fixed (t, eps) stream before and after training.
inline LossDrop denoising_loss_drop(std::uint64_t seed, int updates)
{
    Rng init(seed);
    Denoiser d(2, 1, {64, 64}, make_schedule(10, 1e-4, 0.05), init);
    Optimizer opt(d.net(), {1e-3, true});
    auto draw = [](int n, Rng& r) {
        Matrix x0(2, n), c(1, n);
        for (int i = 0; i < n; ++i) {
            const double s = r.uniform() < 0.5 ? -1.0 : 1.0;
            c(0, i) = s;
            x0(0, i) = s;
            x0(1, i) = -0.5 * s;
        }
        return std::pair{x0, c};
    };
    Rng eval_rng(split_seed(seed, 1));
    const auto [ex, ec] = draw(4096, eval_rng);
    const auto eval = [&] {
        Rng r(split_seed(seed, 2));
        return d.denoising_loss(ex, ec, r);
    };
    LossDrop out;
    out.initial = eval();
    Rng data(split_seed(seed, 3));
    for (int u = 0; u < updates; ++u) {
        const auto [x, c] = draw(128, data);
        auto g = d.net().zero_grads();
        d.denoising_loss(x, c, data, &g);
        opt.step(d.net(), g);
    }
    out.final = eval();
    return out;
}

} // namespace uavdnn::test
