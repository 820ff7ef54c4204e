#include "uavdnn/diffusion.hpp"

#include <cmath>

#include "uavdnn/error.hpp"

namespace uavdnn {

NoiseSchedule make_schedule(int steps, double beta_start, double beta_end)
{
    if (steps < 1)
        throw ValidationError("schedule: steps must be >= 1");
    if (!(beta_start > 0.0 && beta_start <= beta_end && beta_end < 1.0))
        throw ValidationError("schedule: need 0 < beta_start <= beta_end < 1");
    NoiseSchedule s;
    s.steps = steps;
    double bar = 1.0;
    for (int t = 1; t <= steps; ++t) {
        const double beta =
            steps == 1 ? beta_start : beta_start + (beta_end - beta_start) * (t - 1) / static_cast<double>(steps - 1);
        s.betas.push_back(beta);
        s.alphas.push_back(1.0 - beta);
        bar *= 1.0 - beta;
        s.alpha_bars.push_back(bar);
    }
    return s;
}

Matrix forward_sample(const Matrix& x0, int t, const Matrix& noise, const NoiseSchedule& sched)
{
    const double ab = sched.alpha_bar(t);
    return std::sqrt(ab) * x0 + std::sqrt(1.0 - ab) * noise;
}

Matrix reverse_step(const Matrix& xt, int t, const Matrix& eps_pred, const Matrix& fresh_noise,
                    const NoiseSchedule& sched)
{
    const double a = sched.alpha(t);
    const double b = sched.beta(t);
    const double ab = sched.alpha_bar(t);
    return xt / std::sqrt(a) - b / std::sqrt(a * (1.0 - ab)) * eps_pred + std::sqrt(b) * fresh_noise;
}

Denoiser::Denoiser(int action_dim, int cond_dim, const std::vector<int>& hidden, NoiseSchedule sched, Rng& rng)
    : action_dim_(action_dim), cond_dim_(cond_dim), sched_(std::move(sched))
{
    std::vector<int> sizes{action_dim + cond_dim + 1};
    sizes.insert(sizes.end(), hidden.begin(), hidden.end());
    sizes.push_back(action_dim);
    net_ = Mlp(sizes, rng);
}

Matrix Denoiser::build_input(const Matrix& xt, const Matrix& cond, const std::vector<int>& t) const
{
    if (xt.rows() != action_dim_ || cond.rows() != cond_dim_ || xt.cols() != cond.cols())
        throw ShapeError("denoiser: input shape mismatch");
    Matrix in(action_dim_ + cond_dim_ + 1, xt.cols());
    in.topRows(action_dim_) = xt;
    in.middleRows(action_dim_, cond_dim_) = cond;
    for (Eigen::Index c = 0; c < xt.cols(); ++c)
        in(action_dim_ + cond_dim_, c) = static_cast<double>(t[static_cast<std::size_t>(c)]) / sched_.steps;
    return in;
}

Matrix Denoiser::predict_noise(const Matrix& xt, const Matrix& cond, int t, MlpTape* tape) const
{
    const std::vector<int> ts(static_cast<std::size_t>(xt.cols()), t);
    const Matrix in = build_input(xt, cond, ts);
    if (tape)
        return net_.forward(in, *tape);
    return net_.forward(in);
}

Matrix Denoiser::generate(const Matrix& cond, const Matrix& x_T, Rng* fresh, Chain* chain) const
{
    const int T = sched_.steps;
    if (chain) {
        chain->cond = cond;
        chain->x.assign(static_cast<std::size_t>(T + 1), Matrix());
        chain->tapes.assign(static_cast<std::size_t>(T + 1), MlpTape());
        chain->x[static_cast<std::size_t>(T)] = x_T;
    }
    Matrix x = x_T;
    Matrix z = Matrix::Zero(x.rows(), x.cols());
    for (int t = T; t >= 1; --t) {
        MlpTape* tape = chain ? &chain->tapes[static_cast<std::size_t>(t)] : nullptr;
        const Matrix eps = predict_noise(x, cond, t, tape);
        if (fresh != nullptr && t > 1) {
            for (Eigen::Index c = 0; c < z.cols(); ++c)
                for (Eigen::Index r = 0; r < z.rows(); ++r)
                    z(r, c) = fresh->normal();
        } else {
            z.setZero();
        }
        x = reverse_step(x, t, eps, z, sched_);
        if (chain)
            chain->x[static_cast<std::size_t>(t - 1)] = x;
    }
    return x;
}

Matrix Denoiser::sample(const Matrix& cond, Rng& rng, bool fresh_noise, Chain* chain) const
{
    Matrix x_T(action_dim_, cond.cols());
    for (Eigen::Index c = 0; c < x_T.cols(); ++c)
        for (Eigen::Index r = 0; r < x_T.rows(); ++r)
            x_T(r, c) = rng.normal();
    return generate(cond, x_T, fresh_noise ? &rng : nullptr, chain);
}

void Denoiser::backward_chain(const Chain& chain, const Matrix& d_x0, MlpGrads& grads) const
{
    Matrix d = d_x0;
    for (int t = 1; t <= sched_.steps; ++t) {
        const double a = sched_.alpha(t);
        const double k = sched_.beta(t) / std::sqrt(a * (1.0 - sched_.alpha_bar(t)));
        const Matrix d_in = net_.backward(chain.tapes[static_cast<std::size_t>(t)], -k * d, grads);
        d = d / std::sqrt(a) + d_in.topRows(action_dim_);
    }
}

double Denoiser::denoising_loss(const Matrix& x0, const Matrix& cond, Rng& rng, MlpGrads* grads) const
{
    const auto n = x0.cols();
    if (n == 0)
        throw ShapeError("denoising_loss: empty batch");
    std::vector<int> ts(static_cast<std::size_t>(n));
    Matrix eps(x0.rows(), n);
    Matrix xt(x0.rows(), n);
    for (Eigen::Index c = 0; c < n; ++c) {
        const int t = 1 + static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(sched_.steps)));
        ts[static_cast<std::size_t>(c)] = t;
        for (Eigen::Index r = 0; r < x0.rows(); ++r)
            eps(r, c) = rng.normal();
        const double ab = sched_.alpha_bar(t);
        xt.col(c) = std::sqrt(ab) * x0.col(c) + std::sqrt(1.0 - ab) * eps.col(c);
    }
    MlpTape tape;
    const Matrix pred = net_.forward(build_input(xt, cond, ts), tape);
    const Matrix diff = pred - eps;
    const double loss = diff.squaredNorm() / static_cast<double>(n);
    if (grads)
        net_.backward(tape, 2.0 * diff / static_cast<double>(n), *grads);
    return loss;
}

} // namespace uavdnn
