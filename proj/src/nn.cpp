#include "uavdnn/nn.hpp"

#include <cmath>

#include "uavdnn/error.hpp"

namespace uavdnn {

void MlpGrads::set_zero()
{
    for (auto& w : weights)
        w.setZero();
    for (auto& b : biases)
        b.setZero();
}

MlpGrads& MlpGrads::operator+=(const MlpGrads& o)
{
    for (std::size_t i = 0; i < weights.size(); ++i) {
        weights[i] += o.weights[i];
        biases[i] += o.biases[i];
    }
    return *this;
}

MlpGrads& MlpGrads::operator*=(double k)
{
    for (std::size_t i = 0; i < weights.size(); ++i) {
        weights[i] *= k;
        biases[i] *= k;
    }
    return *this;
}

double MlpGrads::squared_norm() const
{
    double s = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i)
        s += weights[i].squaredNorm() + biases[i].squaredNorm();
    return s;
}

Mlp::Mlp(const std::vector<int>& sizes, Rng& rng)
{
    if (sizes.size() < 2)
        throw ShapeError("mlp: need at least input and output sizes");
    for (std::size_t i = 0; i + 1 < sizes.size(); ++i) {
        const int in = sizes[i];
        const int out = sizes[i + 1];
        if (in < 1 || out < 1)
            throw ShapeError("mlp: layer sizes must be positive");
        Matrix w(out, in);
        const double scale = 1.0 / std::sqrt(static_cast<double>(in));
        // column-major fill keeps the draw order independent of Eigen internals
        for (int c = 0; c < in; ++c)
            for (int r = 0; r < out; ++r)
                w(r, c) = rng.normal() * scale;
        weights_.push_back(std::move(w));
        biases_.push_back(Vector::Zero(out));
    }
}

Matrix Mlp::forward(const Matrix& x) const
{
    MlpTape tape;
    return forward(x, tape);
}

Matrix Mlp::forward(const Matrix& x, MlpTape& tape) const
{
    if (x.rows() != input_dim())
        throw ShapeError("mlp: input has " + std::to_string(x.rows()) + " rows, expected " +
                         std::to_string(input_dim()));
    tape.inputs.clear();
    tape.inputs.reserve(weights_.size());
    Matrix h = x;
    for (std::size_t i = 0; i < weights_.size(); ++i) {
        tape.inputs.push_back(h);
        Matrix z = weights_[i] * h;
        z.colwise() += biases_[i];
        if (i + 1 < weights_.size())
            h = z.array().tanh().matrix();
        else
            h = std::move(z);
    }
    return h;
}

Matrix Mlp::backward(const MlpTape& tape, const Matrix& d_out, MlpGrads& grads) const
{
    if (d_out.rows() != output_dim() || tape.inputs.size() != weights_.size() ||
        d_out.cols() != tape.inputs.front().cols())
        throw ShapeError("mlp: backward shape mismatch");
    Matrix delta = d_out;
    for (std::size_t i = weights_.size(); i-- > 0;) {
        grads.weights[i].noalias() += delta * tape.inputs[i].transpose();
        grads.biases[i] += delta.rowwise().sum();
        Matrix d_in = weights_[i].transpose() * delta;
        if (i > 0) {
            // inputs[i] is tanh output of layer i-1
            const auto& h = tape.inputs[i];
            delta = (d_in.array() * (1.0 - h.array().square())).matrix();
        } else {
            return d_in;
        }
    }
    return delta;
}

MlpGrads Mlp::zero_grads() const
{
    MlpGrads g;
    for (std::size_t i = 0; i < weights_.size(); ++i) {
        g.weights.push_back(Matrix::Zero(weights_[i].rows(), weights_[i].cols()));
        g.biases.push_back(Vector::Zero(biases_[i].size()));
    }
    return g;
}

std::size_t Mlp::parameter_count() const
{
    std::size_t n = 0;
    for (std::size_t i = 0; i < weights_.size(); ++i)
        n += static_cast<std::size_t>(weights_[i].size() + biases_[i].size());
    return n;
}

std::vector<double> Mlp::flatten() const
{
    std::vector<double> out;
    out.reserve(parameter_count());
    for (std::size_t i = 0; i < weights_.size(); ++i) {
        out.insert(out.end(), weights_[i].data(), weights_[i].data() + weights_[i].size());
        out.insert(out.end(), biases_[i].data(), biases_[i].data() + biases_[i].size());
    }
    return out;
}

void Mlp::unflatten(const std::vector<double>& values)
{
    if (values.size() != parameter_count())
        throw ShapeError("mlp: parameter vector has wrong length");
    std::size_t k = 0;
    for (std::size_t i = 0; i < weights_.size(); ++i) {
        std::copy(values.begin() + static_cast<long>(k), values.begin() + static_cast<long>(k + weights_[i].size()),
                  weights_[i].data());
        k += static_cast<std::size_t>(weights_[i].size());
        std::copy(values.begin() + static_cast<long>(k), values.begin() + static_cast<long>(k + biases_[i].size()),
                  biases_[i].data());
        k += static_cast<std::size_t>(biases_[i].size());
    }
}

bool Mlp::all_finite() const
{
    for (std::size_t i = 0; i < weights_.size(); ++i)
        if (!weights_[i].allFinite() || !biases_[i].allFinite())
            return false;
    return true;
}

void soft_update(Mlp& target, const Mlp& online, double tau)
{
    if (!(tau > 0.0 && tau <= 1.0))
        throw ValidationError("soft_update: tau must lie in (0,1]");
    if (target.num_layers() != online.num_layers())
        throw ShapeError("soft_update: layer count mismatch");
    for (std::size_t i = 0; i < online.num_layers(); ++i) {
        auto& tw = target.weights()[i];
        auto& tb = target.biases()[i];
        const auto& ow = online.weights()[i];
        const auto& ob = online.biases()[i];
        if (tw.rows() != ow.rows() || tw.cols() != ow.cols())
            throw ShapeError("soft_update: shape mismatch");
        tw = tau * ow + (1.0 - tau) * tw;
        tb = tau * ob + (1.0 - tau) * tb;
    }
}

Optimizer::Optimizer(const Mlp& net, OptimizerConfig cfg) : cfg_(cfg)
{
    if (cfg_.adam) {
        m_ = net.zero_grads();
        v_ = net.zero_grads();
    }
}

void Optimizer::step(Mlp& net, const MlpGrads& grads)
{
    double scale = 1.0;
    if (cfg_.clip_norm > 0.0) {
        const double norm = std::sqrt(grads.squared_norm());
        if (norm > cfg_.clip_norm)
            scale = cfg_.clip_norm / norm;
    }
    const double lr = cfg_.learning_rate;
    if (!cfg_.adam) {
        for (std::size_t i = 0; i < net.num_layers(); ++i) {
            net.weights()[i] -= lr * scale * grads.weights[i];
            net.biases()[i] -= lr * scale * grads.biases[i];
        }
        return;
    }
    ++steps_;
    const double c1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(steps_));
    const double c2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(steps_));
    auto update = [&](auto& param, auto& m, auto& v, const auto& g) {
        m = cfg_.beta1 * m + (1.0 - cfg_.beta1) * (scale * g);
        v = cfg_.beta2 * v + (1.0 - cfg_.beta2) * (scale * g).cwiseAbs2();
        param.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + cfg_.epsilon);
    };
    for (std::size_t i = 0; i < net.num_layers(); ++i) {
        update(net.weights()[i], m_.weights[i], v_.weights[i], grads.weights[i]);
        update(net.biases()[i], m_.biases[i], v_.biases[i], grads.biases[i]);
    }
}

} // namespace uavdnn
