#include "uavdnn/marl.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "uavdnn/checkpoint.hpp"
#include "uavdnn/csv.hpp"
#include "uavdnn/error.hpp"

namespace uavdnn {

// ---------------------------------------------------------------------------
// config

namespace {

double parse_double(const std::string& key, const std::string& v)
{
    double out = 0.0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size())
        throw ValidationError("config " + key + ": not a number: '" + v + "'");
    return out;
}

long parse_long(const std::string& key, const std::string& v)
{
    long out = 0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size())
        throw ValidationError("config " + key + ": not an integer: '" + v + "'");
    return out;
}

bool parse_bool(const std::string& key, const std::string& v)
{
    if (v == "1" || v == "true")
        return true;
    if (v == "0" || v == "false")
        return false;
    throw ValidationError("config " + key + ": expected true/false");
}

} // namespace

void apply_override(TrainConfig& c, const std::string& key, const std::string& v)
{
    if (key == "episodes")
        c.episodes = static_cast<int>(parse_long(key, v));
    else if (key == "batch")
        c.batch = static_cast<int>(parse_long(key, v));
    else if (key == "lr")
        c.actor_lr = c.critic_lr = parse_double(key, v);
    else if (key == "actor_lr")
        c.actor_lr = parse_double(key, v);
    else if (key == "critic_lr")
        c.critic_lr = parse_double(key, v);
    else if (key == "discount")
        c.discount = parse_double(key, v);
    else if (key == "tau_soft")
        c.tau_soft = parse_double(key, v);
    else if (key == "epsilon0")
        c.epsilon0 = parse_double(key, v);
    else if (key == "epsilon_decay")
        c.epsilon_decay = parse_double(key, v);
    else if (key == "epsilon_min")
        c.epsilon_min = parse_double(key, v);
    else if (key == "hidden") {
        std::vector<int> h;
        std::stringstream ss(v);
        std::string part;
        while (std::getline(ss, part, 'x'))
            h.push_back(static_cast<int>(parse_long(key, part)));
        if (h.empty())
            throw ValidationError("config hidden: expected e.g. 256x256");
        c.hidden = h;
    } else if (key == "diffusion_steps")
        c.diffusion_steps = static_cast<int>(parse_long(key, v));
    else if (key == "beta_start")
        c.beta_start = parse_double(key, v);
    else if (key == "beta_end")
        c.beta_end = parse_double(key, v);
    else if (key == "buffer_capacity")
        c.buffer_capacity = static_cast<std::size_t>(parse_long(key, v));
    else if (key == "adam")
        c.adam = parse_bool(key, v);
    else if (key == "clip_norm")
        c.clip_norm = parse_double(key, v);
    else if (key == "logit_reg")
        c.logit_reg = parse_double(key, v);
    else if (key == "aux_bc_weight")
        c.aux_bc_weight = parse_double(key, v);
    else if (key == "target_noise")
        c.target_noise = parse_double(key, v);
    else if (key == "shared_critic")
        c.shared_critic = parse_bool(key, v);
    else if (key == "updates_per_step")
        c.updates_per_step = static_cast<int>(parse_long(key, v));
    else if (key == "eval_every")
        c.eval_every = static_cast<int>(parse_long(key, v));
    else if (key == "eval_episodes")
        c.eval_episodes = static_cast<int>(parse_long(key, v));
    else
        throw ValidationError("config: unknown key " + key);
}

void check_config(const TrainConfig& c)
{
    auto rate = [](double x) { return x > 0.0 && x <= 1.0; };
    if (c.episodes < 0)
        throw ValidationError("config episodes: must be >= 0");
    if (c.batch < 1 || static_cast<std::size_t>(c.batch) > c.buffer_capacity)
        throw ValidationError("config batch: must lie in [1, buffer_capacity]");
    if (!rate(c.actor_lr) || !rate(c.critic_lr) || !rate(c.discount) || !rate(c.tau_soft) || !rate(c.epsilon0))
        throw ValidationError("config: rates must lie in (0,1]");
    if (c.epsilon_decay < 0.0 || c.epsilon_decay >= 1.0 || c.epsilon_min < 0.0 || c.epsilon_min > c.epsilon0)
        throw ValidationError("config: epsilon schedule out of range");
    if (c.hidden.empty() || std::any_of(c.hidden.begin(), c.hidden.end(), [](int h) { return h < 1; }))
        throw ValidationError("config hidden: widths must be positive");
    if (c.updates_per_step < 0 || c.eval_every < 1 || c.eval_episodes < 1)
        throw ValidationError("config: updates_per_step >= 0, eval_every >= 1, eval_episodes >= 1");
}

// ---------------------------------------------------------------------------
// replay buffer

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity)
{
    if (capacity_ == 0)
        throw ValidationError("replay buffer: capacity must be > 0");
}

void ReplayBuffer::push(Transition t)
{
    if (items_.size() < capacity_) {
        items_.push_back(std::move(t));
        return;
    }
    items_[head_] = std::move(t);
    head_ = (head_ + 1) % capacity_;
}

const Transition& ReplayBuffer::at(std::size_t i) const
{
    if (i >= items_.size())
        throw StateError("replay buffer: index out of range");
    return items_[(head_ + i) % items_.size()];
}

std::vector<const Transition*> ReplayBuffer::sample(std::size_t k, Rng& rng) const
{
    const std::size_t n = items_.size();
    if (k > n)
        throw StateError("replay buffer: batch larger than contents");
    // Floyd's algorithm: k distinct indices in O(k log k)
    std::set<std::size_t> chosen;
    for (std::size_t j = n - k; j < n; ++j) {
        const auto t = static_cast<std::size_t>(rng.uniform_index(j + 1));
        if (!chosen.insert(t).second)
            chosen.insert(j);
    }
    std::vector<const Transition*> out;
    out.reserve(k);
    for (auto i : chosen)
        out.push_back(&items_[i]);
    return out;
}

// ---------------------------------------------------------------------------
// softmax helpers

double td_target(double reward, double next_q, double discount, bool terminal)
{
    return terminal ? reward : reward + discount * next_q;
}

Matrix masked_softmax(const Matrix& logits, const std::vector<const std::vector<std::uint8_t>*>& masks)
{
    Matrix p = Matrix::Zero(logits.rows(), logits.cols());
    for (Eigen::Index c = 0; c < logits.cols(); ++c) {
        const auto& m = *masks[static_cast<std::size_t>(c)];
        double hi = -std::numeric_limits<double>::infinity();
        for (Eigen::Index r = 0; r < logits.rows(); ++r)
            if (m[static_cast<std::size_t>(r)])
                hi = std::max(hi, logits(r, c));
        double sum = 0.0;
        for (Eigen::Index r = 0; r < logits.rows(); ++r)
            if (m[static_cast<std::size_t>(r)]) {
                p(r, c) = std::exp(logits(r, c) - hi);
                sum += p(r, c);
            }
        p.col(c) /= sum;
    }
    return p;
}

Matrix softmax_backward(const Matrix& probs, const Matrix& d_probs)
{
    Matrix d = Matrix::Zero(probs.rows(), probs.cols());
    for (Eigen::Index c = 0; c < probs.cols(); ++c) {
        const double dot = probs.col(c).dot(d_probs.col(c));
        d.col(c) = probs.col(c).cwiseProduct(d_probs.col(c) - Vector::Constant(probs.rows(), dot));
    }
    return d;
}

int masked_argmax(const Vector& logits, const std::vector<std::uint8_t>& mask)
{
    int best = 0;
    double hi = -std::numeric_limits<double>::infinity();
    for (Eigen::Index r = 0; r < logits.size(); ++r)
        if (mask[static_cast<std::size_t>(r)] && logits(r) > hi) {
            hi = logits(r);
            best = static_cast<int>(r);
        }
    return best;
}

// ---------------------------------------------------------------------------
// actor

Actor::Actor(ActorKind kind, int obs_dim, int action_dim, const TrainConfig& cfg, Rng& rng) : kind_(kind)
{
    if (kind_ == ActorKind::Diffusion) {
        denoiser_ = Denoiser(action_dim, obs_dim, cfg.hidden, make_schedule(cfg.diffusion_steps, cfg.beta_start,
                                                                            cfg.beta_end),
                             rng);
    } else {
        std::vector<int> sizes{obs_dim};
        sizes.insert(sizes.end(), cfg.hidden.begin(), cfg.hidden.end());
        sizes.push_back(action_dim);
        mlp_ = Mlp(sizes, rng);
    }
}

Matrix Actor::logits(const Matrix& obs, const Matrix& x_T, Rng* fresh, Tape* tape) const
{
    if (kind_ == ActorKind::Diffusion)
        return denoiser_.generate(obs, x_T, fresh, tape ? &tape->chain : nullptr);
    if (tape)
        return mlp_.forward(obs, tape->mlp);
    return mlp_.forward(obs);
}

void Actor::backward(const Tape& tape, const Matrix& d_logits, MlpGrads& grads) const
{
    if (kind_ == ActorKind::Diffusion)
        denoiser_.backward_chain(tape.chain, d_logits, grads);
    else
        mlp_.backward(tape.mlp, d_logits, grads);
}

std::string train_log_csv(const std::vector<TrainLogRow>& rows)
{
    std::string out = "episode,total_reward,actor_loss,critic_loss,eval_utility,oracle_ratio\n";
    for (const auto& r : rows)
        out += (csv::Row() << r.episode << r.total_reward << r.actor_loss << r.critic_loss << r.eval_utility
                           << r.oracle_ratio)
                   .str();
    return out;
}

// ---------------------------------------------------------------------------
// trainer

namespace {

Matrix column(const Observation& o)
{
    return Eigen::Map<const Vector>(o.data(), static_cast<Eigen::Index>(o.size()));
}

Matrix gaussian(Eigen::Index rows, Eigen::Index cols, Rng& rng)
{
    Matrix m(rows, cols);
    for (Eigen::Index c = 0; c < cols; ++c)
        for (Eigen::Index r = 0; r < rows; ++r)
            m(r, c) = rng.normal();
    return m;
}

} // namespace

Trainer::Trainer(std::shared_ptr<const Scenario> scenario, Route route, TrainConfig cfg, ActorKind kind)
    : scenario_(std::move(scenario)), cfg_(std::move(cfg)), kind_(kind), env_(scenario_, std::move(route)),
      buffer_(cfg_.buffer_capacity), explore_rng_(split_seed(cfg_.seed, 2)), sample_rng_(split_seed(cfg_.seed, 3)),
      chain_rng_(split_seed(cfg_.seed, 4)), epsilon_(cfg_.epsilon0)
{
    check_config(cfg_);
    obs_dim_ = static_cast<int>(env_.obs_dim());
    action_dim_ = static_cast<int>(env_.action_dim());
    const auto n = env_.num_agents();
    Rng init(split_seed(cfg_.seed, 1));
    for (std::size_t i = 0; i < n; ++i) {
        actors_.emplace_back(kind_, obs_dim_, action_dim_, cfg_, init);
        actor_opt_.emplace_back(actors_.back().net(), OptimizerConfig{cfg_.actor_lr, cfg_.adam, 0.9, 0.999, 1e-8,
                                                                      cfg_.clip_norm});
    }
    target_actors_ = actors_;
    std::vector<int> sizes{static_cast<int>(n) * (obs_dim_ + action_dim_)};
    sizes.insert(sizes.end(), cfg_.hidden.begin(), cfg_.hidden.end());
    sizes.push_back(1);
    for (std::size_t i = 0; i < (cfg_.shared_critic ? 1 : n); ++i) {
        critics_.emplace_back(sizes, init);
        critic_opt_.emplace_back(critics_.back(), OptimizerConfig{cfg_.critic_lr, cfg_.adam, 0.9, 0.999, 1e-8,
                                                                  cfg_.clip_norm});
    }
    target_critics_ = critics_;
}

int Trainer::act(std::size_t agent, const Observation& obs, const std::vector<std::uint8_t>& mask, Rng& rng,
                 bool explore) const
{
    if (explore && rng.uniform() < epsilon_) {
        std::vector<int> allowed;
        for (std::size_t a = 0; a < mask.size(); ++a)
            if (mask[a])
                allowed.push_back(static_cast<int>(a));
        return allowed[static_cast<std::size_t>(rng.uniform_index(allowed.size()))];
    }
    const Matrix x_T = kind_ == ActorKind::Diffusion ? gaussian(action_dim_, 1, rng) : Matrix();
    const Matrix logits = actors_[agent].logits(column(obs), x_T, explore ? &rng : nullptr);
    return masked_argmax(logits.col(0), mask);
}

Matrix Trainer::critic_input(const std::vector<const Transition*>& batch, const std::vector<std::vector<int>>& actions,
                             bool next) const
{
    const auto n = static_cast<Eigen::Index>(actors_.size());
    const Eigen::Index od = obs_dim_;
    const Eigen::Index ad = action_dim_;
    Matrix x = Matrix::Zero(n * (od + ad), static_cast<Eigen::Index>(batch.size()));
    for (std::size_t b = 0; b < batch.size(); ++b) {
        const auto& obs = next ? batch[b]->next_obs : batch[b]->obs;
        const auto c = static_cast<Eigen::Index>(b);
        for (Eigen::Index j = 0; j < n; ++j) {
            const auto& o = obs[static_cast<std::size_t>(j)];
            x.block(j * od, c, od, 1) = Eigen::Map<const Vector>(o.data(), od);
            x(n * od + j * ad + actions[b][static_cast<std::size_t>(j)], c) = 1.0;
        }
    }
    return x;
}

std::vector<std::vector<int>> Trainer::target_actions(const std::vector<const Transition*>& batch) const
{
    const auto B = static_cast<Eigen::Index>(batch.size());
    std::vector<std::vector<int>> out(batch.size(), std::vector<int>(actors_.size(), 0));
    Rng noise(chain_rng_);
    for (std::size_t j = 0; j < actors_.size(); ++j) {
        Matrix cond(obs_dim_, B);
        Matrix x_T(action_dim_, B);
        for (Eigen::Index b = 0; b < B; ++b) {
            const auto& t = *batch[static_cast<std::size_t>(b)];
            cond.col(b) = column(t.next_obs[j]);
            Rng r(split_seed(t.chain_seed, j));
            for (Eigen::Index k = 0; k < action_dim_; ++k)
                x_T(k, b) = r.normal();
        }
        const Matrix logits = target_actors_[j].logits(cond, x_T, cfg_.target_noise > 0.0 ? &noise : nullptr);
        for (Eigen::Index b = 0; b < B; ++b)
            out[static_cast<std::size_t>(b)][j] =
                masked_argmax(logits.col(b), batch[static_cast<std::size_t>(b)]->next_masks[j]);
    }
    return out;
}

double Trainer::update_critic(std::size_t agent, const std::vector<const Transition*>& batch,
                              const std::vector<std::vector<int>>& next_actions)
{
    const auto slot = critic_slot(agent);
    std::vector<std::vector<int>> taken;
    for (const auto* t : batch)
        taken.push_back(t->actions);
    const Matrix x = critic_input(batch, taken, false);
    const Matrix x_next = critic_input(batch, next_actions, true);
    const Matrix q_next = target_critics_[slot].forward(x_next);
    const auto B = static_cast<double>(batch.size());
    Matrix y(1, x.cols());
    for (Eigen::Index b = 0; b < x.cols(); ++b) {
        const auto& t = *batch[static_cast<std::size_t>(b)];
        double r = t.rewards[agent];
        if (cfg_.shared_critic) {
            r = 0.0;
            for (double v : t.rewards)
                r += v;
            r /= static_cast<double>(t.rewards.size());
        }
        y(0, b) = td_target(r, q_next(0, b), cfg_.discount, t.done);
    }
    MlpTape tape;
    const Matrix q = critics_[slot].forward(x, tape);
    const Matrix diff = q - y;
    const double loss = diff.squaredNorm() / B;
    auto grads = critics_[slot].zero_grads();
    critics_[slot].backward(tape, 2.0 * diff / B, grads);
    critic_opt_[slot].step(critics_[slot], grads);
    return loss;
}

double Trainer::aux_bc_step(std::size_t agent, const std::vector<const Transition*>& batch, MlpGrads& grads)
{
    std::vector<double> rewards;
    for (const auto* t : batch)
        rewards.push_back(t->rewards[agent]);
    auto sorted = rewards;
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<long>(sorted.size() / 2), sorted.end());
    const double median = sorted[sorted.size() / 2];
    std::vector<std::size_t> keep;
    for (std::size_t b = 0; b < batch.size(); ++b)
        if (rewards[b] > median)
            keep.push_back(b);
    if (keep.empty())
        return 0.0;
    Matrix x0 = Matrix::Constant(action_dim_, static_cast<Eigen::Index>(keep.size()), -1.0);
    Matrix cond(obs_dim_, static_cast<Eigen::Index>(keep.size()));
    for (std::size_t k = 0; k < keep.size(); ++k) {
        const auto& t = *batch[keep[k]];
        x0(t.actions[agent], static_cast<Eigen::Index>(k)) = 1.0;
        cond.col(static_cast<Eigen::Index>(k)) = column(t.obs[agent]);
    }
    auto bc = actors_[agent].net().zero_grads();
    const double loss = actors_[agent].denoiser().denoising_loss(x0, cond, chain_rng_, &bc);
    bc *= cfg_.aux_bc_weight;
    grads += bc;
    return loss;
}

double Trainer::update_actor(std::size_t agent, const std::vector<const Transition*>& batch)
{
    const auto B = static_cast<Eigen::Index>(batch.size());
    Matrix cond(obs_dim_, B);
    std::vector<const std::vector<std::uint8_t>*> masks;
    std::vector<std::vector<int>> taken;
    for (Eigen::Index b = 0; b < B; ++b) {
        const auto& t = *batch[static_cast<std::size_t>(b)];
        cond.col(b) = column(t.obs[agent]);
        masks.push_back(&t.masks[agent]);
        taken.push_back(t.actions);
    }
    auto& actor = actors_[agent];
    Actor::Tape tape;
    const Matrix x_T = kind_ == ActorKind::Diffusion ? gaussian(action_dim_, B, chain_rng_) : Matrix();
    const Matrix logits = actor.logits(cond, x_T, &chain_rng_, &tape);
    const Matrix probs = masked_softmax(logits, masks);

    Matrix x = critic_input(batch, taken, false);
    const auto n = static_cast<Eigen::Index>(actors_.size());
    x.block(n * obs_dim_ + static_cast<Eigen::Index>(agent) * action_dim_, 0, action_dim_, B) = probs;
    auto& critic = critics_[critic_slot(agent)];
    MlpTape ctape;
    const Matrix q = critic.forward(x, ctape);
    auto scratch = critic.zero_grads();
    const Matrix d_x = critic.backward(ctape, Matrix::Constant(1, B, -1.0 / static_cast<double>(B)), scratch);
    const Matrix d_probs = d_x.block(n * obs_dim_ + static_cast<Eigen::Index>(agent) * action_dim_, 0, action_dim_, B);
    Matrix d_logits = softmax_backward(probs, d_probs);
    d_logits += (2.0 * cfg_.logit_reg / static_cast<double>(B)) * logits;

    auto grads = actor.net().zero_grads();
    actor.backward(tape, d_logits, grads);
    if (cfg_.aux_bc_weight > 0.0 && kind_ == ActorKind::Diffusion)
        aux_bc_step(agent, batch, grads);
    actor_opt_[agent].step(actor.net(), grads);
    if (!actor.net().all_finite() || !critic.all_finite())
        throw StateError("training diverged: non-finite parameters");
    return -q.mean();
}

void Trainer::soft_update_targets()
{
    for (std::size_t i = 0; i < actors_.size(); ++i)
        soft_update(target_actors_[i].net(), actors_[i].net(), cfg_.tau_soft);
    for (std::size_t i = 0; i < critics_.size(); ++i)
        soft_update(target_critics_[i], critics_[i], cfg_.tau_soft);
}

std::vector<TrainLogRow> Trainer::train(std::optional<double> oracle_utility,
                                        const std::function<void(const TrainLogRow&)>& on_episode)
{
    std::vector<TrainLogRow> rows;
    double last_eval = 0.0;
    const auto n = actors_.size();
    for (int ep = 0; ep < cfg_.episodes; ++ep) {
        auto obs = env_.reset(split_seed(cfg_.seed, 100000 + static_cast<std::uint64_t>(ep)));
        double total = 0.0;
        double actor_loss = 0.0;
        double critic_loss = 0.0;
        int updates = 0;
        while (!env_.done()) {
            Transition tr;
            tr.obs = obs;
            for (std::size_t a = 0; a < n; ++a) {
                tr.masks.push_back(env_.action_mask(a));
                tr.actions.push_back(act(a, obs[a], tr.masks.back(), explore_rng_, true));
            }
            auto res = env_.step(tr.actions);
            tr.rewards = res.rewards;
            tr.next_obs = res.observations;
            for (std::size_t a = 0; a < n; ++a)
                tr.next_masks.push_back(env_.action_mask(a));
            tr.done = res.done;
            tr.chain_seed = split_seed(cfg_.seed ^ 0x9e3779b97f4a7c15ULL, transitions_++);
            for (double r : res.rewards)
                total += r;
            obs = std::move(res.observations);
            buffer_.push(std::move(tr));
            epsilon_ = std::max(cfg_.epsilon_min, epsilon_ * (1.0 - cfg_.epsilon_decay));

            if (buffer_.size() < static_cast<std::size_t>(cfg_.batch))
                continue;
            for (int u = 0; u < cfg_.updates_per_step; ++u) {
                const auto batch = buffer_.sample(static_cast<std::size_t>(cfg_.batch), sample_rng_);
                const auto next = target_actions(batch);
                for (std::size_t c = 0; c < critics_.size(); ++c)
                    critic_loss += update_critic(c, batch, next);
                for (std::size_t a = 0; a < n; ++a)
                    actor_loss += update_actor(a, batch);
                soft_update_targets();
                ++updates;
            }
        }
        if ((ep + 1) % cfg_.eval_every == 0 || ep + 1 == cfg_.episodes) {
            double sum = 0.0;
            for (int e = 0; e < cfg_.eval_episodes; ++e)
                sum += evaluate(split_seed(cfg_.seed, 900000 + static_cast<std::uint64_t>(ep) * 64 +
                                                          static_cast<std::uint64_t>(e)))
                           .utility;
            last_eval = sum / cfg_.eval_episodes;
        }
        TrainLogRow row;
        row.episode = ep;
        row.total_reward = total;
        row.actor_loss = updates ? actor_loss / (updates * static_cast<double>(n)) : 0.0;
        row.critic_loss = updates ? critic_loss / (updates * static_cast<double>(critics_.size())) : 0.0;
        row.eval_utility = last_eval;
        row.oracle_ratio = oracle_utility ? last_eval / *oracle_utility : std::numeric_limits<double>::quiet_NaN();
        rows.push_back(row);
        if (on_episode)
            on_episode(row);
    }
    return rows;
}

EpisodeSummary Trainer::evaluate(std::uint64_t episode_seed)
{
    SwarmEnv eval_env(scenario_, env_.route());
    return evaluate(eval_env, episode_seed);
}

EpisodeSummary Trainer::evaluate(SwarmEnv& env, std::uint64_t episode_seed) const
{
    auto obs = env.reset(episode_seed);
    Rng rng(split_seed(episode_seed, 5));
    while (!env.done()) {
        std::vector<int> actions;
        for (std::size_t a = 0; a < env.num_agents(); ++a)
            actions.push_back(act(a, obs[a], env.action_mask(a), rng, false));
        obs = env.step(actions).observations;
    }
    return env.summary();
}

void Trainer::save(const std::filesystem::path& path) const
{
    std::vector<NamedTensor> tensors;
    Matrix meta(1, 8 + static_cast<Eigen::Index>(cfg_.hidden.size()));
    meta(0, 0) = kind_ == ActorKind::Diffusion ? 1.0 : 0.0;
    meta(0, 1) = obs_dim_;
    meta(0, 2) = action_dim_;
    meta(0, 3) = static_cast<double>(actors_.size());
    meta(0, 4) = cfg_.shared_critic ? 1.0 : 0.0;
    meta(0, 5) = cfg_.diffusion_steps;
    meta(0, 6) = cfg_.beta_start;
    meta(0, 7) = cfg_.beta_end;
    for (std::size_t i = 0; i < cfg_.hidden.size(); ++i)
        meta(0, 8 + static_cast<Eigen::Index>(i)) = cfg_.hidden[i];
    tensors.push_back({"meta", meta});
    for (std::size_t i = 0; i < actors_.size(); ++i)
        append_mlp(tensors, "actor" + std::to_string(i), actors_[i].net());
    for (std::size_t i = 0; i < critics_.size(); ++i)
        append_mlp(tensors, "critic" + std::to_string(i), critics_[i]);
    write_checkpoint(path, tensors);
}

namespace {

const Matrix& checkpoint_meta(const std::vector<NamedTensor>& tensors, const std::filesystem::path& path)
{
    for (const auto& t : tensors)
        if (t.name == "meta" && t.value.rows() == 1 && t.value.cols() >= 8)
            return t.value;
    throw ParseError("checkpoint " + path.string() + ": missing meta tensor");
}

} // namespace

TrainConfig checkpoint_config(const std::filesystem::path& path, TrainConfig base)
{
    const auto tensors = read_checkpoint(path);
    const auto& m = checkpoint_meta(tensors, path);
    base.shared_critic = m(0, 4) != 0.0;
    base.diffusion_steps = static_cast<int>(m(0, 5));
    base.beta_start = m(0, 6);
    base.beta_end = m(0, 7);
    base.hidden.clear();
    for (Eigen::Index i = 8; i < m.cols(); ++i)
        base.hidden.push_back(static_cast<int>(m(0, i)));
    return base;
}

void Trainer::load(const std::filesystem::path& path)
{
    const auto tensors = read_checkpoint(path);
    const auto& m = checkpoint_meta(tensors, path);
    if ((m(0, 0) == 1.0) != (kind_ == ActorKind::Diffusion) || m(0, 1) != obs_dim_ || m(0, 2) != action_dim_ ||
        m(0, 3) != static_cast<double>(actors_.size()))
        throw ShapeError("checkpoint " + path.string() + " does not match this scenario/algorithm");
    for (std::size_t i = 0; i < actors_.size(); ++i) {
        load_mlp(tensors, "actor" + std::to_string(i), actors_[i].net());
        target_actors_[i] = actors_[i];
    }
    for (std::size_t i = 0; i < critics_.size(); ++i) {
        load_mlp(tensors, "critic" + std::to_string(i), critics_[i]);
        target_critics_[i] = critics_[i];
    }
}

// ---------------------------------------------------------------------------
// scripted baselines

EpisodeSummary run_planned_episode(SwarmEnv& env, std::uint64_t seed, const TaskPlanner& planner)
{
    env.reset(seed);
    std::vector<AssignmentDecision> plans;
    std::vector<char> planned(env.route().order.size(), 0);
    while (!env.done()) {
        for (std::size_t q = 0; q < planned.size(); ++q) {
            const int ti = env.task_index(static_cast<int>(q));
            if (planned[q] || ti < 0)
                continue;
            planned[q] = 1;
            const auto& task = env.state().tasks[static_cast<std::size_t>(ti)];
            if (!task.resolved)
                plans.push_back(planner(task.spec.id, env));
        }
        env.step(scripted_actions(env, plans));
    }
    return env.summary();
}

TaskPlanner greedy_planner()
{
    return [](int task_id, const SwarmEnv& env) {
        return greedy_assignment_baseline(task_id, env.scenario(), env.state(), env.links());
    };
}

TaskPlanner oracle_planner(std::uint64_t guard)
{
    return [guard](int task_id, const SwarmEnv& env) {
        const auto& s = env.scenario();
        const TaskRun* task = nullptr;
        for (const auto& t : env.state().tasks)
            if (t.spec.id == task_id)
                task = &t;
        const auto count = enumeration_count(task->num_layers(), static_cast<int>(follower_indices(s).size()),
                                             s.env.leader_executes);
        if (count > guard)
            return greedy_assignment_baseline(task_id, s, env.state(), env.links());
        return solve_oracle(task_id, s, env.state(), env.links(), guard).decision;
    };
}

// ---------------------------------------------------------------------------
// bandit

BanditResult train_bandit(std::uint64_t seed, int updates)
{
    BanditResult out;
    Rng rng(split_seed(seed, 0));
    out.optimal_arm = static_cast<int>(rng.uniform_index(2));
    Rng init(split_seed(seed, 1));
    Denoiser actor(2, 1, {16, 16}, make_schedule(1, 0.5, 0.5), init);
    Mlp critic({2, 16, 1}, init);
    Optimizer actor_opt(actor.net(), {1e-2, true});
    Optimizer critic_opt(critic, {1e-2, true});
    const int batch = 32;
    const double explore = 0.2;
    const Matrix cond = Matrix::Ones(1, batch);
    std::vector<std::uint8_t> all{1, 1};
    const std::vector<const std::vector<std::uint8_t>*> masks(batch, &all);

    for (int u = 0; u < updates; ++u) {
        Denoiser::Chain chain;
        const Matrix logits = actor.sample(cond, rng, true, &chain);
        // critic step on freshly played arms
        Matrix played = Matrix::Zero(2, batch);
        Matrix reward(1, batch);
        for (int b = 0; b < batch; ++b) {
            int a = masked_argmax(logits.col(b), all);
            if (rng.uniform() < explore)
                a = static_cast<int>(rng.uniform_index(2));
            played(a, b) = 1.0;
            reward(0, b) = a == out.optimal_arm ? 1.0 : 0.0;
        }
        MlpTape ct;
        const Matrix q = critic.forward(played, ct);
        auto cg = critic.zero_grads();
        critic.backward(ct, 2.0 * (q - reward) / batch, cg);
        critic_opt.step(critic, cg);

        // actor step through the chain
        const Matrix probs = masked_softmax(logits, masks);
        MlpTape at;
        critic.forward(probs, at);
        auto scratch = critic.zero_grads();
        const Matrix d_probs = critic.backward(at, Matrix::Constant(1, batch, -1.0 / batch), scratch);
        auto ag = actor.net().zero_grads();
        actor.backward_chain(chain, softmax_backward(probs, d_probs), ag);
        actor_opt.step(actor.net(), ag);
        ++out.updates;
    }
    const int trials = 200;
    const Matrix eval_cond = Matrix::Ones(1, trials);
    const Matrix logits = actor.sample(eval_cond, rng, false);
    int hits = 0;
    for (int b = 0; b < trials; ++b)
        hits += masked_argmax(logits.col(b), all) == out.optimal_arm ? 1 : 0;
    out.optimal_share = static_cast<double>(hits) / trials;
    return out;
}

} // namespace uavdnn
