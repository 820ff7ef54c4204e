#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "uavdnn/diffusion.hpp"
#include "uavdnn/env.hpp"
#include "uavdnn/nn.hpp"

namespace uavdnn {

enum class ActorKind { Diffusion, Plain };

struct TrainConfig {
    int episodes = 600;
    int batch = 512;
    double actor_lr = 1e-3;
    double critic_lr = 1e-3;
    double discount = 0.9;
    double tau_soft = 0.01;
    double epsilon0 = 0.9;
    /// multiplicative per env step
    double epsilon_decay = 1e-4;
    double epsilon_min = 0.05;
    std::vector<int> hidden{256, 256};
    int diffusion_steps = 10;
    double beta_start = 1e-4;
    double beta_end = 0.05;
    std::size_t buffer_capacity = 100000;
    bool adam = false;
    double clip_norm = 0.0;
    /// L2 penalty on generated logits in the actor loss
    double logit_reg = 1e-3;
    /// weight of the denoising loss toward above-median-reward buffer actions
    double aux_bc_weight = 0.0;
    /// scale of fresh chain noise used when generating target actions
    double target_noise = 0.0;
    bool shared_critic = false;
    int updates_per_step = 1;
    int eval_every = 1;
    int eval_episodes = 1;
    std::uint64_t seed = 0;
};

/// Sets one field from text ("hidden" takes "64x64"). Throws ValidationError
/// for unknown keys or malformed values.
void apply_override(TrainConfig& cfg, const std::string& key, const std::string& value);
void check_config(const TrainConfig& cfg);

struct Transition {
    std::vector<Observation> obs;
    std::vector<int> actions;
    std::vector<double> rewards;
    std::vector<Observation> next_obs;
    std::vector<std::vector<std::uint8_t>> masks;
    std::vector<std::vector<std::uint8_t>> next_masks;
    bool done = false;
    /// seeds the target actors' chain start for this sample
    std::uint64_t chain_seed = 0;
};

/// FIFO ring of joint transitions.
class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity);

    void push(Transition t);
    std::size_t size() const { return items_.size(); }
    std::size_t capacity() const { return capacity_; }
    /// i = 0 is the oldest retained entry
    const Transition& at(std::size_t i) const;
    /// `k` distinct entries, uniformly at random.
    std::vector<const Transition*> sample(std::size_t k, Rng& rng) const;

private:
    std::size_t capacity_;
    std::size_t head_ = 0;
    std::vector<Transition> items_;
};

/// r + discount * Q' for non-terminal steps, r otherwise.
double td_target(double reward, double next_q, double discount, bool terminal);

/// Masked softmax over columns; masked entries get probability 0.
Matrix masked_softmax(const Matrix& logits, const std::vector<const std::vector<std::uint8_t>*>& masks);
/// Gradient through masked_softmax given dL/dp.
Matrix softmax_backward(const Matrix& probs, const Matrix& d_probs);
int masked_argmax(const Vector& logits, const std::vector<std::uint8_t>& mask);

/// Either a diffusion chain (logits = x_0 of the reverse process) or a plain
/// MLP head mapping observations straight to logits.
class Actor {
public:
    Actor() = default;
    Actor(ActorKind kind, int obs_dim, int action_dim, const TrainConfig& cfg, Rng& rng);

    ActorKind kind() const { return kind_; }
    Mlp& net() { return kind_ == ActorKind::Diffusion ? denoiser_.net() : mlp_; }
    const Mlp& net() const { return kind_ == ActorKind::Diffusion ? denoiser_.net() : mlp_; }
    const Denoiser& denoiser() const { return denoiser_; }

    struct Tape {
        Denoiser::Chain chain;
        MlpTape mlp;
    };

    /// `x_T` is ignored by plain actors. `fresh` supplies chain noise.
    Matrix logits(const Matrix& obs, const Matrix& x_T, Rng* fresh, Tape* tape = nullptr) const;
    void backward(const Tape& tape, const Matrix& d_logits, MlpGrads& grads) const;

private:
    ActorKind kind_ = ActorKind::Diffusion;
    Denoiser denoiser_;
    Mlp mlp_;
};

struct TrainLogRow {
    int episode = 0;
    double total_reward = 0.0;
    double actor_loss = 0.0;
    double critic_loss = 0.0;
    double eval_utility = 0.0;
    double oracle_ratio = 0.0;
};

std::string train_log_csv(const std::vector<TrainLogRow>& rows);

/// Network shape settings recorded in a checkpoint, applied over `base`.
TrainConfig checkpoint_config(const std::filesystem::path& path, TrainConfig base = {});

class Trainer {
public:
    Trainer(std::shared_ptr<const Scenario> scenario, Route route, TrainConfig cfg, ActorKind kind);

    /// Runs the configured episodes. `oracle_utility`, when given, fills the
    /// oracle_ratio column.
    std::vector<TrainLogRow> train(std::optional<double> oracle_utility = std::nullopt,
                                   const std::function<void(const TrainLogRow&)>& on_episode = {});

    /// Greedy rollout: zero chain noise, masked argmax.
    EpisodeSummary evaluate(std::uint64_t episode_seed);
    EpisodeSummary evaluate(SwarmEnv& env, std::uint64_t episode_seed) const;

    double update_critic(std::size_t agent, const std::vector<const Transition*>& batch,
                         const std::vector<std::vector<int>>& next_actions);
    double update_actor(std::size_t agent, const std::vector<const Transition*>& batch);
    /// Target-actor actions for each sample's next observation: [sample][agent].
    std::vector<std::vector<int>> target_actions(const std::vector<const Transition*>& batch) const;

    /// Critic input columns for a batch with the given actions.
    Matrix critic_input(const std::vector<const Transition*>& batch, const std::vector<std::vector<int>>& actions,
                        bool next) const;

    std::size_t num_agents() const { return actors_.size(); }
    const Actor& actor(std::size_t i) const { return actors_.at(i); }
    Actor& actor(std::size_t i) { return actors_.at(i); }
    Mlp& critic(std::size_t i) { return critics_.at(critic_slot(i)); }
    const ReplayBuffer& buffer() const { return buffer_; }
    SwarmEnv& env() { return env_; }
    const TrainConfig& config() const { return cfg_; }
    double epsilon() const { return epsilon_; }

    void save(const std::filesystem::path& path) const;
    void load(const std::filesystem::path& path);

    /// Action for one agent. Explores with probability epsilon when `explore`.
    int act(std::size_t agent, const Observation& obs, const std::vector<std::uint8_t>& mask, Rng& rng,
            bool explore) const;

private:
    std::size_t critic_slot(std::size_t agent) const { return cfg_.shared_critic ? 0 : agent; }
    void soft_update_targets();
    double aux_bc_step(std::size_t agent, const std::vector<const Transition*>& batch, MlpGrads& grads);

    std::shared_ptr<const Scenario> scenario_;
    TrainConfig cfg_;
    ActorKind kind_;
    SwarmEnv env_;
    int obs_dim_ = 0;
    int action_dim_ = 0;
    std::vector<Actor> actors_;
    std::vector<Actor> target_actors_;
    std::vector<Mlp> critics_;
    std::vector<Mlp> target_critics_;
    std::vector<Optimizer> actor_opt_;
    std::vector<Optimizer> critic_opt_;
    ReplayBuffer buffer_;
    Rng explore_rng_;
    Rng sample_rng_;
    Rng chain_rng_;
    double epsilon_ = 0.0;
    std::uint64_t transitions_ = 0;
};

/// Runs one episode where each newly created task gets a fixed decision from
/// `planner` and the agents execute it.
using TaskPlanner = std::function<AssignmentDecision(int task_id, const SwarmEnv& env)>;
EpisodeSummary run_planned_episode(SwarmEnv& env, std::uint64_t seed, const TaskPlanner& planner);

TaskPlanner greedy_planner();
/// Falls back to the greedy planner when the oracle guard would be exceeded.
TaskPlanner oracle_planner(std::uint64_t guard = kOracleGuard);

struct BanditResult {
    int optimal_arm = 0;
    /// share of greedy decodes (over fresh chain starts) picking the optimal arm
    double optimal_share = 0.0;
    int updates = 0;
};

/// One-step, two-armed bandit with payoffs 1 and 0 solved by a T = 1
/// diffusion actor and a learned critic.
BanditResult train_bandit(std::uint64_t seed, int updates);

} // namespace uavdnn
