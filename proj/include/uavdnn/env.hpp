#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "uavdnn/assignment.hpp"
#include "uavdnn/pathplan.hpp"
#include "uavdnn/pipeline.hpp"
#include "uavdnn/scenario.hpp"

namespace uavdnn {

using Observation = std::vector<double>;

struct Intent {
    bool idle = true;
    /// route step whose task is targeted
    int task_slot = -1;
    int layers = 0;
};

struct StepInfo {
    double round_start = 0.0;
    double clock = 0.0;
    /// agents whose action was turned into Idle (mask, contention, C3/C4)
    std::vector<int> penalized;
    std::vector<int> resolved_tasks;
    bool hard_stop = false;
    std::string stop_reason;
};

struct StepResult {
    std::vector<Observation> observations;
    std::vector<double> rewards;
    bool done = false;
    StepInfo info;
};

struct TraceRow {
    double t = 0.0;
    int agent = 0;
    int action = 0;
    int task = -1;
    int layers_done = 0;
    double aoi_s = 0.0;
    double e_comp_j = 0.0;
    double e_trans_j = 0.0;
    double e_fly_j = 0.0;
    double reward = 0.0;
};

struct EpisodeSummary {
    double utility = 0.0;
    double mean_aoi = 0.0;
    double completion_rate = 0.0;
    int tasks = 0;
    int completed = 0;
    double total_reward = 0.0;
    int steps = 0;
};

/// Multi-agent environment. Agents are the followers (and the leader first,
/// when it may execute). Each step is one synchronous assignment round: every
/// agent either idles or claims the next 1..block_max layers of one task.
class SwarmEnv {
public:
    SwarmEnv(std::shared_ptr<const Scenario> scenario, Route route);

    std::vector<Observation> reset(std::uint64_t seed);
    StepResult step(const std::vector<int>& actions);

    std::size_t num_agents() const { return agents_.size(); }
    std::size_t obs_dim() const;
    std::size_t action_dim() const;
    /// fleet index of an agent
    std::size_t agent_uav(std::size_t agent) const { return agents_.at(agent); }

    int encode_action(int task_slot, int layers) const;
    /// Structural decode; resource checks happen in step().
    Intent decode_action(int action) const;
    /// 1 where the action is structurally allowed for the agent.
    std::vector<std::uint8_t> action_mask(std::size_t agent) const;

    bool done() const { return done_; }
    const Scenario& scenario() const { return *scenario_; }
    const Route& route() const { return route_; }
    const SwarmState& state() const { return state_; }
    const LinkTable& links() const { return links_; }
    const std::vector<TraceRow>& trace() const { return trace_; }
    /// Index in state().tasks of the task spawned at a route step, or -1.
    int task_index(int task_slot) const { return slot_to_task_.at(static_cast<std::size_t>(task_slot)); }
    /// Per-task score already booked for resolved tasks.
    double completion_sum() const { return completion_sum_; }
    EpisodeSummary summary() const;

private:
    std::vector<Observation> observe() const;
    void expire_tasks(std::vector<int>& resolved);
    void resolve(std::size_t task, std::vector<int>& resolved);
    void arrive(std::size_t route_step, std::vector<int>& resolved);
    bool hard_stop(std::string& reason) const;
    bool any_active() const;

    std::shared_ptr<const Scenario> scenario_;
    Route route_;
    std::vector<std::size_t> agents_;
    std::vector<int> model_kinds_;
    double max_latency_ = 1.0;

    std::uint64_t seed_ = 0;
    SwarmState state_;
    SwarmState initial_;
    LinkTable links_;
    std::vector<int> slot_to_task_;
    std::vector<double> resolved_at_;
    std::size_t leg_ = 0;
    int round_in_leg_ = 0;
    bool done_ = true;
    double completion_sum_ = 0.0;
    double total_reward_ = 0.0;
    int steps_ = 0;
    std::vector<TraceRow> trace_;
};

std::string trace_csv(const std::vector<TraceRow>& rows);

/// Actions that make the agents follow fixed per-task decisions (used for the
/// oracle and greedy baselines and to replay decisions in tests). An agent
/// scheduled on several tasks serves the oldest one first.
std::vector<int> scripted_actions(const SwarmEnv& env, const std::vector<AssignmentDecision>& plans);

} // namespace uavdnn
