#include "uavdnn/env.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "uavdnn/error.hpp"

namespace uavdnn {

namespace {

constexpr double kTaskSizeNorm = 80.0;

double clamp01(double x)
{
    return std::clamp(x, 0.0, 1.0);
}

} // namespace

SwarmEnv::SwarmEnv(std::shared_ptr<const Scenario> scenario, Route route)
    : scenario_(std::move(scenario)), route_(std::move(route))
{
    const auto& s = *scenario_;
    validate(s);
    if (route_.order.size() != s.targets.size())
        throw ValidationError("env: route must visit every target exactly once");
    if (s.env.leader_executes)
        agents_.push_back(s.leader_index());
    for (auto i : follower_indices(s))
        agents_.push_back(i);
    for (const auto& m : s.models)
        model_kinds_.push_back(m.kind);
    max_latency_ = 0.0;
    for (const auto& t : s.targets)
        max_latency_ = std::max(max_latency_, t.max_latency_s);
}

std::size_t SwarmEnv::obs_dim() const
{
    const auto& s = *scenario_;
    const std::size_t W = s.targets.size();
    const std::size_t N = s.fleet.size();
    const std::size_t per_task = 1 + model_kinds_.size() + 1 + 1 + 1 + N + 1;
    return W * per_task + N * 5 + 2 * W + agents_.size() + 2;
}

std::size_t SwarmEnv::action_dim() const
{
    return 1 + scenario_->targets.size() * static_cast<std::size_t>(scenario_->env.block_max);
}

int SwarmEnv::encode_action(int task_slot, int layers) const
{
    return 1 + task_slot * scenario_->env.block_max + (layers - 1);
}

Intent SwarmEnv::decode_action(int action) const
{
    if (action < 0 || static_cast<std::size_t>(action) >= action_dim())
        throw ValidationError("action index out of range: " + std::to_string(action));
    if (action == 0)
        return {};
    const int bm = scenario_->env.block_max;
    return {false, (action - 1) / bm, (action - 1) % bm + 1};
}

std::vector<std::uint8_t> SwarmEnv::action_mask(std::size_t agent) const
{
    std::vector<std::uint8_t> mask(action_dim(), 0);
    mask[0] = 1;
    if (done_)
        return mask;
    const auto uav = static_cast<int>(agents_.at(agent));
    const bool leader = scenario_->fleet[static_cast<std::size_t>(uav)].role == Role::Leader;
    for (std::size_t q = 0; q < slot_to_task_.size(); ++q) {
        const int ti = slot_to_task_[q];
        if (ti < 0)
            continue;
        const auto& task = state_.tasks[static_cast<std::size_t>(ti)];
        if (task.resolved)
            continue;
        if (leader && task.frontier != 0)
            continue;
        const bool holder = task.holder == uav;
        const bool fresh = std::find(task.executors.begin(), task.executors.end(), uav) == task.executors.end();
        if (!holder && !fresh)
            continue;
        const int left = task.num_layers() - task.frontier;
        for (int b = 1; b <= std::min(left, scenario_->env.block_max); ++b)
            mask[static_cast<std::size_t>(encode_action(static_cast<int>(q), b))] = 1;
    }
    return mask;
}

std::vector<Observation> SwarmEnv::reset(std::uint64_t seed)
{
    const auto& s = *scenario_;
    seed_ = seed;
    state_ = initial_state(s);
    slot_to_task_.assign(route_.order.size(), -1);
    resolved_at_.clear();
    trace_.clear();
    leg_ = 0;
    round_in_leg_ = 0;
    done_ = false;
    completion_sum_ = 0.0;
    total_reward_ = 0.0;
    steps_ = 0;
    std::vector<int> ignored;
    arrive(0, ignored);
    initial_ = state_;
    return observe();
}

void SwarmEnv::arrive(std::size_t route_step, std::vector<int>& resolved)
{
    const auto& s = *scenario_;
    const auto& target = s.target(route_.order[route_step]);
    const auto pos = formation_positions(s, target.center);
    for (std::size_t n = 0; n < pos.size(); ++n)
        state_.uavs[n].position = pos[n];
    Rng shadow(split_seed(seed_, 1000 + route_step));
    links_ = LinkTable::build(s, state_.uavs, &shadow);
    expire_tasks(resolved);
    slot_to_task_[route_step] = static_cast<int>(state_.tasks.size());
    state_.tasks.push_back(make_task(s, static_cast<int>(route_step) + 1, target, state_.clock));
    resolved_at_.push_back(0.0);
    state_.visited_targets.push_back(target.id);
    leg_ = route_step;
    round_in_leg_ = 0;
}

void SwarmEnv::resolve(std::size_t task, std::vector<int>& resolved)
{
    auto& t = state_.tasks[task];
    if (t.resolved)
        return;
    resolve_task(state_, t);
    resolved_at_[task] = t.completed ? t.ready : state_.clock;
    completion_sum_ += task_completion_term(t, scenario_->weights);
    resolved.push_back(static_cast<int>(task));
}

void SwarmEnv::expire_tasks(std::vector<int>& resolved)
{
    for (std::size_t i = 0; i < state_.tasks.size(); ++i) {
        const auto& t = state_.tasks[i];
        if (!t.resolved && !t.completed && t.expired(state_.clock))
            resolve(i, resolved);
    }
}

bool SwarmEnv::any_active() const
{
    return std::any_of(state_.tasks.begin(), state_.tasks.end(), [](const TaskRun& t) { return !t.resolved; });
}

bool SwarmEnv::hard_stop(std::string& reason) const
{
    const auto& s = *scenario_;
    for (std::size_t n = 0; n < state_.uavs.size(); ++n) {
        const auto& u = state_.uavs[n];
        if (u.energy < 0.0) {
            reason = "C4 uav " + std::to_string(s.fleet[n].id);
            return true;
        }
        if (u.energy < rendezvous_energy(s, u.position)) {
            reason = "C5 uav " + std::to_string(s.fleet[n].id);
            return true;
        }
    }
    return false;
}

StepResult SwarmEnv::step(const std::vector<int>& actions)
{
    if (done_)
        throw StateError("step called after the episode finished");
    if (actions.size() != agents_.size())
        throw ValidationError("step: expected one action per agent");
    const auto& s = *scenario_;
    const auto& w = s.weights;
    StepResult res;
    res.info.round_start = state_.clock;
    const auto before = state_.uavs;
    const double start = state_.clock;

    std::vector<char> penalized(agents_.size(), 0);
    std::vector<int> task_of(agents_.size(), -1);
    std::vector<char> claimed(state_.tasks.size(), 0);
    double round_end = start;
    bool acted = false;

    for (std::size_t a = 0; a < agents_.size(); ++a) {
        const auto intent = decode_action(actions[a]);
        if (intent.idle)
            continue;
        const auto mask = action_mask(a);
        if (!mask[static_cast<std::size_t>(actions[a])]) {
            penalized[a] = 1;
            continue;
        }
        const auto ti = static_cast<std::size_t>(slot_to_task_[static_cast<std::size_t>(intent.task_slot)]);
        if (claimed[ti]) {
            penalized[a] = 1;
            continue;
        }
        auto& task = state_.tasks[ti];
        const auto cost = price_block(s, state_, links_, task, agents_[a], intent.layers);
        if (!cost.violation.empty()) {
            penalized[a] = 1;
            continue;
        }
        claimed[ti] = 1;
        const auto out = execute_block(s, state_, task, agents_[a], intent.layers, cost, start);
        round_end = std::max(round_end, out.finish);
        acted = true;
        task_of[a] = static_cast<int>(ti);
    }
    state_.clock = acted ? round_end : start + s.env.idle_slot_s;
    ++round_in_leg_;

    std::vector<int> resolved;
    for (std::size_t i = 0; i < state_.tasks.size(); ++i)
        if (state_.tasks[i].completed && !state_.tasks[i].resolved)
            resolve(i, resolved);
    expire_tasks(resolved);

    // Leg bookkeeping: fly on once the current target's work is done or the
    // round budget for this leg is spent.
    std::vector<double> fly(state_.uavs.size(), 0.0);
    if (!any_active() || round_in_leg_ >= s.env.rounds_per_leg) {
        if (leg_ + 1 < route_.order.size()) {
            const auto& from = s.target(route_.order[leg_]).center;
            const auto& to = s.target(route_.order[leg_ + 1]).center;
            const double t_leg = leg_time(from, to, s.flight.speed_mps);
            const double e_leg = propulsion_power(s.flight.speed_mps, s.flight) * t_leg;
            state_.clock += t_leg;
            for (std::size_t n = 0; n < state_.uavs.size(); ++n) {
                state_.uavs[n].energy -= e_leg;
                state_.uavs[n].spent.flight += e_leg;
                fly[n] = e_leg;
            }
            arrive(leg_ + 1, resolved);
        } else {
            for (std::size_t i = 0; i < state_.tasks.size(); ++i)
                resolve(i, resolved);
            done_ = true;
        }
    }
    std::string reason;
    if (!done_ && hard_stop(reason)) {
        res.info.hard_stop = true;
        res.info.stop_reason = reason;
        for (std::size_t i = 0; i < state_.tasks.size(); ++i)
            resolve(i, resolved);
        done_ = true;
    }

    double completion = 0.0;
    for (int i : resolved)
        completion += task_completion_term(state_.tasks[static_cast<std::size_t>(i)], w);
    const double group = w.epsilon * completion + w.theta * balance_term(s, state_.uavs);

    res.rewards.resize(agents_.size());
    for (std::size_t a = 0; a < agents_.size(); ++a) {
        const auto n = agents_[a];
        const auto& u = state_.uavs[n];
        const double cap = s.fleet[n].energy_cap_j;
        const double used = (u.spent.compute - before[n].spent.compute) + (u.spent.transmit - before[n].spent.transmit);
        const double indiv = u.energy >= rendezvous_energy(s, u.position) ? w.delta * (-used / cap)
                                                                           : -w.sigma * (cap - u.energy);
        double r = w.vartheta_reward * indiv + (1.0 - w.vartheta_reward) * group;
        if (penalized[a])
            r -= s.env.invalid_action_penalty;
        res.rewards[a] = r;
        total_reward_ += r;

        TraceRow row;
        row.t = start;
        row.agent = s.fleet[n].id;
        row.action = actions[a];
        if (task_of[a] >= 0) {
            const auto& t = state_.tasks[static_cast<std::size_t>(task_of[a])];
            row.task = t.spec.id;
            row.layers_done = t.frontier;
            row.aoi_s = t.aoi();
        }
        row.e_comp_j = u.spent.compute - before[n].spent.compute;
        row.e_trans_j = u.spent.transmit - before[n].spent.transmit;
        row.e_fly_j = fly[n];
        row.reward = r;
        trace_.push_back(row);
        if (penalized[a])
            res.info.penalized.push_back(static_cast<int>(a));
    }
    ++steps_;
    res.info.clock = state_.clock;
    res.info.resolved_tasks = resolved;
    res.done = done_;
    res.observations = observe();
    return res;
}

std::vector<Observation> SwarmEnv::observe() const
{
    const auto& s = *scenario_;
    const double side = s.arena.size_m;
    const double alt = std::max(s.arena.altitude_m, 1.0);
    Observation base;
    base.reserve(obs_dim());
    for (std::size_t q = 0; q < route_.order.size(); ++q) {
        const auto& target = s.target(route_.order[q]);
        const int ti = slot_to_task_.empty() ? -1 : slot_to_task_[q];
        const TaskRun* task = ti >= 0 ? &state_.tasks[static_cast<std::size_t>(ti)] : nullptr;
        base.push_back(clamp01(target.task_size_gb / kTaskSizeNorm));
        for (int kind : model_kinds_)
            base.push_back(kind == target.dnn_type ? 1.0 : 0.0);
        base.push_back(task ? task->completion() : 0.0);
        base.push_back(clamp01(target.max_latency_s / max_latency_));
        const bool active = task && !task->resolved;
        base.push_back(active ? 1.0 : 0.0);
        for (std::size_t n = 0; n < s.fleet.size(); ++n)
            base.push_back(active && task->holder == static_cast<int>(n) ? 1.0 : 0.0);
        base.push_back(active ? clamp01((state_.clock - task->spec.created_at) / task->spec.max_latency) : 0.0);
    }
    for (std::size_t n = 0; n < s.fleet.size(); ++n) {
        const auto& u = state_.uavs[n];
        base.push_back(clamp01(u.energy / s.fleet[n].energy_cap_j));
        base.push_back(clamp01(1.0 - u.memory_used / s.fleet[n].memory_cap_bytes));
        base.push_back(clamp01(u.position.x / side));
        base.push_back(clamp01(u.position.y / side));
        base.push_back(clamp01(u.position.z / (2.0 * alt)));
    }
    for (int id : route_.order) {
        const auto& c = s.target(id).center;
        base.push_back(clamp01(c.x / side));
        base.push_back(clamp01(c.y / side));
    }
    const std::size_t agent_block = base.size();
    for (std::size_t a = 0; a < agents_.size(); ++a)
        base.push_back(0.0);
    base.push_back(clamp01(static_cast<double>(round_in_leg_) / s.env.rounds_per_leg));
    base.push_back(route_.order.size() > 1 ? static_cast<double>(leg_) / (route_.order.size() - 1) : 0.0);

    std::vector<Observation> out(agents_.size(), base);
    for (std::size_t a = 0; a < agents_.size(); ++a)
        out[a][agent_block + a] = 1.0;
    return out;
}

EpisodeSummary SwarmEnv::summary() const
{
    const auto& s = *scenario_;
    const auto& w = s.weights;
    EpisodeSummary e;
    e.tasks = static_cast<int>(state_.tasks.size());
    double aoi = 0.0;
    double eta = 0.0;
    for (std::size_t i = 0; i < state_.tasks.size(); ++i) {
        const auto& t = state_.tasks[i];
        const double end = t.resolved ? resolved_at_[i] : state_.clock;
        aoi += end - t.spec.created_at;
        eta += t.completion();
        e.completed += t.completed ? 1 : 0;
    }
    if (e.tasks > 0) {
        e.mean_aoi = aoi / e.tasks;
        e.completion_rate = eta / e.tasks;
    }
    e.utility = w.delta * energy_term(s, initial_.uavs, state_.uavs) + w.epsilon * completion_sum_ +
                w.theta * balance_term(s, state_.uavs);
    e.total_reward = total_reward_;
    e.steps = steps_;
    return e;
}

std::string trace_csv(const std::vector<TraceRow>& rows)
{
    std::ostringstream out;
    out.precision(17);
    out << "t,agent,action,task,layers_done,aoi_s,e_comp_J,e_trans_J,e_fly_J,reward\n";
    for (const auto& r : rows)
        out << r.t << ',' << r.agent << ',' << r.action << ',' << r.task << ',' << r.layers_done << ',' << r.aoi_s
            << ',' << r.e_comp_j << ',' << r.e_trans_j << ',' << r.e_fly_j << ',' << r.reward << '\n';
    return out.str();
}

std::vector<int> scripted_actions(const SwarmEnv& env, const std::vector<AssignmentDecision>& plans)
{
    const auto& s = env.scenario();
    const auto& st = env.state();
    std::vector<int> actions(env.num_agents(), 0);
    std::vector<char> busy(env.num_agents(), 0);
    for (std::size_t q = 0; q < env.route().order.size(); ++q) {
        const int ti = env.task_index(static_cast<int>(q));
        if (ti < 0)
            continue;
        const auto& task = st.tasks[static_cast<std::size_t>(ti)];
        if (task.resolved)
            continue;
        const AssignmentDecision* plan = nullptr;
        for (const auto& p : plans)
            if (p.task_id == task.spec.id)
                plan = &p;
        if (plan == nullptr)
            continue;
        std::vector<int> bounds{0};
        bounds.insert(bounds.end(), plan->split_points.begin(), plan->split_points.end());
        bounds.push_back(task.num_layers());
        std::size_t stage = 0;
        while (stage + 1 < bounds.size() && bounds[stage + 1] <= task.frontier)
            ++stage;
        if (stage >= plan->executors.size())
            continue;
        for (std::size_t a = 0; a < env.num_agents(); ++a) {
            if (s.fleet[env.agent_uav(a)].id != plan->executors[stage] || busy[a])
                continue;
            const int b = std::min(s.env.block_max, bounds[stage + 1] - task.frontier);
            actions[a] = env.encode_action(static_cast<int>(q), b);
            busy[a] = 1;
        }
    }
    return actions;
}

} // namespace uavdnn
