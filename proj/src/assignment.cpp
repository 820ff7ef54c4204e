#include "uavdnn/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "uavdnn/error.hpp"

namespace uavdnn {

std::string to_string(AssignmentMode m)
{
    switch (m) {
    case AssignmentMode::Swarm:
        return "swarm";
    case AssignmentMode::Partial:
        return "partial";
    case AssignmentMode::Binary:
        return "binary";
    }
    return "?";
}

AssignmentMode classify_mode(const AssignmentDecision& d, const std::vector<int>& follower_ids)
{
    std::set<int> followers(follower_ids.begin(), follower_ids.end());
    std::size_t used = 0;
    for (int e : d.executors)
        used += followers.count(e);
    if (used == followers.size())
        return AssignmentMode::Swarm;
    if (d.executors.size() == 1 && used == 1)
        return AssignmentMode::Binary;
    return AssignmentMode::Partial;
}

namespace {

std::size_t fleet_index(const Scenario& s, int id)
{
    for (std::size_t i = 0; i < s.fleet.size(); ++i)
        if (s.fleet[i].id == id)
            return i;
    return s.fleet.size();
}

std::size_t task_slot(const SwarmState& st, int task_id)
{
    for (std::size_t i = 0; i < st.tasks.size(); ++i)
        if (st.tasks[i].spec.id == task_id)
            return i;
    throw StateError("no task with id " + std::to_string(task_id) + " in state");
}

void note(std::vector<std::string>& out, const std::string& id)
{
    if (std::find(out.begin(), out.end(), id) == out.end())
        out.push_back(id);
}

// Runs `layers` layers of the task on one UAV in block_max-sized rounds.
// Returns false when the deadline passed before the layers could start.
bool run_stage(const Scenario& s, SwarmState& st, const LinkTable& links, TaskRun& task, std::size_t uav, int layers,
               double& now, std::vector<std::string>& violated)
{
    int left = layers;
    while (left > 0) {
        if (task.expired(now))
            return false;
        const int b = std::min(left, s.env.block_max);
        const auto cost = price_block(s, st, links, task, uav, b);
        if (!cost.violation.empty())
            note(violated, cost.violation);
        now = execute_block(s, st, task, uav, b, cost, now).finish;
        left -= b;
    }
    return true;
}

std::vector<std::string> structural_violations(const AssignmentDecision& d, const Scenario& s, const TaskRun& task)
{
    std::vector<std::string> v;
    const int L = task.num_layers();
    bool c1 = !d.executors.empty() && d.split_points.size() + 1 == d.executors.size();
    for (std::size_t j = 0; c1 && j < d.split_points.size(); ++j) {
        const int p = d.split_points[j];
        if (p < 1 || p > L - 1 || (j > 0 && p <= d.split_points[j - 1]))
            c1 = false;
    }
    if (!c1)
        note(v, "C1");
    std::set<int> seen;
    bool c2 = d.executors.size() <= s.fleet.size();
    for (std::size_t j = 0; j < d.executors.size(); ++j) {
        const auto idx = fleet_index(s, d.executors[j]);
        if (idx == s.fleet.size() || !seen.insert(d.executors[j]).second)
            c2 = false;
        else if (s.fleet[idx].role == Role::Leader && (j != 0 || !s.env.leader_executes))
            c2 = false;
    }
    if (!c2)
        note(v, "C2");
    return v;
}

} // namespace

DecisionRun simulate_decision(const AssignmentDecision& d, const Scenario& s, const SwarmState& state,
                              const LinkTable& links)
{
    DecisionRun run{state, {}, {}, true};
    const auto slot = task_slot(run.state, d.task_id);
    TaskRun& task = run.state.tasks[slot];
    if (task.frontier != 0 || task.resolved)
        throw StateError("simulate_decision: task already started");
    run.violated = structural_violations(d, s, task);
    if (std::find(run.state.visited_targets.begin(), run.state.visited_targets.end(), task.spec.origin_target) ==
        run.state.visited_targets.end())
        note(run.violated, "C6");
    if (!run.violated.empty() && (run.violated[0] == "C1" || run.violated[0] == "C2")) {
        run.structurally_valid = false;
        run.task = task;
        return run;
    }

    double now = run.state.clock;
    std::vector<int> bounds{0};
    bounds.insert(bounds.end(), d.split_points.begin(), d.split_points.end());
    bounds.push_back(task.num_layers());
    for (std::size_t j = 0; j < d.executors.size(); ++j) {
        const auto uav = fleet_index(s, d.executors[j]);
        if (!run_stage(s, run.state, links, task, uav, bounds[j + 1] - bounds[j], now, run.violated))
            break;
    }
    if (!task.completed || task.aoi() > task.spec.max_latency)
        note(run.violated, "C7");
    for (std::size_t n = 0; n < run.state.uavs.size(); ++n) {
        const auto& u = run.state.uavs[n];
        if (u.energy < 0.0)
            note(run.violated, "C4");
        const bool involved = task.memory_held[n] > 0.0 || u.spent.transmit != state.uavs[n].spent.transmit;
        if (involved && u.energy < rendezvous_energy(s, u.position))
            note(run.violated, "C5");
    }
    run.state.clock = now;
    resolve_task(run.state, task);
    run.task = task;
    std::sort(run.violated.begin(), run.violated.end());
    return run;
}

std::vector<std::string> check_constraints(const AssignmentDecision& d, const Scenario& s, const SwarmState& state,
                                           const LinkTable& links)
{
    return simulate_decision(d, s, state, links).violated;
}

double task_completion_term(const TaskRun& task, const Weights& w)
{
    const double eta = task.completion();
    if (task.completed)
        return w.alpha * eta - w.beta * task.aoi() / task.spec.max_latency;
    return w.gamma * eta - w.beta;
}

double energy_term(const Scenario& s, const std::vector<UavRuntime>& before, const std::vector<UavRuntime>& after)
{
    double sum = 0.0;
    for (std::size_t n = 0; n < after.size(); ++n) {
        const double used = (after[n].spent.compute - before[n].spent.compute) +
                            (after[n].spent.transmit - before[n].spent.transmit);
        sum += used / s.fleet[n].energy_cap_j;
    }
    return -sum;
}

namespace {

double variance(const std::vector<double>& xs)
{
    double mean = 0.0;
    for (double x : xs)
        mean += x;
    mean /= static_cast<double>(xs.size());
    double v = 0.0;
    for (double x : xs)
        v += (x - mean) * (x - mean);
    return v / static_cast<double>(xs.size());
}

} // namespace

double balance_term(const Scenario& s, const std::vector<UavRuntime>& uavs)
{
    std::vector<double> frac;
    for (std::size_t n = 0; n < uavs.size(); ++n)
        frac.push_back(uavs[n].energy / s.fleet[n].energy_cap_j);
    return -variance(frac);
}

double energy_variance(const std::vector<UavRuntime>& uavs)
{
    std::vector<double> e;
    for (const auto& u : uavs)
        e.push_back(u.energy);
    return variance(e);
}

UtilityReport evaluate_utility(const AssignmentDecision& d, const Scenario& s, const SwarmState& state,
                               const LinkTable& links)
{
    const auto run = simulate_decision(d, s, state, links);
    UtilityReport r;
    r.violated = run.violated;
    r.feasible = run.violated.empty();
    if (!run.structurally_valid) {
        r.total = -std::numeric_limits<double>::infinity();
        return r;
    }
    const auto& w = s.weights;
    r.u1 = energy_term(s, state.uavs, run.state.uavs);
    r.u2 = task_completion_term(run.task, w);
    r.u3 = balance_term(s, run.state.uavs);
    r.total = w.delta * r.u1 + w.epsilon * r.u2 + w.theta * r.u3;
    r.eta = run.task.completion();
    r.aoi = run.task.aoi();
    r.completed = run.task.completed;
    r.latency = run.task.latency;
    for (std::size_t n = 0; n < state.uavs.size(); ++n)
        r.energy_raw += (run.state.uavs[n].spent.compute - state.uavs[n].spent.compute) +
                        (run.state.uavs[n].spent.transmit - state.uavs[n].spent.transmit);
    r.variance_raw = energy_variance(run.state.uavs);
    return r;
}

namespace {

std::uint64_t choose(int n, int k)
{
    if (k < 0 || k > n)
        return 0;
    std::uint64_t r = 1;
    for (int i = 1; i <= k; ++i)
        r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
    return r;
}

std::uint64_t perm(int n, int k)
{
    if (k < 0 || k > n)
        return 0;
    std::uint64_t r = 1;
    for (int i = 0; i < k; ++i)
        r *= static_cast<std::uint64_t>(n - i);
    return r;
}

// Calls visit(splits) for every strictly increasing vector of `count` values in [1, L-1].
void for_each_split(int L, int count, std::vector<int>& cur, const std::function<void()>& visit)
{
    if (static_cast<int>(cur.size()) == count) {
        visit();
        return;
    }
    const int lo = cur.empty() ? 1 : cur.back() + 1;
    const int remaining = count - static_cast<int>(cur.size());
    for (int p = lo; p <= L - remaining; ++p) {
        cur.push_back(p);
        for_each_split(L, count, cur, visit);
        cur.pop_back();
    }
}

void for_each_ordering(const std::vector<int>& pool, int length, std::vector<int>& cur, std::vector<bool>& used,
                       const std::function<void()>& visit)
{
    if (static_cast<int>(cur.size()) == length) {
        visit();
        return;
    }
    for (std::size_t i = 0; i < pool.size(); ++i) {
        if (used[i])
            continue;
        used[i] = true;
        cur.push_back(pool[i]);
        for_each_ordering(pool, length, cur, used, visit);
        cur.pop_back();
        used[i] = false;
    }
}

} // namespace

std::uint64_t enumeration_count(int num_layers, int num_followers, bool with_leader)
{
    std::uint64_t total = 0;
    for (int s = 1; s <= std::min(num_followers, num_layers); ++s)
        total += perm(num_followers, s) * choose(num_layers - 1, s - 1);
    if (with_leader)
        for (int s = 1; s <= std::min(num_followers, num_layers - 1); ++s)
            total += perm(num_followers, s) * choose(num_layers - 1, s);
    return total;
}

void enumerate_decisions(int task_id, int num_layers, const std::vector<int>& follower_ids, int leader_id,
                         bool with_leader, const std::function<void(const AssignmentDecision&)>& visit)
{
    if (num_layers < 1)
        throw ValidationError("enumerate_decisions: L must be >= 1");
    const int nf = static_cast<int>(follower_ids.size());
    AssignmentDecision d;
    d.task_id = task_id;
    std::vector<int> order;
    std::vector<bool> used(follower_ids.size(), false);
    std::vector<int> splits;
    for (int stages = 1; stages <= std::min(nf + (with_leader ? 1 : 0), num_layers); ++stages) {
        if (stages <= nf) {
            for_each_ordering(follower_ids, stages, order, used, [&] {
                for_each_split(num_layers, stages - 1, splits, [&] {
                    d.executors = order;
                    d.split_points = splits;
                    visit(d);
                });
            });
        }
        if (with_leader && stages >= 2) {
            for_each_ordering(follower_ids, stages - 1, order, used, [&] {
                for_each_split(num_layers, stages - 1, splits, [&] {
                    d.executors.assign(1, leader_id);
                    d.executors.insert(d.executors.end(), order.begin(), order.end());
                    d.split_points = splits;
                    visit(d);
                });
            });
        }
    }
}

namespace {

// Preference among equal-utility decisions: fewer stages, then split vector,
// then executor order.
bool preferred_tie(const AssignmentDecision& a, const AssignmentDecision& b)
{
    if (a.executors.size() != b.executors.size())
        return a.executors.size() < b.executors.size();
    if (a.split_points != b.split_points)
        return a.split_points < b.split_points;
    return a.executors < b.executors;
}

std::vector<int> follower_ids(const Scenario& s)
{
    std::vector<int> ids;
    for (auto i : follower_indices(s))
        ids.push_back(s.fleet[i].id);
    std::sort(ids.begin(), ids.end());
    return ids;
}

} // namespace

OracleResult solve_oracle(int task_id, const Scenario& s, const SwarmState& state, const LinkTable& links,
                          std::uint64_t guard)
{
    const auto& task = state.tasks[task_slot(state, task_id)];
    const auto followers = follower_ids(s);
    const int L = task.num_layers();
    const bool with_leader = s.env.leader_executes;
    const auto count = enumeration_count(L, static_cast<int>(followers.size()), with_leader);
    if (count > guard)
        throw GuardError("oracle: " + std::to_string(count) + " decisions exceed the guard of " +
                         std::to_string(guard));
    OracleResult best;
    bool have_feasible = false;
    bool have_any = false;
    enumerate_decisions(task_id, L, followers, s.leader().id, with_leader, [&](const AssignmentDecision& d) {
        ++best.enumerated;
        auto rep = evaluate_utility(d, s, state, links);
        if (rep.feasible) {
            ++best.feasible_count;
            if (!have_feasible || rep.total > best.report.total ||
                (rep.total == best.report.total && preferred_tie(d, best.decision))) {
                best.decision = d;
                best.report = std::move(rep);
                have_feasible = true;
                have_any = true;
            }
        } else if (!have_feasible) {
            const bool better =
                !have_any || rep.violated.size() < best.report.violated.size() ||
                (rep.violated.size() == best.report.violated.size() &&
                 (rep.total > best.report.total ||
                  (rep.total == best.report.total && preferred_tie(d, best.decision))));
            if (better) {
                best.decision = d;
                best.report = std::move(rep);
                have_any = true;
            }
        }
    });
    best.flagged = !have_feasible;
    return best;
}

AssignmentDecision greedy_assignment_baseline(int task_id, const Scenario& s, const SwarmState& state,
                                              const LinkTable& links)
{
    SwarmState st = state;
    const auto slot = task_slot(st, task_id);
    const int L = st.tasks[slot].num_layers();
    std::vector<std::size_t> pool = follower_indices(s);
    if (s.env.leader_executes)
        pool.insert(pool.begin(), s.leader_index());
    const int block = (L + static_cast<int>(pool.size()) - 1) / static_cast<int>(pool.size());
    const auto& w = s.weights;
    double now = st.clock;

    while (st.tasks[slot].frontier < L) {
        const auto& task = st.tasks[slot];
        struct Trial {
            SwarmState state;
            double now = 0.0;
            double score = 0.0;
        };
        std::optional<Trial> chosen;
        std::optional<Trial> fallback;
        for (int size = std::min(block, L - task.frontier); size >= 1 && !chosen; --size) {
            for (std::size_t uav : pool) {
                const bool is_leader = s.fleet[uav].role == Role::Leader;
                if (is_leader && task.frontier != 0)
                    continue;
                const bool holder = task.holder == static_cast<int>(uav);
                const bool unused = std::find(task.executors.begin(), task.executors.end(), static_cast<int>(uav)) ==
                                    task.executors.end();
                if (!holder && !unused)
                    continue;
                Trial t{st, now, 0.0};
                std::vector<std::string> violated;
                auto& tt = t.state.tasks[slot];
                // Deadline is not applied while building the plan.
                int left = size;
                while (left > 0) {
                    const int b = std::min(left, s.env.block_max);
                    const auto cost = price_block(s, t.state, links, tt, uav, b);
                    if (!cost.violation.empty())
                        note(violated, cost.violation);
                    t.now = execute_block(s, t.state, tt, uav, b, cost, t.now).finish;
                    left -= b;
                }
                t.score = w.delta * energy_term(s, state.uavs, t.state.uavs) +
                          w.epsilon * (-w.beta * tt.aoi() / tt.spec.max_latency) +
                          w.theta * balance_term(s, t.state.uavs);
                const bool c3 = std::find(violated.begin(), violated.end(), "C3") != violated.end();
                auto& slot_ref = c3 ? fallback : chosen;
                if (!slot_ref || t.score > slot_ref->score)
                    slot_ref = std::move(t);
            }
        }
        if (!chosen)
            chosen = std::move(fallback);
        if (!chosen)
            throw StateError("greedy baseline: no eligible UAV for the next block");
        st = std::move(chosen->state);
        now = chosen->now;
    }
    const auto& task = st.tasks[slot];
    AssignmentDecision d;
    d.task_id = task_id;
    for (int idx : task.executors)
        d.executors.push_back(s.fleet[static_cast<std::size_t>(idx)].id);
    d.split_points = task.splits;
    return d;
}

OracleSetup oracle_setup(const Scenario& s, int first_target_id, Rng* shadow)
{
    OracleSetup o;
    o.state = initial_state(s);
    const auto& target = s.target(first_target_id);
    const auto pos = formation_positions(s, target.center);
    for (std::size_t n = 0; n < pos.size(); ++n)
        o.state.uavs[n].position = pos[n];
    o.links = LinkTable::build(s, o.state.uavs, shadow);
    o.state.tasks.push_back(make_task(s, 1, target, 0.0));
    o.state.visited_targets.push_back(first_target_id);
    o.task_id = 1;
    return o;
}

} // namespace uavdnn
