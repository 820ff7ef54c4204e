#include "uavdnn/pipeline.hpp"

#include <algorithm>

#include "uavdnn/error.hpp"

namespace uavdnn {

LinkTable LinkTable::build(const Scenario& s, const std::vector<UavRuntime>& uavs, Rng* shadow)
{
    LinkTable t;
    t.n_ = uavs.size();
    t.rates_.assign(t.n_ * t.n_, 0.0);
    const bool draw = shadow != nullptr && s.radio.shadow_sigma_db > 0.0;
    for (std::size_t i = 0; i < t.n_; ++i) {
        for (std::size_t j = 0; j < t.n_; ++j) {
            if (i == j)
                continue;
            const double xi = draw ? s.radio.shadow_sigma_db * shadow->normal() : 0.0;
            t.rates_[i * t.n_ + j] = link_budget(s.fleet[i], uavs[i].position, uavs[j].position, s.radio, xi).rate;
        }
    }
    return t;
}

SwarmState initial_state(const Scenario& s)
{
    SwarmState st;
    for (const auto& u : s.fleet)
        st.uavs.push_back({u.position, u.energy_cap_j, 0.0, {}});
    return st;
}

std::vector<Position3> formation_positions(const Scenario& s, const Position3& anchor)
{
    const auto& lead = s.leader().position;
    std::vector<Position3> out;
    for (const auto& u : s.fleet)
        out.push_back({anchor.x + (u.position.x - lead.x), anchor.y + (u.position.y - lead.y),
                       s.arena.altitude_m + (u.position.z - lead.z)});
    return out;
}

TaskRun make_task(const Scenario& s, int task_id, const TargetArea& origin, double created_at)
{
    TaskRun t;
    t.spec = {task_id, origin.dnn_type, origin.id, created_at, origin.max_latency_s, origin.task_size_gb};
    t.model = &s.model(origin.dnn_type);
    t.scale = origin.task_size_gb / s.env.reference_task_gb;
    t.ready = created_at;
    t.memory_held.assign(s.fleet.size(), 0.0);
    return t;
}

BlockCost price_block(const Scenario& s, const SwarmState& st, const LinkTable& links, const TaskRun& task,
                      std::size_t uav, int layers)
{
    if (layers < 1 || task.frontier + layers > task.num_layers())
        throw StateError("price_block: block runs past the last layer");
    const auto& spec = s.fleet[uav];
    BlockCost c;
    double cycles = 0.0;
    for (int l = task.frontier; l < task.frontier + layers; ++l) {
        const auto& layer = task.model->layers[static_cast<std::size_t>(l)];
        const double scaled = layer.compute_cycles * task.scale;
        cycles += scaled;
        c.compute_s += compute_time(scaled, spec.compute_rate_hz);
        c.memory += layer.memory_bytes;
    }
    c.compute_j = compute_energy(cycles, spec.compute_rate_hz, s.weights.k0);
    if (task.holder >= 0 && static_cast<std::size_t>(task.holder) != uav) {
        c.sender = task.holder;
        const double bits = task.model->layers[static_cast<std::size_t>(task.frontier - 1)].output_bits * task.scale;
        const auto tx = transmit_time_energy(bits, links.rate(static_cast<std::size_t>(task.holder), uav),
                                             s.fleet[static_cast<std::size_t>(task.holder)].tx_power_w);
        c.transmit_s = tx.seconds;
        c.transmit_j = tx.joules;
    }
    const auto& rt = st.uavs[uav];
    if (rt.memory_used + c.memory > spec.memory_cap_bytes)
        c.violation = "C3";
    else if (c.compute_j > rt.energy ||
             (c.sender >= 0 && c.transmit_j > st.uavs[static_cast<std::size_t>(c.sender)].energy))
        c.violation = "C4";
    return c;
}

BlockOutcome execute_block(const Scenario& s, SwarmState& st, TaskRun& task, std::size_t uav, int layers,
                           const BlockCost& cost, double start)
{
    (void)s;
    BlockOutcome out;
    out.cost = cost;
    out.start = start;
    out.wait = start - task.ready;
    out.finish = start + cost.transmit_s + cost.compute_s;

    if (cost.sender >= 0) {
        auto& sender = st.uavs[static_cast<std::size_t>(cost.sender)];
        sender.energy -= cost.transmit_j;
        sender.spent.transmit += cost.transmit_j;
        task.splits.push_back(task.frontier);
    }
    auto& rt = st.uavs[uav];
    rt.energy -= cost.compute_j;
    rt.spent.compute += cost.compute_j;
    rt.memory_used += cost.memory;
    task.memory_held[uav] += cost.memory;

    if (task.executors.empty() || task.executors.back() != static_cast<int>(uav))
        task.executors.push_back(static_cast<int>(uav));
    task.latency.waiting += out.wait;
    task.latency.transmit += cost.transmit_s;
    task.latency.compute += cost.compute_s;
    task.frontier += layers;
    task.holder = static_cast<int>(uav);
    task.ready = out.finish;
    if (task.all_layers_done())
        task.completed = true;
    return out;
}

void resolve_task(SwarmState& st, TaskRun& task)
{
    for (std::size_t n = 0; n < task.memory_held.size(); ++n) {
        st.uavs[n].memory_used -= task.memory_held[n];
        task.memory_held[n] = 0.0;
    }
    task.resolved = true;
}

double rendezvous_energy(const Scenario& s, const Position3& pos)
{
    const double v = s.flight.speed_mps;
    return propulsion_power(v, s.flight) * distance(pos, s.base) / v;
}

} // namespace uavdnn
