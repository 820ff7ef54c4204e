#pragma once

#include <optional>
#include <string>
#include <vector>

#include "uavdnn/physics.hpp"
#include "uavdnn/rng.hpp"
#include "uavdnn/scenario.hpp"

namespace uavdnn {

// Execution kernel shared by the environment and the assignment oracle, so a
// decision replayed in the environment costs exactly what the oracle scored.

struct UavRuntime {
    Position3 position;
    double energy = 0.0;
    double memory_used = 0.0;
    EnergyBreakdown spent;
};

/// Pairwise rates between UAVs for one leg (formation is rigid, so only the
/// shadowing draw changes between legs).
class LinkTable {
public:
    LinkTable() = default;
    /// Draws one shadowing sample per ordered pair when `shadow` is given and
    /// the scenario's sigma is positive.
    static LinkTable build(const Scenario& s, const std::vector<UavRuntime>& uavs, Rng* shadow);

    double rate(std::size_t from, std::size_t to) const { return rates_.at(from * n_ + to); }
    std::size_t size() const { return n_; }

private:
    std::size_t n_ = 0;
    std::vector<double> rates_;
};

struct TaskRun {
    TaskSpec spec;
    const DnnModelProfile* model = nullptr;
    /// task size relative to the reference size; scales compute and output
    double scale = 1.0;
    int frontier = 0;
    int holder = -1;
    double ready = 0.0;
    LatencyBreakdown latency;
    std::vector<int> executors;
    /// frontier value at each handoff, i.e. the realized split points
    std::vector<int> splits;
    std::vector<double> memory_held;
    bool resolved = false;
    bool completed = false;

    int num_layers() const { return static_cast<int>(model->num_layers()); }
    bool all_layers_done() const { return frontier == num_layers(); }
    double aoi() const { return latency.total(); }
    double completion() const { return static_cast<double>(frontier) / num_layers(); }
    bool expired(double now) const { return now - spec.created_at >= spec.max_latency; }
};

struct SwarmState {
    double clock = 0.0;
    std::vector<UavRuntime> uavs;
    std::vector<TaskRun> tasks;
    std::vector<int> visited_targets;
};

/// Fresh state: every UAV at its scenario position with full energy.
SwarmState initial_state(const Scenario& s);

/// Leader above `anchor` at the arena altitude, followers at their scenario
/// offsets from the leader.
std::vector<Position3> formation_positions(const Scenario& s, const Position3& anchor);

TaskRun make_task(const Scenario& s, int task_id, const TargetArea& origin, double created_at);

struct BlockCost {
    int sender = -1;
    double memory = 0.0;
    double transmit_s = 0.0;
    double transmit_j = 0.0;
    double compute_s = 0.0;
    double compute_j = 0.0;
    /// "C3" or "C4" when the block cannot run, empty otherwise
    std::string violation;
};

/// Cost of running the next `layers` layers of `task` on UAV `uav`.
BlockCost price_block(const Scenario& s, const SwarmState& st, const LinkTable& links, const TaskRun& task,
                      std::size_t uav, int layers);

struct BlockOutcome {
    BlockCost cost;
    double start = 0.0;
    double wait = 0.0;
    double finish = 0.0;
};

/// Runs a priced block starting at `start`. The payload handoff (if any) is
/// paid by the previous holder. Marks the task completed after its last layer.
BlockOutcome execute_block(const Scenario& s, SwarmState& st, TaskRun& task, std::size_t uav, int layers,
                           const BlockCost& cost, double start);

/// Frees the memory a task holds and flags it resolved.
void resolve_task(SwarmState& st, TaskRun& task);

double rendezvous_energy(const Scenario& s, const Position3& pos);

} // namespace uavdnn
