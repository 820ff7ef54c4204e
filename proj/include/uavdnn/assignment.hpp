#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "uavdnn/pipeline.hpp"
#include "uavdnn/scenario.hpp"

namespace uavdnn {

struct AssignmentDecision {
    int task_id = 0;
    /// UAV ids in pipeline order
    std::vector<int> executors;
    /// stage j runs layers split_points[j-1]+1 .. split_points[j]
    std::vector<int> split_points;

    friend bool operator==(const AssignmentDecision&, const AssignmentDecision&) = default;
};

enum class AssignmentMode { Swarm, Partial, Binary };

std::string to_string(AssignmentMode m);

struct UtilityReport {
    double u1 = 0.0;
    double u2 = 0.0;
    double u3 = 0.0;
    double total = 0.0;
    double eta = 0.0;
    double aoi = 0.0;
    bool completed = false;
    bool feasible = true;
    std::vector<std::string> violated;
    /// unnormalized energy spent by the decision (J) and variance of remaining energy (J^2)
    double energy_raw = 0.0;
    double variance_raw = 0.0;
    LatencyBreakdown latency;
};

AssignmentMode classify_mode(const AssignmentDecision& d, const std::vector<int>& follower_ids);

/// Replays a decision through the execution kernel, starting at the state's
/// clock, and returns the resulting state. The task is resolved at the end.
struct DecisionRun {
    SwarmState state;
    TaskRun task;
    std::vector<std::string> violated;
    bool structurally_valid = true;
};

DecisionRun simulate_decision(const AssignmentDecision& d, const Scenario& s, const SwarmState& state,
                              const LinkTable& links);

std::vector<std::string> check_constraints(const AssignmentDecision& d, const Scenario& s, const SwarmState& state,
                                           const LinkTable& links);

UtilityReport evaluate_utility(const AssignmentDecision& d, const Scenario& s, const SwarmState& state,
                               const LinkTable& links);

/// Utility components of a finished (resolved or abandoned) task given the
/// energy that was spent on it. Shared with the environment's episode score.
double task_completion_term(const TaskRun& task, const Weights& w);
double energy_term(const Scenario& s, const std::vector<UavRuntime>& before, const std::vector<UavRuntime>& after);
double balance_term(const Scenario& s, const std::vector<UavRuntime>& uavs);
double energy_variance(const std::vector<UavRuntime>& uavs);

/// Size of the decision space: sum over s of Perm(N_f, s) * C(L-1, s-1), plus
/// leader-first pipelines when `with_leader`.
std::uint64_t enumeration_count(int num_layers, int num_followers, bool with_leader);

/// Visits every structurally valid decision: stage count ascending, then
/// executor order, then split vector.
void enumerate_decisions(int task_id, int num_layers, const std::vector<int>& follower_ids, int leader_id,
                         bool with_leader, const std::function<void(const AssignmentDecision&)>& visit);

struct OracleResult {
    AssignmentDecision decision;
    UtilityReport report;
    std::uint64_t enumerated = 0;
    std::uint64_t feasible_count = 0;
    /// true when nothing was feasible and the least-violating decision is returned
    bool flagged = false;
};

inline constexpr std::uint64_t kOracleGuard = 1000000;

/// Throws GuardError when the decision space exceeds `guard`.
OracleResult solve_oracle(int task_id, const Scenario& s, const SwarmState& state, const LinkTable& links,
                          std::uint64_t guard = kOracleGuard);

/// Myopic baseline: assigns frontier blocks of ceil(L / pool) layers one at a
/// time to the UAV with the best marginal utility.
AssignmentDecision greedy_assignment_baseline(int task_id, const Scenario& s, const SwarmState& state,
                                              const LinkTable& links);

/// Oracle starting point for a scenario's first target: fresh state at the
/// first route target with its task created at time 0.
struct OracleSetup {
    SwarmState state;
    LinkTable links;
    int task_id = 1;
};
OracleSetup oracle_setup(const Scenario& s, int first_target_id, Rng* shadow = nullptr);

} // namespace uavdnn
