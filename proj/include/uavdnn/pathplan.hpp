#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "uavdnn/scenario.hpp"

namespace uavdnn {

/// Added to the raw fitness of a leg that leaves before the departure node's
/// task can finish.
inline constexpr double kInfeasibleLegPenalty = 1e9;

struct LegScore {
    double distance = 0.0;
    /// flight time minus processing time at the departure node (signed)
    double slack = 0.0;
    double fitness = 0.0;
    bool feasible = true;
};

struct Route {
    std::vector<int> order;
    /// One entry per leg, base->first ... last->base.
    std::vector<double> leg_distances;
    std::vector<double> leg_slacks;
    std::vector<double> leg_fitness;
    double total_distance = 0.0;
    double total_fitness = 0.0;
    int violations = 0;
};

double leg_time(const Position3& a, const Position3& b, double speed_mps);
double processing_time(double task_size_gb, double rate_gb_per_min);

/// `departure_task_gb` is the task collected at the departure node (0 at base).
LegScore leg_fitness(const Position3& from, double departure_task_gb, const Position3& to, double speed_mps,
                     double rate_gb_per_min, const Weights& w);

int select_first_target(const Scenario& s);

/// Scores a fixed visiting order, including the return leg.
Route evaluate_order(const Scenario& s, const std::vector<int>& order);

Route plan_route(const Scenario& s, int k, int restarts, std::uint64_t seed);
Route plan_route_pure_greedy(const Scenario& s);

/// Targets in ascending id order (the unplanned baseline).
Route id_order_route(const Scenario& s);

std::string route_csv(const Route& r);

} // namespace uavdnn
