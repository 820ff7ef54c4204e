#include "uavdnn/pathplan.hpp"

#include <algorithm>
#include <limits>
#include <optional>
#include <sstream>

#include "uavdnn/error.hpp"
#include "uavdnn/rng.hpp"

namespace uavdnn {

double leg_time(const Position3& a, const Position3& b, double speed_mps)
{
    if (!(speed_mps > 0.0))
        throw ValidationError("leg_time: speed must be > 0");
    return distance(a, b) / speed_mps;
}

double processing_time(double task_size_gb, double rate_gb_per_min)
{
    if (!(rate_gb_per_min > 0.0))
        throw ValidationError("processing_time: rate must be > 0");
    return task_size_gb / rate_gb_per_min * 60.0;
}

LegScore leg_fitness(const Position3& from, double departure_task_gb, const Position3& to, double speed_mps,
                     double rate_gb_per_min, const Weights& w)
{
    LegScore out;
    out.distance = distance(from, to);
    const double t_next = out.distance / speed_mps;
    const double t_q = processing_time(departure_task_gb, rate_gb_per_min);
    out.slack = t_next - t_q;
    out.fitness = w.vartheta_dist * out.distance + w.rho_task * out.slack;
    if (t_q > t_next) {
        out.feasible = false;
        out.fitness += kInfeasibleLegPenalty;
    }
    return out;
}

int select_first_target(const Scenario& s)
{
    if (s.targets.empty())
        throw ValidationError("select_first_target: targets non-empty");
    int best = -1;
    double best_ratio = -std::numeric_limits<double>::infinity();
    for (const auto& t : s.targets) {
        const double d = distance(t.center, s.base);
        const double ratio = d > 0.0 ? t.task_size_gb / d : std::numeric_limits<double>::infinity();
        if (ratio > best_ratio || (ratio == best_ratio && t.id < best)) {
            best_ratio = ratio;
            best = t.id;
        }
    }
    return best;
}

namespace {

class RouteBuilder {
public:
    explicit RouteBuilder(const Scenario& s) : s_(s) {}

    void add_leg(const Position3& from, double task_gb, const Position3& to)
    {
        const auto leg = leg_fitness(from, task_gb, to, s_.flight.speed_mps, s_.planning.processing_rate_gb_per_min,
                                     s_.weights);
        r_.leg_distances.push_back(leg.distance);
        r_.leg_slacks.push_back(leg.slack);
        r_.leg_fitness.push_back(leg.fitness);
        r_.total_distance += leg.distance;
        r_.total_fitness += leg.fitness;
        r_.violations += leg.feasible ? 0 : 1;
    }

    void visit(int id)
    {
        const auto& t = s_.target(id);
        if (r_.order.empty())
            add_leg(s_.base, 0.0, t.center);
        else {
            const auto& prev = s_.target(r_.order.back());
            add_leg(prev.center, prev.task_size_gb, t.center);
        }
        r_.order.push_back(id);
    }

    Route finish()
    {
        const auto& last = s_.target(r_.order.back());
        add_leg(last.center, last.task_size_gb, s_.base);
        return std::move(r_);
    }

private:
    const Scenario& s_;
    Route r_;
};

// One greedy construction. Without an rng every uninspected target is a
// candidate at every step.
Route construct(const Scenario& s, int k, Rng* rng)
{
    RouteBuilder builder(s);
    const int first = select_first_target(s);
    builder.visit(first);
    std::vector<int> remaining;
    for (const auto& t : s.targets)
        if (t.id != first)
            remaining.push_back(t.id);
    std::sort(remaining.begin(), remaining.end());
    int current = first;
    while (!remaining.empty()) {
        std::vector<int> candidates;
        if (rng == nullptr || static_cast<int>(remaining.size()) <= k)
            candidates = remaining;
        else
            candidates = rng->sample(remaining, static_cast<std::size_t>(k));
        const auto& cur = s.target(current);
        int best = -1;
        double best_fit = std::numeric_limits<double>::infinity();
        for (int id : candidates) {
            const auto leg = leg_fitness(cur.center, cur.task_size_gb, s.target(id).center, s.flight.speed_mps,
                                         s.planning.processing_rate_gb_per_min, s.weights);
            if (leg.fitness < best_fit || (leg.fitness == best_fit && id < best)) {
                best_fit = leg.fitness;
                best = id;
            }
        }
        builder.visit(best);
        remaining.erase(std::find(remaining.begin(), remaining.end(), best));
        current = best;
    }
    return builder.finish();
}

} // namespace

Route evaluate_order(const Scenario& s, const std::vector<int>& order)
{
    if (order.size() != s.targets.size())
        throw ValidationError("route: order must visit every target exactly once");
    std::vector<int> sorted = order;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw ValidationError("route: order must visit every target exactly once");
    RouteBuilder builder(s);
    for (int id : order)
        builder.visit(id);
    return builder.finish();
}

Route plan_route(const Scenario& s, int k, int restarts, std::uint64_t seed)
{
    if (k < 1)
        throw ValidationError("plan_route: k must be >= 1");
    if (restarts < 1)
        throw ValidationError("plan_route: restarts must be >= 1");
    std::optional<Route> best;
    for (int r = 0; r < restarts; ++r) {
        Rng rng(split_seed(seed, static_cast<std::uint64_t>(r)));
        Route cand = construct(s, k, &rng);
        if (!best || cand.total_fitness < best->total_fitness)
            best = std::move(cand);
    }
    return std::move(*best);
}

Route plan_route_pure_greedy(const Scenario& s)
{
    return construct(s, static_cast<int>(s.targets.size()), nullptr);
}

Route id_order_route(const Scenario& s)
{
    std::vector<int> order;
    for (const auto& t : s.targets)
        order.push_back(t.id);
    std::sort(order.begin(), order.end());
    return evaluate_order(s, order);
}

std::string route_csv(const Route& r)
{
    std::ostringstream out;
    out.precision(17);
    out << "step,target_id,leg_distance_m,leg_slack_s,cumulative_fitness\n";
    double cumulative = 0.0;
    for (std::size_t i = 0; i < r.leg_distances.size(); ++i) {
        cumulative += r.leg_fitness[i];
        const int id = i < r.order.size() ? r.order[i] : -1;
        out << i << ',' << id << ',' << r.leg_distances[i] << ',' << r.leg_slacks[i] << ',' << cumulative << '\n';
    }
    return out.str();
}

} // namespace uavdnn
