#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <set>

#include "support.hpp"
#include "uavdnn/csv.hpp"
#include "uavdnn/pathplan.hpp"

using namespace uavdnn;

namespace {

Scenario with_targets(std::vector<TargetArea> targets)
{
    auto s = generate_random_scenario(1, 3, 1);
    s.base = {0, 0, 0};
    s.targets = std::move(targets);
    return s;
}

double brute_force_optimum(const Scenario& s)
{
    std::vector<int> ids;
    for (const auto& t : s.targets)
        ids.push_back(t.id);
    std::sort(ids.begin(), ids.end());
    double best = std::numeric_limits<double>::infinity();
    do {
        // independent re-scoring of the order, leg by leg
        double total = 0.0;
        Position3 at = s.base;
        double collected = 0.0;
        for (int id : ids) {
            const auto& t = s.target(id);
            const double d = distance(at, t.center);
            const double slack = d / s.flight.speed_mps - collected / s.planning.processing_rate_gb_per_min * 60.0;
            total += s.weights.vartheta_dist * d + s.weights.rho_task * slack + (slack < 0 ? 1e9 : 0.0);
            at = t.center;
            collected = t.task_size_gb;
        }
        const double d = distance(at, s.base);
        const double slack = d / s.flight.speed_mps - collected / s.planning.processing_rate_gb_per_min * 60.0;
        total += s.weights.vartheta_dist * d + s.weights.rho_task * slack + (slack < 0 ? 1e9 : 0.0);
        best = std::min(best, total);
    } while (std::next_permutation(ids.begin(), ids.end()));
    return best;
}

double median(std::vector<double> v)
{
    std::sort(v.begin(), v.end());
    return v.size() % 2 ? v[v.size() / 2] : 0.5 * (v[v.size() / 2 - 1] + v[v.size() / 2]);
}

} // namespace

TEST(LegTime, HandValues)
{
    EXPECT_DOUBLE_EQ(leg_time({1, 2, 3}, {1, 2, 3}, 20.0), 0.0);
    EXPECT_DOUBLE_EQ(leg_time({0, 0, 0}, {6000, 0, 0}, 20.0), 300.0);
    EXPECT_NEAR(leg_time({0, 0, 0}, {1000, 1000, 0}, 20.0), 70.71, 0.005);
}

TEST(ProcessingTime, HandValues)
{
    EXPECT_DOUBLE_EQ(processing_time(0.0, 10.0), 0.0);
    EXPECT_DOUBLE_EQ(processing_time(30.0, 10.0), 180.0);
    EXPECT_DOUBLE_EQ(processing_time(80.0, 10.0), 480.0);
}

TEST(LegFitness, HandValues)
{
    Weights w;
    w.vartheta_dist = 1.0;
    w.rho_task = 0.0;
    EXPECT_DOUBLE_EQ(leg_fitness({0, 0, 0}, 0.0, {500, 0, 0}, 20.0, 10.0, w).fitness, 500.0);

    w.vartheta_dist = 0.5;
    w.rho_task = 0.5;
    const auto leg = leg_fitness({0, 0, 0}, 30.0, {6000, 0, 0}, 20.0, 10.0, w);
    EXPECT_TRUE(leg.feasible);
    EXPECT_DOUBLE_EQ(leg.slack, 120.0);
    EXPECT_DOUBLE_EQ(leg.fitness, 3060.0);

    const auto late = leg_fitness({0, 0, 0}, 80.0, {6000, 0, 0}, 20.0, 10.0, w);
    EXPECT_FALSE(late.feasible);
    EXPECT_GE(late.fitness, kInfeasibleLegPenalty);
}

TEST(SelectFirstTarget, RatioAndTies)
{
    auto s = with_targets({{1, {500, 0, 0}, 10, 1, 5}});
    EXPECT_EQ(select_first_target(s), 1);
    s = with_targets({{1, {1000, 0, 0}, 10, 1, 5}, {2, {0, 2000, 0}, 40, 1, 5}});
    EXPECT_EQ(select_first_target(s), 2);
    s = with_targets({{4, {1000, 0, 0}, 10, 1, 5}, {3, {0, 2000, 0}, 20, 1, 5}});
    EXPECT_EQ(select_first_target(s), 3);
}

TEST(PlanRoute, SingleTarget)
{
    const auto s = with_targets({{7, {3000, 4000, 0}, 10, 1, 5}});
    for (const auto& r : {plan_route(s, 5, 20, 1), plan_route_pure_greedy(s)}) {
        ASSERT_EQ(r.order, std::vector<int>{7});
        ASSERT_EQ(r.leg_distances.size(), 2u);
        EXPECT_DOUBLE_EQ(r.total_distance, 10000.0);
    }
}

TEST(PlanRoute, CollinearTargetsVisitedInSpatialOrder)
{
    const auto s = with_targets({{1, {3000, 0, 0}, 1, 1, 5}, {2, {1000, 0, 0}, 1, 1, 5}, {3, {2000, 0, 0}, 1, 1, 5}});
    EXPECT_EQ(plan_route_pure_greedy(s).order, (std::vector<int>{2, 3, 1}));
}

TEST(PlanRoute, PermutationAndDistanceInvariant)
{
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const auto s = generate_random_scenario(2 + static_cast<int>(seed % 15), 4, seed);
        for (const auto& r : {plan_route(s, 5, 3, seed), plan_route_pure_greedy(s), id_order_route(s)}) {
            std::set<int> seen(r.order.begin(), r.order.end());
            ASSERT_EQ(seen.size(), s.targets.size());
            ASSERT_EQ(r.order.size(), s.targets.size());
            double d = distance(s.base, s.target(r.order.front()).center);
            for (std::size_t i = 1; i < r.order.size(); ++i)
                d += distance(s.target(r.order[i - 1]).center, s.target(r.order[i]).center);
            d += distance(s.target(r.order.back()).center, s.base);
            ASSERT_NEAR(r.total_distance, d, 1e-9 * d);
            ASSERT_NEAR(r.total_fitness, std::accumulate(r.leg_fitness.begin(), r.leg_fitness.end(), 0.0),
                        1e-9 * std::abs(r.total_fitness));
        }
    }
}

TEST(PlanRoute, KCoveringAllEqualsPureGreedy)
{
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto s = generate_random_scenario(8, 4, seed);
        const auto a = plan_route(s, 8, 1, seed);
        const auto b = plan_route_pure_greedy(s);
        EXPECT_EQ(a.order, b.order);
        EXPECT_EQ(a.total_fitness, b.total_fitness);
    }
}

TEST(PlanRoute, MoreRestartsNeverWorse)
{
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto s = generate_random_scenario(20, 4, seed);
        double prev = plan_route(s, 5, 1, seed).total_fitness;
        for (int r = 2; r <= 12; ++r) {
            const double cur = plan_route(s, 5, r, seed).total_fitness;
            EXPECT_LE(cur, prev);
            prev = cur;
        }
    }
}

TEST(PlanRoute, DeterministicPerSeed)
{
    const auto s = generate_random_scenario(25, 4, 3);
    EXPECT_EQ(plan_route(s, 5, 20, 11).order, plan_route(s, 5, 20, 11).order);
    EXPECT_EQ(plan_route_pure_greedy(s).order, plan_route_pure_greedy(s).order);
}

TEST(PlanRoute, BracketedByExhaustiveOptimumOnSmallInstances)
{
    std::vector<double> opt;
    std::vector<double> rnd;
    std::vector<double> greedy;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto s = generate_random_scenario(7, 4, 1000 + seed);
        opt.push_back(brute_force_optimum(s));
        rnd.push_back(plan_route(s, 5, 20, seed).total_fitness);
        greedy.push_back(plan_route_pure_greedy(s).total_fitness);
        const auto scored = evaluate_order(s, plan_route(s, 5, 20, seed).order);
        EXPECT_LE(opt.back(), scored.total_fitness * (1 + 1e-12));
    }
    EXPECT_LE(median(opt), median(rnd));
    EXPECT_LE(median(rnd), median(greedy));
}

TEST(RouteCsv, GoldenHeaderAndRows)
{
    const auto s = with_targets({{1, {1000, 0, 0}, 1, 1, 5}, {2, {2000, 0, 0}, 1, 1, 5}});
    const auto t = csv::parse(route_csv(plan_route_pure_greedy(s)));
    EXPECT_EQ(t.header, (std::vector<std::string>{"step", "target_id", "leg_distance_m", "leg_slack_s",
                                                  "cumulative_fitness"}));
    ASSERT_EQ(t.rows.size(), 3u);
    EXPECT_EQ(t.rows.back()[1], "-1");
}
