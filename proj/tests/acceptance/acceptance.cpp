// Acceptance checks: one PASS/FAIL line per criterion. Pass criterion names
// as arguments to run a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <limits>
#include <memory>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "checks.hpp"
#include "commands.hpp"
#include "oracles.hpp"
#include "support.hpp"
#include "uavdnn/assignment.hpp"
#include "uavdnn/env.hpp"
#include "uavdnn/marl.hpp"
#include "uavdnn/pathplan.hpp"
#include "uavdnn/physics.hpp"

namespace fs = std::filesystem;
using namespace uavdnn;

namespace {

// --- pinned thresholds -----------------------------------------------------

constexpr int kPlanInstances = 30;
constexpr int kPlanUavs = 9;
constexpr int kPlanK = 5;
constexpr int kPlanRestarts = 20;
constexpr double kPlanMinImprovementAtW50 = 0.05;
constexpr double kPlanBudgetS = 60.0;

constexpr int kGapTargets = 7;
constexpr int kGapInstances = 20;
constexpr double kGapTolerance = 0.15;
constexpr double kGapMinShare = 0.80;
constexpr double kGapBudgetS = 120.0;

constexpr std::uint64_t kOracleInstances = 300;
constexpr int kOracleMaxLayers = 8;
constexpr int kOracleMaxFollowers = 4;

constexpr double kMachineRel = 4 * std::numeric_limits<double>::epsilon();
constexpr double kHandRel = 1e-9;
// AoI sums a handful of divisions and one log2/pow rate evaluation
constexpr double kAoiRel = 1e-13;
constexpr double kConservationRel = 1e-9;
constexpr int kFuzzEpisodes = 1000;

constexpr int kVarianceSamples = 100000;
constexpr double kVarianceMaxZ = 3.0;
constexpr int kDenoiseUpdates = 2000;
constexpr double kDenoiseMinDrop = 10.0;
constexpr double kGradMaxRel = 1e-4;
constexpr int kGradSeeds = 5;
constexpr double kDiffusionBudgetS = 300.0;

constexpr int kLearnSeeds = 10;
constexpr int kLearnMinSeeds = 6;
constexpr double kLearnRatio = 0.9;
constexpr double kLearnBudgetS = 1800.0;

constexpr int kBanditSeeds = 10;
constexpr int kBanditMinSeeds = 9;
constexpr int kBanditUpdates = 2000;
// greedy decodes over fresh chain starts; "converged" means a clear majority
constexpr double kBanditMinShare = 0.95;
constexpr double kBanditBudgetS = 60.0;

// Learning config for the tiny env. The paper-scale defaults (batch 512,
// 256x256, plain SGD) need far more than the runtime budget on one core.
TrainConfig learning_config(std::uint64_t seed)
{
    TrainConfig c;
    c.episodes = 300;
    c.batch = 64;
    c.hidden = {64, 64};
    c.adam = true;
    c.epsilon_decay = 0.003;
    c.eval_every = 10;
    c.seed = seed;
    return c;
}

// ---------------------------------------------------------------------------

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

double median(std::vector<double> v)
{
    std::sort(v.begin(), v.end());
    const auto n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

struct Verdict {
    bool pass;
    std::string detail;
};

std::string fmt(const char* f, double a)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

Verdict path_planning()
{
    const auto t0 = Clock::now();
    std::ostringstream d;
    std::vector<double> medians;
    for (int W : {10, 20, 30, 40, 50}) {
        std::vector<double> improvement;
        for (int i = 0; i < kPlanInstances; ++i) {
            const auto inst = split_seed(static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(W));
            const auto s = generate_random_scenario(W, kPlanUavs, inst);
            const double greedy = plan_route_pure_greedy(s).total_fitness;
            const double randomized = plan_route(s, kPlanK, kPlanRestarts, split_seed(inst, 7)).total_fitness;
            improvement.push_back((greedy - randomized) / greedy);
        }
        medians.push_back(median(improvement));
        d << "W=" << W << ":" << fmt("%.4f", medians.back()) << " ";
    }
    bool monotone = true;
    for (std::size_t i = 1; i < medians.size(); ++i)
        monotone = monotone && medians[i] >= medians[i - 1];
    const double secs = seconds_since(t0);
    d << "monotone=" << (monotone ? "yes" : "no") << " time=" << fmt("%.1fs", secs);
    return {monotone && medians.back() >= kPlanMinImprovementAtW50 && secs < kPlanBudgetS, d.str()};
}

// Independent scoring of every permutation.
double brute_force_route(const Scenario& s)
{
    std::vector<int> ids;
    for (const auto& t : s.targets)
        ids.push_back(t.id);
    std::sort(ids.begin(), ids.end());
    const double rate = s.planning.processing_rate_gb_per_min / 60.0;
    double best = std::numeric_limits<double>::infinity();
    do {
        double total = 0.0;
        Position3 at = s.base;
        double collected = 0.0;
        auto leg = [&](const Position3& to) {
            const double dist = distance(at, to);
            const double slack = dist / s.flight.speed_mps - collected / rate;
            total += s.weights.vartheta_dist * dist + s.weights.rho_task * slack +
                     (slack < 0 ? kInfeasibleLegPenalty : 0.0);
            at = to;
        };
        for (int id : ids) {
            leg(s.target(id).center);
            collected = s.target(id).task_size_gb;
        }
        leg(s.base);
        best = std::min(best, total);
    } while (std::next_permutation(ids.begin(), ids.end()));
    return best;
}

Verdict route_gap()
{
    const auto t0 = Clock::now();
    int within = 0;
    std::vector<double> gaps;
    for (int i = 0; i < kGapInstances; ++i) {
        const auto inst = split_seed(static_cast<std::uint64_t>(i), 7000);
        const auto s = generate_random_scenario(kGapTargets, kPlanUavs, inst);
        const double opt = brute_force_route(s);
        const double got = plan_route(s, kPlanK, kPlanRestarts, split_seed(inst, 7)).total_fitness;
        const double gap = (got - opt) / std::abs(opt);
        gaps.push_back(gap);
        within += gap <= kGapTolerance ? 1 : 0;
    }
    const double secs = seconds_since(t0);
    const double share = static_cast<double>(within) / kGapInstances;
    std::ostringstream d;
    d << within << "/" << kGapInstances << " within " << kGapTolerance * 100 << "%, median gap "
      << fmt("%.4f", median(gaps)) << " time=" << fmt("%.1fs", secs);
    return {share >= kGapMinShare && secs < kGapBudgetS, d.str()};
}

std::uint64_t closed_form_count(int L, int nf, bool leader)
{
    auto perm = [](int n, int k) {
        std::uint64_t r = 1;
        for (int i = 0; i < k; ++i)
            r *= static_cast<std::uint64_t>(n - i);
        return k > n ? std::uint64_t{0} : r;
    };
    auto choose = [](int n, int k) {
        if (k < 0 || k > n)
            return std::uint64_t{0};
        std::uint64_t r = 1;
        for (int i = 1; i <= k; ++i)
            r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
        return r;
    };
    std::uint64_t n = 0;
    for (int s = 1; s <= std::min(nf, L); ++s)
        n += perm(nf, s) * choose(L - 1, s - 1);
    if (leader)
        for (int s = 1; s <= std::min(nf, L - 1); ++s)
            n += perm(nf, s) * choose(L - 1, s);
    return n;
}

Verdict oracle_consistency()
{
    std::uint64_t agree = 0, feasible = 0;
    for (std::uint64_t seed = 0; seed < kOracleInstances; ++seed) {
        const auto s = test::random_oracle_instance(seed);
        const auto setup = oracle_setup(s, 1);
        const auto r = solve_oracle(1, s, setup.state, setup.links);
        const auto other = test::second_oracle(1, s, setup.state, setup.links);
        const bool same = other.visited == r.enumerated && other.any_feasible == !r.flagged &&
                          (!other.any_feasible || other.best == r.report.total);
        agree += same ? 1 : 0;
        feasible += other.any_feasible ? 1 : 0;
    }
    int counts_ok = 0, counts = 0;
    for (int L = 1; L <= kOracleMaxLayers; ++L)
        for (int nf = 1; nf <= kOracleMaxFollowers; ++nf)
            for (bool leader : {false, true}) {
                std::uint64_t visited = 0;
                std::vector<int> ids;
                for (int i = 1; i <= nf; ++i)
                    ids.push_back(i);
                enumerate_decisions(1, L, ids, 0, leader, [&](const AssignmentDecision&) { ++visited; });
                const auto closed = closed_form_count(L, nf, leader);
                counts_ok += visited == closed && enumeration_count(L, nf, leader) == closed ? 1 : 0;
                ++counts;
            }
    std::ostringstream d;
    d << agree << "/" << kOracleInstances << " instances equal (" << feasible << " feasible), " << counts_ok << "/"
      << counts << " counts match closed form";
    return {agree == kOracleInstances && counts_ok == counts, d.str()};
}

double tiny_rate(double dist)
{
    const double pl = 20 * std::log10(4 * std::numbers::pi * 2.4e9 / 3e8) + 20 * std::log10(dist);
    return 1e6 * std::log2(1 + std::pow(10.0, (20.0 - pl + 115.0) / 10.0));
}

SwarmEnv make_env(Scenario s)
{
    auto sp = std::make_shared<const Scenario>(std::move(s));
    return SwarmEnv(sp, plan_route(*sp, 5, 4, 0));
}

Verdict physics()
{
    std::ostringstream d;
    bool ok = true;
    const FlightConstants fc;
    const double hover = test::rel_err(propulsion_power(0.0, fc), fc.p_blade_w + fc.p_induced_w);
    ok = ok && hover <= kMachineRel;
    d << "hover " << fmt("%.1e", hover);

    const double ref = 20.0 * std::log10(4.0 * std::numbers::pi * 2.4e9 / 3e8);
    double hand = test::rel_err(pathloss_ci(1000.0, 2.4e9, 2.0, 0.0), ref + 60.0);
    hand = std::max(hand, test::rel_err(pathloss_ci(1.0, 2.4e9, 2.0, 0.0), ref));
    hand = std::max(hand, test::rel_err(sinr_db(20.0, ref + 60.0, 0.0, dbm_to_watts(-115.0)), 20.0 - ref - 60.0 + 115.0));
    hand = std::max(hand, test::rel_err(link_rate(1e6, 15.0), 1e6 * std::log2(1.0 + std::pow(10.0, 1.5))));
    ok = ok && hand <= kHandRel;
    d << ", radio " << fmt("%.1e", hand);

    double aoi_err = 0.0;
    {
        auto env = make_env(test::roomy_tiny());
        env.reset(0);
        env.step({0, 0, 0});
        env.step({env.encode_action(0, 4), 0, 0});
        env.step({env.encode_action(0, 2), 0, 0});
        const auto& t = env.state().tasks.front();
        const double expect = 0.05 + (3.0 + 2.4 + 1.8 + 1.2 + 0.6 + 0.3) * 1e9 / 15e9;
        aoi_err = std::max(aoi_err, test::rel_err(t.aoi(), expect));
        ok = ok && env.done() && t.completed;
    }
    {
        auto env = make_env(tiny_scenario());
        env.reset(0);
        env.step({env.encode_action(0, 3), 0, 0});
        env.step({0, env.encode_action(0, 3), 0});
        const auto& t = env.state().tasks.front();
        const double expect =
            (3.0 + 2.4 + 1.8) * 1e9 / 15e9 + 4e6 / tiny_rate(400.0) + (1.2 + 0.6 + 0.3) * 1e9 / 15e9;
        aoi_err = std::max(aoi_err, test::rel_err(t.aoi(), expect));
        ok = ok && t.completed;
    }
    ok = ok && aoi_err <= kAoiRel;
    d << ", aoi " << fmt("%.1e", aoi_err);

    Rng pick(99);
    double worst = 0.0;
    long steps = 0;
    for (std::uint64_t ep = 0; ep < kFuzzEpisodes; ++ep) {
        auto s = generate_random_scenario(1 + static_cast<int>(ep % 3), 3 + static_cast<int>(ep % 3), ep);
        s.env.leader_executes = ep % 2 == 0;
        auto env = make_env(s);
        env.reset(ep);
        while (!env.done()) {
            std::vector<int> actions;
            for (std::size_t a = 0; a < env.num_agents(); ++a)
                actions.push_back(static_cast<int>(pick.uniform_index(env.action_dim())));
            env.step(actions);
            ++steps;
            const auto& st = env.state();
            for (std::size_t n = 0; n < st.uavs.size(); ++n) {
                const double cap = s.fleet[n].energy_cap_j;
                worst = std::max(worst, std::abs(cap - st.uavs[n].energy - st.uavs[n].spent.total()) / cap);
            }
        }
    }
    ok = ok && worst <= kConservationRel;
    d << ", conservation " << fmt("%.1e", worst) << " over " << steps << " steps";
    return {ok, d.str()};
}

Verdict diffusion()
{
    const auto t0 = Clock::now();
    std::ostringstream d;
    const double z = test::forward_variance_zscore(make_schedule(10, 1e-4, 0.05), kVarianceSamples, 0);

    const auto sched = make_schedule(10, 1e-4, 0.05);
    bool identities = true;
    const Matrix x = Matrix::Constant(3, 2, -0.7);
    for (int t = 1; t <= sched.steps; ++t) {
        const Matrix zero = Matrix::Zero(3, 2);
        identities = identities && reverse_step(x, t, zero, zero, sched) == x / std::sqrt(sched.alpha(t));
        identities = identities && forward_sample(x, t, zero, sched) == std::sqrt(sched.alpha_bar(t)) * x;
    }

    const auto drop = test::denoising_loss_drop(0, kDenoiseUpdates);
    double grad = 0.0;
    for (std::uint64_t seed = 0; seed < kGradSeeds; ++seed) {
        grad = std::max(grad, test::mlp_grad_check(seed));
        grad = std::max(grad, test::critic_action_grad_check(seed));
        grad = std::max(grad, test::chain_grad_check(seed));
    }
    const double secs = seconds_since(t0);
    d << "variance z=" << fmt("%.2f", z) << ", identities " << (identities ? "exact" : "BROKEN") << ", loss "
      << fmt("%.3f", drop.initial) << "->" << fmt("%.4f", drop.final) << " (" << fmt("%.1fx", drop.ratio())
      << "), grad rel " << fmt("%.1e", grad) << " time=" << fmt("%.1fs", secs);
    return {z < kVarianceMaxZ && identities && drop.ratio() >= kDenoiseMinDrop && grad < kGradMaxRel &&
                secs < kDiffusionBudgetS,
            d.str()};
}

Verdict learning()
{
    const auto t0 = Clock::now();
    auto scenario = std::make_shared<const Scenario>(tiny_scenario());
    const auto setup = oracle_setup(*scenario, 1);
    const double oracle_u = solve_oracle(1, *scenario, setup.state, setup.links).report.total;
    const auto route = id_order_route(*scenario);
    int reached = 0;
    std::vector<double> gdm_final, plain_final;
    std::ostringstream per_seed;
    for (int seed = 0; seed < kLearnSeeds; ++seed) {
        Trainer gdm(scenario, route, learning_config(static_cast<std::uint64_t>(seed)), ActorKind::Diffusion);
        const auto log = gdm.train(oracle_u);
        double best = -std::numeric_limits<double>::infinity();
        for (const auto& row : log)
            best = std::max(best, row.oracle_ratio);
        reached += best >= kLearnRatio ? 1 : 0;
        gdm_final.push_back(log.back().eval_utility);

        Trainer plain(scenario, route, learning_config(static_cast<std::uint64_t>(seed)), ActorKind::Plain);
        plain_final.push_back(plain.train(oracle_u).back().eval_utility);
        per_seed << " " << fmt("%.2f", best);
    }
    const double secs = seconds_since(t0);
    const double gdm_med = median(gdm_final), plain_med = median(plain_final);
    std::ostringstream d;
    d << reached << "/" << kLearnSeeds << " seeds reach " << kLearnRatio << "x oracle (best ratios" << per_seed.str()
      << "), median final U gdm " << fmt("%.4f", gdm_med) << " vs plain " << fmt("%.4f", plain_med)
      << ", oracle " << fmt("%.4f", oracle_u) << " time=" << fmt("%.0fs", secs);
    return {reached >= kLearnMinSeeds && gdm_med >= plain_med && secs < kLearnBudgetS, d.str()};
}

Verdict bandit()
{
    const auto t0 = Clock::now();
    int ok = 0;
    std::ostringstream shares;
    for (int seed = 0; seed < kBanditSeeds; ++seed) {
        const auto r = train_bandit(static_cast<std::uint64_t>(seed), kBanditUpdates);
        ok += r.optimal_share >= kBanditMinShare ? 1 : 0;
        shares << " " << fmt("%.2f", r.optimal_share);
    }
    const double secs = seconds_since(t0);
    std::ostringstream d;
    d << ok << "/" << kBanditSeeds << " seeds converged (shares" << shares.str() << ") time=" << fmt("%.1fs", secs);
    return {ok >= kBanditMinSeeds && secs < kBanditBudgetS, d.str()};
}

Verdict determinism()
{
    const auto root = fs::temp_directory_path() / "uavdnn_acceptance_determinism";
    fs::remove_all(root);
    const std::string scenario = std::string(UAVDNN_DATA_DIR) + "/../scenarios/demo.json";
    const std::vector<std::string> small{"--config", "batch=16", "--config", "hidden=8x8"};
    auto with = [](std::vector<std::string> a, const std::vector<std::string>& b) {
        a.insert(a.end(), b.begin(), b.end());
        return a;
    };
    const std::vector<std::pair<std::string, std::vector<std::string>>> runs{
        {"plan", {"plan", "--W", "10,20", "--seeds", "3"}},
        {"plan_fixed", {"plan", "--scenario", scenario, "--seeds", "2"}},
        {"oracle", {"oracle"}},
        {"gdm-maddpg", with({"train", "--algo", "gdm-maddpg", "--episodes", "3", "--seeds", "2"}, small)},
        {"maddpg", with({"train", "--algo", "maddpg", "--episodes", "3"}, small)},
        {"maddpg-plan", with({"train", "--algo", "maddpg+plan", "--episodes", "3"}, small)},
        {"evaluate",
         {"evaluate", "--checkpoints", root.string(), "--algos", "gdm-maddpg,maddpg,maddpg+plan,greedy,oracle",
          "--sizes", "10,40", "--episodes", "2"}},
        {"profiles", {"profiles"}},
        {"generate", {"generate", "--W", "10", "--seed", "7"}},
    };
    int ok = 0;
    std::ostringstream d;
    for (const auto& [name, args] : runs) {
        std::ostringstream out, err;
        auto full = args;
        full.push_back("--out");
        full.push_back((root / name).string());
        int code = cli::run(full, out, err);
        if (code == cli::kOk) {
            std::ostringstream rout, rerr;
            code = cli::run({"rerun", "--manifest", (root / name / "manifest.json").string()}, rout, rerr);
            if (rout.str().find("DIFFERS") != std::string::npos)
                code = cli::kMismatch;
        }
        if (code == cli::kOk)
            ++ok;
        else
            d << " " << name << "(exit " << code << ")";
    }
    fs::remove_all(root);
    std::ostringstream summary;
    summary << ok << "/" << runs.size() << " commands rerun byte-identical" << d.str();
    return {ok == static_cast<int>(runs.size()), summary.str()};
}

} // namespace

int main(int argc, char** argv)
{
    const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
        {"path-planning", path_planning}, {"route-gap", route_gap}, {"oracle", oracle_consistency},
        {"physics", physics},             {"diffusion", diffusion}, {"learning", learning},
        {"bandit", bandit},               {"determinism", determinism},
    };
    std::vector<std::string> only(argv + 1, argv + argc);
    int failed = 0;
    for (const auto& [name, check] : criteria) {
        if (!only.empty() && std::find(only.begin(), only.end(), name) == only.end())
            continue;
        Verdict v{false, ""};
        try {
            v = check();
        } catch (const std::exception& e) {
            v = {false, std::string("threw: ") + e.what()};
        }
        std::printf("%s %s: %s\n", v.pass ? "PASS" : "FAIL", name.c_str(), v.detail.c_str());
        std::fflush(stdout);
        failed += v.pass ? 0 : 1;
    }
    return failed == 0 ? 0 : 1;
}
