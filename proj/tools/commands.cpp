#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "uavdnn/assignment.hpp"
#include "uavdnn/csv.hpp"
#include "uavdnn/env.hpp"
#include "uavdnn/error.hpp"
#include "uavdnn/layer_shapes.hpp"
#include "uavdnn/marl.hpp"
#include "uavdnn/pathplan.hpp"
#include "uavdnn/scenario.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace uavdnn::cli {

std::uint64_t fnv1a64(std::string_view bytes)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

namespace {

struct Options {
    std::string scenario;
    std::uint64_t seed = 0;
    int seeds = 1;
    std::string out;
    std::string algo = "gdm-maddpg";
    std::vector<std::string> algos{"gdm-maddpg", "maddpg", "maddpg+plan"};
    int episodes = -1;
    int k = 5;
    int restarts = 20;
    std::vector<std::string> config;
    std::vector<int> widths{10, 20, 30, 40, 50};
    int uavs = 9;
    int target = -1;
    std::string checkpoints;
    std::vector<double> sizes{10, 20, 40, 60, 80};
    int eval_episodes = 20;
    std::string manifest;
};

std::string read_text(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    if (!in)
        throw IoError("cannot open " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path output_dir(const Options& o, const std::string& command)
{
    fs::path dir;
    if (!o.out.empty())
        dir = o.out;
    else if (const char* root = std::getenv("UAVDNN_OUT_ROOT"); root != nullptr && *root != '\0')
        dir = fs::path(root) / command;
    else
        dir = fs::path("out") / command;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
    return dir;
}

std::string algo_tag(const std::string& algo)
{
    if (algo == "gdm-maddpg")
        return "gdm-maddpg";
    if (algo == "maddpg")
        return "maddpg";
    if (algo == "maddpg+plan")
        return "maddpg-plan";
    throw ValidationError("--algo: expected gdm-maddpg, maddpg or maddpg+plan, got " + algo);
}

ActorKind algo_kind(const std::string& algo)
{
    return algo == "gdm-maddpg" ? ActorKind::Diffusion : ActorKind::Plain;
}

bool algo_uses_plan(const std::string& algo)
{
    return algo != "maddpg";
}

// Paths become absolute and --out is dropped so a rerun can redirect output.
std::vector<std::string> portable_args(const std::vector<std::string>& args)
{
    static const std::vector<std::string> path_flags{"--scenario", "--checkpoints"};
    std::vector<std::string> out;
    for (std::size_t i = 0; i < args.size(); ++i) {
        const auto& a = args[i];
        if (a == "--out") {
            ++i;
            continue;
        }
        if (a.rfind("--out=", 0) == 0)
            continue;
        bool handled = false;
        for (const auto& f : path_flags) {
            if (a == f && i + 1 < args.size()) {
                out.push_back(a);
                out.push_back(fs::absolute(args[++i]).lexically_normal().string());
                handled = true;
            } else if (a.rfind(f + "=", 0) == 0) {
                out.push_back(f + "=" + fs::absolute(a.substr(f.size() + 1)).lexically_normal().string());
                handled = true;
            }
            if (handled)
                break;
        }
        if (!handled)
            out.push_back(a);
    }
    return out;
}

class RunRecord {
public:
    RunRecord(fs::path dir, const std::string& command, const std::vector<std::string>& args, const Options& o,
              const std::string& scenario_desc, const std::string& scenario_hash, std::vector<std::uint64_t> seeds)
        : dir_(std::move(dir))
    {
        json m;
        m["command"] = command;
        m["argv"] = portable_args(args);
        m["scenario"] = scenario_desc;
        m["scenario_hash"] = scenario_hash;
        m["seeds"] = seeds;
        m["config_overrides"] = o.config;
        m["output_dir"] = fs::absolute(dir_).lexically_normal().string();
        m["tool_version"] = kToolVersion;
        const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
        char stamp[32];
        std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
        m["wall_clock"] = stamp;
        manifest_text_ = m.dump(2) + "\n";
        csv::write_atomic(dir_ / "manifest.json", manifest_text_);
    }

    void write(const std::string& name, const std::string& content)
    {
        csv::write_atomic(dir_ / name, content);
        files_[name] = hex64(fnv1a64(content));
    }

    void finish()
    {
        json r;
        r["manifest_hash"] = hex64(fnv1a64(manifest_text_));
        r["files"] = files_;
        csv::write_atomic(dir_ / "results.json", r.dump(2) + "\n");
    }

    const fs::path& dir() const { return dir_; }

private:
    fs::path dir_;
    std::string manifest_text_;
    std::map<std::string, std::string> files_;
};

struct LoadedScenario {
    std::shared_ptr<const Scenario> scenario;
    std::string desc;
    std::string hash;
};

LoadedScenario load_or_tiny(const Options& o)
{
    LoadedScenario l;
    if (o.scenario.empty() || o.scenario == "tiny") {
        l.scenario = std::make_shared<const Scenario>(tiny_scenario());
        l.desc = "builtin:tiny";
    } else {
        l.scenario = std::make_shared<const Scenario>(load_scenario(o.scenario));
        l.desc = fs::absolute(o.scenario).lexically_normal().string();
    }
    l.hash = hex64(fnv1a64(save_scenario(*l.scenario)));
    return l;
}

double median(std::vector<double> v)
{
    if (v.empty())
        return 0.0;
    std::sort(v.begin(), v.end());
    const auto n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

TrainConfig train_config(const Options& o, std::uint64_t seed)
{
    TrainConfig cfg;
    for (const auto& kv : o.config) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw ValidationError("--config expects KEY=VALUE, got " + kv);
        apply_override(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (o.episodes >= 0)
        cfg.episodes = o.episodes;
    cfg.seed = seed;
    check_config(cfg);
    return cfg;
}

Route route_for(const std::string& algo, const Scenario& s, const Options& o, std::uint64_t seed)
{
    if (!algo_uses_plan(algo))
        return id_order_route(s);
    return plan_route(s, o.k, o.restarts, seed);
}

// ---------------------------------------------------------------------------

int cmd_plan(const Options& o, const std::vector<std::string>& args, std::ostream& out)
{
    const auto dir = output_dir(o, "plan");
    std::vector<std::uint64_t> seeds;
    for (int i = 0; i < o.seeds; ++i)
        seeds.push_back(o.seed + static_cast<std::uint64_t>(i));
    LoadedScenario fixed;
    if (!o.scenario.empty())
        fixed = load_or_tiny(o);
    RunRecord rec(dir, "plan", args, o, fixed.scenario ? fixed.desc : "generated", fixed.hash, seeds);

    std::string cmp = "W,seed,greedy_fitness,randomized_fitness,improvement,greedy_violations,randomized_violations\n";
    std::string summary = "W,instances,median_greedy_fitness,median_randomized_fitness,median_improvement\n";
    auto run_width = [&](int W) {
        std::vector<double> g_fit;
        std::vector<double> r_fit;
        std::vector<double> imp;
        for (auto seed : seeds) {
            Scenario s;
            std::uint64_t plan_seed = seed;
            if (fixed.scenario) {
                s = *fixed.scenario;
            } else {
                const auto instance_seed = split_seed(seed, static_cast<std::uint64_t>(W));
                s = generate_random_scenario(W, o.uavs, instance_seed);
                plan_seed = split_seed(instance_seed, 7);
            }
            const auto greedy = plan_route_pure_greedy(s);
            const auto rnd = plan_route(s, o.k, o.restarts, plan_seed);
            const double improvement = (greedy.total_fitness - rnd.total_fitness) / greedy.total_fitness;
            cmp += (csv::Row() << static_cast<int>(s.targets.size()) << static_cast<unsigned long>(seed)
                               << greedy.total_fitness << rnd.total_fitness << improvement << greedy.violations
                               << rnd.violations)
                       .str();
            g_fit.push_back(greedy.total_fitness);
            r_fit.push_back(rnd.total_fitness);
            imp.push_back(improvement);
            if (seed == seeds.front()) {
                const std::string suffix = fixed.scenario ? "" : "_W" + std::to_string(W);
                rec.write("route" + suffix + ".csv", route_csv(rnd));
                rec.write("route_greedy" + suffix + ".csv", route_csv(greedy));
            }
        }
        const int width = fixed.scenario ? static_cast<int>(fixed.scenario->targets.size()) : W;
        summary += (csv::Row() << width << static_cast<int>(seeds.size()) << median(g_fit) << median(r_fit)
                               << median(imp))
                       .str();
        out << "W=" << width << " median improvement " << median(imp) << "\n";
    };
    if (fixed.scenario)
        run_width(static_cast<int>(fixed.scenario->targets.size()));
    else
        for (int W : o.widths)
            run_width(W);
    rec.write("plan_comparison.csv", cmp);
    rec.write("plan_summary.csv", summary);
    rec.finish();
    return kOk;
}

std::string join_ids(const std::vector<int>& v)
{
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i)
        s += (i ? "|" : "") + std::to_string(v[i]);
    return s;
}

int cmd_oracle(const Options& o, const std::vector<std::string>& args, std::ostream& out)
{
    const auto dir = output_dir(o, "oracle");
    const auto loaded = load_or_tiny(o);
    const auto& s = *loaded.scenario;
    RunRecord rec(dir, "oracle", args, o, loaded.desc, loaded.hash, {o.seed});
    const int target = o.target >= 0 ? o.target : plan_route(s, o.k, o.restarts, o.seed).order.front();
    Rng shadow(split_seed(o.seed, 1000));
    const auto setup = oracle_setup(s, target, &shadow);
    const auto result = solve_oracle(setup.task_id, s, setup.state, setup.links);
    const auto followers = [&] {
        std::vector<int> ids;
        for (auto i : follower_indices(s))
            ids.push_back(s.fleet[i].id);
        return ids;
    }();
    const auto& r = result.report;
    std::string oracle = "task_id,executors,splits,mode,u1,u2,u3,U,aoi_s,feasible\n";
    oracle += (csv::Row() << result.decision.task_id << join_ids(result.decision.executors)
                          << join_ids(result.decision.split_points)
                          << to_string(classify_mode(result.decision, followers)) << r.u1 << r.u2 << r.u3 << r.total
                          << r.aoi << (r.feasible ? "true" : "false"))
                  .str();
    const auto& task = setup.state.tasks.front();
    std::string enumeration = "task_id,target_id,num_layers,num_followers,decisions,feasible_decisions,flagged\n";
    enumeration += (csv::Row() << setup.task_id << target << task.num_layers()
                               << static_cast<int>(followers.size()) << static_cast<unsigned long>(result.enumerated)
                               << static_cast<unsigned long>(result.feasible_count)
                               << (result.flagged ? "true" : "false"))
                       .str();
    rec.write("oracle.csv", oracle);
    rec.write("oracle_enumeration.csv", enumeration);
    rec.finish();
    out << "oracle: U=" << r.total << " over " << result.enumerated << " decisions"
        << (result.flagged ? " (no feasible decision; least-violating shown)" : "") << "\n";
    return kOk;
}

std::optional<double> single_task_oracle(const Scenario& s, const Route& route)
{
    if (s.targets.size() != 1)
        return std::nullopt;
    const auto setup = oracle_setup(s, route.order.front());
    const auto& task = setup.state.tasks.front();
    if (enumeration_count(task.num_layers(), static_cast<int>(follower_indices(s).size()), s.env.leader_executes) >
        kOracleGuard)
        return std::nullopt;
    return solve_oracle(setup.task_id, s, setup.state, setup.links).report.total;
}

int cmd_train(const Options& o, const std::vector<std::string>& args, std::ostream& out)
{
    const auto tag = algo_tag(o.algo);
    Options local = o;
    if (local.out.empty()) {
        const char* root = std::getenv("UAVDNN_OUT_ROOT");
        local.out = ((root && *root) ? fs::path(root) : fs::path("out")) / "train" / tag;
    }
    const auto dir = output_dir(local, "train");
    const auto loaded = load_or_tiny(o);
    std::vector<std::uint64_t> seeds;
    for (int i = 0; i < o.seeds; ++i)
        seeds.push_back(o.seed + static_cast<std::uint64_t>(i));
    RunRecord rec(dir, "train", args, o, loaded.desc, loaded.hash, seeds);
    for (auto seed : seeds) {
        const auto cfg = train_config(o, seed);
        const auto route = route_for(o.algo, *loaded.scenario, o, seed);
        const auto oracle = single_task_oracle(*loaded.scenario, route);
        Trainer trainer(loaded.scenario, route, cfg, algo_kind(o.algo));
        const auto log = trainer.train(oracle);
        rec.write("train_log_seed" + std::to_string(seed) + ".csv", train_log_csv(log));
        const auto ckpt = "checkpoint_seed" + std::to_string(seed) + ".ckpt";
        trainer.save(dir / ckpt);
        rec.write(ckpt, read_text(dir / ckpt));
        out << o.algo << " seed " << seed << ": " << log.size() << " episodes";
        if (!log.empty())
            out << ", final eval utility " << log.back().eval_utility;
        out << "\n";
    }
    rec.finish();
    return kOk;
}

int cmd_evaluate(const Options& o, const std::vector<std::string>& args, std::ostream& out)
{
    const auto dir = output_dir(o, "evaluate");
    const auto loaded = load_or_tiny(o);
    fs::path ckpt_root = o.checkpoints;
    if (ckpt_root.empty()) {
        const char* root = std::getenv("UAVDNN_OUT_ROOT");
        ckpt_root = ((root && *root) ? fs::path(root) : fs::path("out")) / "train";
    }
    // Fail early on any missing checkpoint before writing results.
    std::map<std::string, fs::path> ckpts;
    for (const auto& a : o.algos) {
        if (a == "greedy" || a == "oracle")
            continue;
        const auto p = ckpt_root / algo_tag(a) / ("checkpoint_seed" + std::to_string(o.seed) + ".ckpt");
        if (!fs::exists(p))
            throw IoError("missing checkpoint " + p.string());
        ckpts[a] = p;
    }
    RunRecord rec(dir, "evaluate", args, o, loaded.desc, loaded.hash, {o.seed});
    std::string metrics = "method,task_size_gb,aoi_s,completion_rate,utility,episodes\n";
    for (const auto& method : o.algos) {
        for (double size : o.sizes) {
            auto sized = std::make_shared<Scenario>(*loaded.scenario);
            for (auto& t : sized->targets)
                t.task_size_gb = size;
            std::shared_ptr<const Scenario> sc = sized;
            const bool learned = ckpts.count(method) > 0;
            const auto route = learned ? route_for(method, *sc, o, o.seed) : plan_route(*sc, o.k, o.restarts, o.seed);
            if (method == "oracle") {
                bool small = true;
                for (const auto& m : sc->models)
                    small = small && enumeration_count(static_cast<int>(m.num_layers()),
                                                       static_cast<int>(follower_indices(*sc).size()),
                                                       sc->env.leader_executes) <= kOracleGuard;
                if (!small) {
                    out << "oracle skipped: decision space exceeds the guard\n";
                    break;
                }
            }
            std::unique_ptr<Trainer> trainer;
            if (learned) {
                auto cfg = checkpoint_config(ckpts[method]);
                cfg.seed = o.seed;
                cfg.episodes = 0;
                trainer = std::make_unique<Trainer>(sc, route, cfg, algo_kind(method));
                trainer->load(ckpts[method]);
            }
            SwarmEnv env(sc, route);
            double aoi = 0.0;
            double eta = 0.0;
            double utility = 0.0;
            for (int e = 0; e < o.eval_episodes; ++e) {
                const auto ep_seed = split_seed(o.seed, 700000 + static_cast<std::uint64_t>(e));
                EpisodeSummary sum;
                if (trainer)
                    sum = trainer->evaluate(env, ep_seed);
                else if (method == "greedy")
                    sum = run_planned_episode(env, ep_seed, greedy_planner());
                else if (method == "oracle")
                    sum = run_planned_episode(env, ep_seed, oracle_planner());
                else
                    throw ValidationError("--algos: unknown method " + method);
                aoi += sum.mean_aoi;
                eta += sum.completion_rate;
                utility += sum.utility;
            }
            const double n = o.eval_episodes;
            metrics += (csv::Row() << method << size << aoi / n << eta / n << utility / n << o.eval_episodes).str();
        }
        out << "evaluated " << method << "\n";
    }
    rec.write("metrics.csv", metrics);
    rec.finish();
    return kOk;
}

int cmd_profiles(const Options& o, const std::vector<std::string>& args, std::ostream& out)
{
    const auto dir = output_dir(o, "profiles");
    RunRecord rec(dir, "profiles", args, o, "builtin", "", {});
    const std::vector<std::pair<std::string, DnnModelProfile>> files{{"yolov5.csv", yolov5_like_profile()},
                                                                     {"alexnet.csv", alexnet_profile()},
                                                                     {"vgg16.csv", vgg16_profile()},
                                                                     {"demo6.csv", demo6_profile()}};
    for (const auto& [name, profile] : files) {
        rec.write(name, layer_profiles_csv(profile));
        out << name << ": " << profile.num_layers() << " layers\n";
    }
    rec.finish();
    return kOk;
}

int cmd_generate(const Options& o, const std::vector<std::string>& args, std::ostream& out)
{
    const auto dir = output_dir(o, "generate");
    RunRecord rec(dir, "generate", args, o, "generated", "", {o.seed});
    if (o.widths.size() != 1)
        throw ValidationError("generate: pass exactly one --W value");
    const auto s = generate_random_scenario(o.widths.front(), o.uavs, o.seed);
    rec.write("scenario.json", save_scenario(s));
    rec.finish();
    out << "wrote " << (dir / "scenario.json").string() << "\n";
    return kOk;
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int cmd_rerun(const Options& o, std::ostream& out, std::ostream& err)
{
    if (o.manifest.empty())
        throw ValidationError("rerun: --manifest is required");
    const fs::path manifest_path = o.manifest;
    const auto manifest = json::parse(read_text(manifest_path));
    const fs::path original = manifest_path.parent_path();
    const fs::path target = o.out.empty() ? original / "rerun" : fs::path(o.out);
    std::vector<std::string> args{manifest.at("command").get<std::string>()};
    for (const auto& a : manifest.at("argv"))
        args.push_back(a.get<std::string>());
    args.push_back("--out");
    args.push_back(target.string());
    const int code = dispatch(args, out, err);
    if (code != kOk)
        return code;
    const auto results = json::parse(read_text(original / "results.json"));
    bool same = true;
    for (const auto& [name, hash] : results.at("files").items()) {
        if (name.size() < 4 || name.substr(name.size() - 4) != ".csv")
            continue;
        const bool equal = read_text(original / name) == read_text(target / name);
        out << (equal ? "identical " : "DIFFERS ") << name << "\n";
        same = same && equal;
    }
    return same ? kOk : kMismatch;
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"UAV swarm DNN task assignment simulator", "uavsim"};
    app.require_subcommand(1);
    Options o;
    std::map<std::string, Options> per;

    auto add_common = [](CLI::App* sub, Options& opt) {
        sub->add_option("--out", opt.out, "output directory");
        sub->add_option("--seed", opt.seed, "base seed");
        sub->add_option("--config", opt.config, "KEY=VALUE override (repeatable)");
    };
    auto* plan = app.add_subcommand("plan", "compare randomized-greedy and pure-greedy routes");
    per["plan"].seeds = 30;
    add_common(plan, per["plan"]);
    plan->add_option("--scenario", per["plan"].scenario, "scenario file (default: generated instances)");
    plan->add_option("--seeds", per["plan"].seeds, "instances per W");
    plan->add_option("--W", per["plan"].widths, "target counts")->delimiter(',');
    plan->add_option("--uavs", per["plan"].uavs, "UAVs per generated instance");
    plan->add_option("--k", per["plan"].k, "random candidate count");
    plan->add_option("--restarts", per["plan"].restarts, "randomized constructions per instance");

    auto* oracle = app.add_subcommand("oracle", "exhaustive assignment oracle for one task");
    add_common(oracle, per["oracle"]);
    oracle->add_option("--scenario", per["oracle"].scenario, "scenario file (default: tiny)");
    oracle->add_option("--target", per["oracle"].target, "target id (default: first planned)");
    oracle->add_option("--k", per["oracle"].k);
    oracle->add_option("--restarts", per["oracle"].restarts);

    auto* train = app.add_subcommand("train", "train learned assignment policies");
    add_common(train, per["train"]);
    train->add_option("--scenario", per["train"].scenario, "scenario file (default: tiny)");
    train->add_option("--algo", per["train"].algo, "gdm-maddpg | maddpg | maddpg+plan");
    train->add_option("--episodes", per["train"].episodes);
    train->add_option("--seeds", per["train"].seeds, "number of consecutive seeds");
    train->add_option("--k", per["train"].k);
    train->add_option("--restarts", per["train"].restarts);

    auto* evaluate = app.add_subcommand("evaluate", "sweep task size over trained policies and baselines");
    add_common(evaluate, per["evaluate"]);
    evaluate->add_option("--scenario", per["evaluate"].scenario, "scenario file (default: tiny)");
    evaluate->add_option("--checkpoints", per["evaluate"].checkpoints, "train output root");
    evaluate->add_option("--algos", per["evaluate"].algos, "methods: learned algos, greedy, oracle")->delimiter(',');
    evaluate->add_option("--sizes", per["evaluate"].sizes, "task sizes in GB")->delimiter(',');
    evaluate->add_option("--episodes", per["evaluate"].eval_episodes, "evaluation episodes per point");
    evaluate->add_option("--k", per["evaluate"].k);
    evaluate->add_option("--restarts", per["evaluate"].restarts);

    auto* profiles = app.add_subcommand("profiles", "write the built-in layer profiles as CSV");
    add_common(profiles, per["profiles"]);

    auto* generate = app.add_subcommand("generate", "write a random scenario file");
    per["generate"].widths = {10};
    add_common(generate, per["generate"]);
    generate->add_option("--W", per["generate"].widths, "target count");
    generate->add_option("--uavs", per["generate"].uavs);

    auto* rerun = app.add_subcommand("rerun", "re-execute a run from its manifest and compare CSVs");
    rerun->add_option("--manifest", per["rerun"].manifest)->required();
    rerun->add_option("--out", per["rerun"].out);

    std::vector<std::string> full{"uavsim"};
    full.insert(full.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& a : full)
        argv.push_back(a.data());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }
    const std::vector<std::string> sub_args(args.begin() + 1, args.end());
    if (plan->parsed())
        return cmd_plan(per["plan"], sub_args, out);
    if (oracle->parsed())
        return cmd_oracle(per["oracle"], sub_args, out);
    if (train->parsed())
        return cmd_train(per["train"], sub_args, out);
    if (evaluate->parsed())
        return cmd_evaluate(per["evaluate"], sub_args, out);
    if (profiles->parsed())
        return cmd_profiles(per["profiles"], sub_args, out);
    if (generate->parsed())
        return cmd_generate(per["generate"], sub_args, out);
    if (rerun->parsed())
        return cmd_rerun(per["rerun"], out, err);
    return kUsage;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    try {
        return dispatch(args, out, err);
    } catch (const ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kValidation;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return kValidation;
    } catch (const GuardError& e) {
        err << "error: " << e.what() << "\n";
        return kGuard;
    } catch (const IoError& e) {
        err << "error: " << e.what() << "\n";
        return kIo;
    } catch (const json::exception& e) {
        err << "error: " << e.what() << "\n";
        return kValidation;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kInternal;
    }
}

} // namespace uavdnn::cli
