#include "uavdnn/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "uavdnn/error.hpp"
#include "uavdnn/layer_shapes.hpp"
#include "uavdnn/rng.hpp"

namespace uavdnn {

using nlohmann::json;

double distance(const Position3& a, const Position3& b)
{
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    const double dz = a.z - b.z;
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

double DnnModelProfile::total_compute() const
{
    double sum = 0.0;
    for (const auto& l : layers)
        sum += l.compute_cycles;
    return sum;
}

double DnnModelProfile::total_memory() const
{
    double sum = 0.0;
    for (const auto& l : layers)
        sum += l.memory_bytes;
    return sum;
}

const UavSpec& Scenario::leader() const
{
    return fleet.at(leader_index());
}

std::size_t Scenario::leader_index() const
{
    for (std::size_t i = 0; i < fleet.size(); ++i)
        if (fleet[i].role == Role::Leader)
            return i;
    throw ValidationError("fleet: exactly one leader required");
}

const DnnModelProfile& Scenario::model(int kind) const
{
    for (const auto& m : models)
        if (m.kind == kind)
            return m;
    throw ValidationError("models: dnn_type " + std::to_string(kind) + " not resolvable");
}

const TargetArea& Scenario::target(int id) const
{
    return targets.at(target_index(id));
}

std::size_t Scenario::target_index(int id) const
{
    for (std::size_t i = 0; i < targets.size(); ++i)
        if (targets[i].id == id)
            return i;
    throw ValidationError("targets: unknown target id " + std::to_string(id));
}

std::vector<std::size_t> follower_indices(const Scenario& s)
{
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < s.fleet.size(); ++i)
        if (s.fleet[i].role == Role::Follower)
            out.push_back(i);
    return out;
}

// ---------------------------------------------------------------------------
// validation

namespace {

void require(bool ok, const std::string& what)
{
    if (!ok)
        throw ValidationError(what);
}

bool finite(const Position3& p)
{
    return std::isfinite(p.x) && std::isfinite(p.y) && std::isfinite(p.z);
}

void validate_model(const DnnModelProfile& m)
{
    const std::string where = "models[kind=" + std::to_string(m.kind) + "]";
    require(!m.layers.empty(), where + ".layers: non-empty");
    for (std::size_t i = 0; i < m.layers.size(); ++i) {
        const auto& l = m.layers[i];
        const std::string lw = where + ".layers[" + std::to_string(i) + "]";
        require(l.layer_index == static_cast<int>(i) + 1, lw + ".layer_index: contiguous from 1");
        require(std::isfinite(l.compute_cycles) && l.compute_cycles > 0, lw + ".compute_cycles: must be > 0");
        require(std::isfinite(l.memory_bytes) && l.memory_bytes > 0, lw + ".memory_bytes: must be > 0");
        require(std::isfinite(l.output_bits) && l.output_bits >= 0, lw + ".output_bits: must be >= 0");
    }
}

} // namespace

void validate(const Scenario& s)
{
    require(!s.targets.empty(), "targets: targets non-empty");
    require(finite(s.base) && s.base.z >= 0, "base: finite with z >= 0");
    std::set<int> ids;
    for (const auto& m : s.models)
        validate_model(m);
    std::set<int> kinds;
    for (const auto& m : s.models)
        require(kinds.insert(m.kind).second, "models: duplicate kind " + std::to_string(m.kind));
    for (const auto& t : s.targets) {
        const std::string where = "targets[id=" + std::to_string(t.id) + "]";
        require(ids.insert(t.id).second, where + ".id: unique within scenario");
        require(finite(t.center) && t.center.z >= 0, where + ".center: finite with z >= 0");
        require(std::isfinite(t.task_size_gb) && t.task_size_gb >= 0, where + ".task_size_gb: must be >= 0");
        require(kinds.count(t.dnn_type) == 1, where + ".dnn_type: resolvable in models");
        require(std::isfinite(t.max_latency_s) && t.max_latency_s > 0, where + ".max_latency_s: must be > 0");
    }
    require(s.fleet.size() >= 2, "fleet: at least two UAVs");
    int leaders = 0;
    std::set<int> uav_ids;
    for (const auto& u : s.fleet) {
        const std::string where = "fleet[id=" + std::to_string(u.id) + "]";
        require(uav_ids.insert(u.id).second, where + ".id: unique within fleet");
        leaders += u.role == Role::Leader ? 1 : 0;
        require(finite(u.position) && u.position.z >= 0, where + ".position: finite with z >= 0");
        require(u.compute_rate_hz > 0, where + ".compute_rate_hz: must be > 0");
        require(u.memory_cap_bytes > 0, where + ".memory_cap_bytes: must be > 0");
        require(u.energy_cap_j > 0, where + ".energy_cap_j: must be > 0");
        require(u.tx_power_w > 0, where + ".tx_power_w: must be > 0");
        require(u.bandwidth_hz > 0, where + ".bandwidth_hz: must be > 0");
    }
    require(leaders == 1, "fleet: exactly one leader");
    require(s.radio.frequency_hz > 0, "radio.frequency_hz: must be > 0");
    require(s.radio.noise_w > 0, "radio.noise_w: must be > 0");
    require(s.radio.temperature_k > 0, "radio.temperature_k: must be > 0");
    require(s.radio.shadow_sigma_db >= 0, "radio.shadow_sigma_db: must be >= 0");
    require(s.radio.interference_w >= 0, "radio.interference_w: must be >= 0");
    const auto& f = s.flight;
    require(f.speed_mps > 0, "flight.speed_mps: must be > 0");
    require(f.p_blade_w > 0 && f.p_induced_w > 0 && f.tip_speed_mps > 0 && f.hover_induced_speed_mps > 0 &&
                f.drag_ratio > 0 && f.air_density > 0 && f.rotor_solidity > 0 && f.disk_area_m2 > 0,
            "flight: physical constants must be > 0");
    const auto& w = s.weights;
    require(std::abs(w.vartheta_dist + w.rho_task - 1.0) <= 1e-9,
            "weights.vartheta_dist + weights.rho_task: must equal 1");
    require(w.vartheta_dist >= 0 && w.rho_task >= 0, "weights.vartheta_dist, rho_task: must be >= 0");
    require(w.vartheta_reward >= 0 && w.vartheta_reward <= 1, "weights.vartheta_reward: must lie in [0,1]");
    require(w.k0 >= 0, "weights.k0: must be >= 0");
    require(s.env.block_max >= 1, "env.block_max: must be >= 1");
    require(s.env.rounds_per_leg >= 1, "env.rounds_per_leg: must be >= 1");
    require(s.env.idle_slot_s > 0, "env.idle_slot_s: must be > 0");
    require(s.env.reference_task_gb > 0, "env.reference_task_gb: must be > 0");
    require(s.planning.processing_rate_gb_per_min > 0, "planning.processing_rate_gb_per_min: must be > 0");
    require(s.arena.size_m > 0 && s.arena.altitude_m >= 0, "arena: size_m > 0 and altitude_m >= 0");
}

// ---------------------------------------------------------------------------
// text format

namespace {

// Reads keys from a JSON object and rejects anything left unread.
class StrictObject {
public:
    StrictObject(const json& j, std::string where) : j_(j), where_(std::move(where))
    {
        if (!j_.is_object())
            throw ParseError(where_ + ": expected an object");
    }

    bool has(const std::string& key) const { return j_.contains(key); }

    const json& at(const std::string& key)
    {
        if (!j_.contains(key))
            throw ParseError(where_ + "." + key + ": missing");
        seen_.insert(key);
        return j_.at(key);
    }

    double number(const std::string& key)
    {
        const auto& v = at(key);
        if (!v.is_number())
            throw ParseError(where_ + "." + key + ": expected a number");
        return v.get<double>();
    }

    double number(const std::string& key, double fallback) { return has(key) ? number(key) : fallback; }

    int integer(const std::string& key)
    {
        const auto& v = at(key);
        if (!v.is_number_integer())
            throw ParseError(where_ + "." + key + ": expected an integer");
        return v.get<int>();
    }

    int integer(const std::string& key, int fallback) { return has(key) ? integer(key) : fallback; }

    bool boolean(const std::string& key, bool fallback)
    {
        if (!has(key))
            return fallback;
        const auto& v = at(key);
        if (!v.is_boolean())
            throw ParseError(where_ + "." + key + ": expected true/false");
        return v.get<bool>();
    }

    std::string string(const std::string& key)
    {
        const auto& v = at(key);
        if (!v.is_string())
            throw ParseError(where_ + "." + key + ": expected a string");
        return v.get<std::string>();
    }

    const std::string& where() const { return where_; }

    void finish() const
    {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!seen_.count(it.key()))
                throw ParseError(where_ + "." + it.key() + ": unknown key");
    }

private:
    const json& j_;
    std::string where_;
    std::set<std::string> seen_;
};

Position3 read_position(const json& j, const std::string& where)
{
    StrictObject o(j, where);
    Position3 p{o.number("x"), o.number("y"), o.number("z")};
    o.finish();
    return p;
}

json write_position(const Position3& p)
{
    return json{{"x", p.x}, {"y", p.y}, {"z", p.z}};
}

std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

DnnModelProfile read_model(const json& j, const std::string& where, const std::filesystem::path& base_dir)
{
    StrictObject o(j, where);
    DnnModelProfile m;
    m.kind = o.integer("kind");
    m.name = o.has("name") ? o.string("name") : std::string{};
    if (o.has("profile_csv") == o.has("layers"))
        throw ParseError(where + ": exactly one of layers / profile_csv required");
    if (o.has("profile_csv")) {
        auto path = std::filesystem::path(o.string("profile_csv"));
        if (path.is_relative())
            path = base_dir / path;
        auto loaded = load_layer_profiles(path, m.kind);
        m.layers = std::move(loaded.layers);
    } else {
        const auto& arr = o.at("layers");
        if (!arr.is_array())
            throw ParseError(where + ".layers: expected an array");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            StrictObject lo(arr[i], where + ".layers[" + std::to_string(i) + "]");
            LayerProfile l;
            l.layer_index = lo.integer("layer_index");
            l.compute_cycles = lo.number("compute_cycles");
            l.memory_bytes = lo.number("memory_bytes");
            l.output_bits = lo.number("output_bits");
            lo.finish();
            m.layers.push_back(l);
        }
    }
    o.finish();
    return m;
}

Role read_role(const std::string& s, const std::string& where)
{
    if (s == "leader")
        return Role::Leader;
    if (s == "follower")
        return Role::Follower;
    throw ParseError(where + ".role: expected leader or follower");
}

} // namespace

Scenario parse_scenario(const std::string& text, const std::filesystem::path& base_dir)
{
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("scenario: malformed text: ") + e.what());
    }
    Scenario s;
    StrictObject o(root, "scenario");
    if (o.has("seed")) {
        const auto& v = o.at("seed");
        if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
            throw ParseError("scenario.seed: expected a non-negative integer");
        s.seed = v.get<std::uint64_t>();
    }
    s.base = read_position(o.at("base"), "base");

    const auto& targets = o.at("targets");
    if (!targets.is_array())
        throw ParseError("targets: expected an array");
    for (std::size_t i = 0; i < targets.size(); ++i) {
        StrictObject t(targets[i], "targets[" + std::to_string(i) + "]");
        TargetArea a;
        a.id = t.integer("id");
        a.center = read_position(t.at("center"), t.where() + ".center");
        a.task_size_gb = t.number("task_size_gb");
        a.dnn_type = t.integer("dnn_type");
        a.max_latency_s = t.number("max_latency_s");
        t.finish();
        s.targets.push_back(a);
    }

    const auto& fleet = o.at("fleet");
    if (!fleet.is_array())
        throw ParseError("fleet: expected an array");
    for (std::size_t i = 0; i < fleet.size(); ++i) {
        StrictObject u(fleet[i], "fleet[" + std::to_string(i) + "]");
        UavSpec spec;
        spec.id = u.integer("id");
        spec.role = read_role(u.string("role"), u.where());
        spec.position = read_position(u.at("position"), u.where() + ".position");
        spec.compute_rate_hz = u.number("compute_rate_hz");
        spec.memory_cap_bytes = u.number("memory_cap_bytes");
        spec.energy_cap_j = u.number("energy_cap_j");
        spec.tx_power_w = u.number("tx_power_w");
        spec.bandwidth_hz = u.number("bandwidth_hz");
        u.finish();
        s.fleet.push_back(spec);
    }

    const auto& models = o.at("models");
    if (!models.is_array())
        throw ParseError("models: expected an array");
    for (std::size_t i = 0; i < models.size(); ++i)
        s.models.push_back(read_model(models[i], "models[" + std::to_string(i) + "]", base_dir));

    if (o.has("radio")) {
        StrictObject r(o.at("radio"), "radio");
        const RadioConstants d;
        s.radio.frequency_hz = r.number("frequency_hz", d.frequency_hz);
        s.radio.pathloss_exponent = r.number("pathloss_exponent", d.pathloss_exponent);
        s.radio.shadow_sigma_db = r.number("shadow_sigma_db", d.shadow_sigma_db);
        s.radio.interference_w = r.number("interference_w", d.interference_w);
        s.radio.noise_w = r.number("noise_w", d.noise_w);
        s.radio.temperature_k = r.number("temperature_k", d.temperature_k);
        if (r.has("noise_mode")) {
            const auto mode = r.string("noise_mode");
            if (mode == "fixed")
                s.radio.noise_mode = NoiseMode::Fixed;
            else if (mode == "thermal")
                s.radio.noise_mode = NoiseMode::Thermal;
            else
                throw ParseError("radio.noise_mode: expected fixed or thermal");
        }
        r.finish();
    }
    if (o.has("flight")) {
        StrictObject f(o.at("flight"), "flight");
        const FlightConstants d;
        auto& fl = s.flight;
        fl.speed_mps = f.number("speed_mps", d.speed_mps);
        fl.p_blade_w = f.number("p_blade_w", d.p_blade_w);
        fl.p_induced_w = f.number("p_induced_w", d.p_induced_w);
        fl.tip_speed_mps = f.number("tip_speed_mps", d.tip_speed_mps);
        fl.hover_induced_speed_mps = f.number("hover_induced_speed_mps", d.hover_induced_speed_mps);
        fl.drag_ratio = f.number("drag_ratio", d.drag_ratio);
        fl.air_density = f.number("air_density", d.air_density);
        fl.rotor_solidity = f.number("rotor_solidity", d.rotor_solidity);
        fl.disk_area_m2 = f.number("disk_area_m2", d.disk_area_m2);
        f.finish();
    }
    if (o.has("weights")) {
        StrictObject w(o.at("weights"), "weights");
        const Weights d;
        auto& wt = s.weights;
        wt.alpha = w.number("alpha", d.alpha);
        wt.beta = w.number("beta", d.beta);
        wt.gamma = w.number("gamma", d.gamma);
        wt.delta = w.number("delta", d.delta);
        wt.epsilon = w.number("epsilon", d.epsilon);
        wt.theta = w.number("theta", d.theta);
        wt.sigma = w.number("sigma", d.sigma);
        wt.vartheta_reward = w.number("vartheta_reward", d.vartheta_reward);
        wt.vartheta_dist = w.number("vartheta_dist", d.vartheta_dist);
        wt.rho_task = w.number("rho_task", d.rho_task);
        wt.k0 = w.number("k0", d.k0);
        w.finish();
    }
    if (o.has("env")) {
        StrictObject e(o.at("env"), "env");
        const EnvSettings d;
        s.env.block_max = e.integer("block_max", d.block_max);
        s.env.rounds_per_leg = e.integer("rounds_per_leg", d.rounds_per_leg);
        s.env.leader_executes = e.boolean("leader_executes", d.leader_executes);
        s.env.idle_slot_s = e.number("idle_slot_s", d.idle_slot_s);
        s.env.reference_task_gb = e.number("reference_task_gb", d.reference_task_gb);
        s.env.invalid_action_penalty = e.number("invalid_action_penalty", d.invalid_action_penalty);
        e.finish();
    }
    if (o.has("planning")) {
        StrictObject p(o.at("planning"), "planning");
        s.planning.processing_rate_gb_per_min =
            p.number("processing_rate_gb_per_min", PlanningSettings{}.processing_rate_gb_per_min);
        p.finish();
    }
    if (o.has("arena")) {
        StrictObject a(o.at("arena"), "arena");
        s.arena.size_m = a.number("size_m", Arena{}.size_m);
        s.arena.altitude_m = a.number("altitude_m", Arena{}.altitude_m);
        a.finish();
    }
    o.finish();
    validate(s);
    return s;
}

Scenario load_scenario(const std::filesystem::path& path)
{
    return parse_scenario(read_file(path), path.parent_path());
}

std::string save_scenario(const Scenario& s)
{
    json root;
    root["seed"] = s.seed;
    root["base"] = write_position(s.base);
    root["targets"] = json::array();
    for (const auto& t : s.targets)
        root["targets"].push_back({{"id", t.id},
                                   {"center", write_position(t.center)},
                                   {"task_size_gb", t.task_size_gb},
                                   {"dnn_type", t.dnn_type},
                                   {"max_latency_s", t.max_latency_s}});
    root["fleet"] = json::array();
    for (const auto& u : s.fleet)
        root["fleet"].push_back({{"id", u.id},
                                 {"role", u.role == Role::Leader ? "leader" : "follower"},
                                 {"position", write_position(u.position)},
                                 {"compute_rate_hz", u.compute_rate_hz},
                                 {"memory_cap_bytes", u.memory_cap_bytes},
                                 {"energy_cap_j", u.energy_cap_j},
                                 {"tx_power_w", u.tx_power_w},
                                 {"bandwidth_hz", u.bandwidth_hz}});
    root["models"] = json::array();
    for (const auto& m : s.models) {
        json layers = json::array();
        for (const auto& l : m.layers)
            layers.push_back({{"layer_index", l.layer_index},
                              {"compute_cycles", l.compute_cycles},
                              {"memory_bytes", l.memory_bytes},
                              {"output_bits", l.output_bits}});
        root["models"].push_back({{"kind", m.kind}, {"name", m.name}, {"layers", layers}});
    }
    const auto& r = s.radio;
    root["radio"] = {{"frequency_hz", r.frequency_hz},
                     {"pathloss_exponent", r.pathloss_exponent},
                     {"shadow_sigma_db", r.shadow_sigma_db},
                     {"interference_w", r.interference_w},
                     {"noise_w", r.noise_w},
                     {"noise_mode", r.noise_mode == NoiseMode::Fixed ? "fixed" : "thermal"},
                     {"temperature_k", r.temperature_k}};
    const auto& f = s.flight;
    root["flight"] = {{"speed_mps", f.speed_mps},
                      {"p_blade_w", f.p_blade_w},
                      {"p_induced_w", f.p_induced_w},
                      {"tip_speed_mps", f.tip_speed_mps},
                      {"hover_induced_speed_mps", f.hover_induced_speed_mps},
                      {"drag_ratio", f.drag_ratio},
                      {"air_density", f.air_density},
                      {"rotor_solidity", f.rotor_solidity},
                      {"disk_area_m2", f.disk_area_m2}};
    const auto& w = s.weights;
    root["weights"] = {{"alpha", w.alpha},         {"beta", w.beta},
                       {"gamma", w.gamma},         {"delta", w.delta},
                       {"epsilon", w.epsilon},     {"theta", w.theta},
                       {"sigma", w.sigma},         {"vartheta_reward", w.vartheta_reward},
                       {"vartheta_dist", w.vartheta_dist}, {"rho_task", w.rho_task},
                       {"k0", w.k0}};
    const auto& e = s.env;
    root["env"] = {{"block_max", e.block_max},
                   {"rounds_per_leg", e.rounds_per_leg},
                   {"leader_executes", e.leader_executes},
                   {"idle_slot_s", e.idle_slot_s},
                   {"reference_task_gb", e.reference_task_gb},
                   {"invalid_action_penalty", e.invalid_action_penalty}};
    root["planning"] = {{"processing_rate_gb_per_min", s.planning.processing_rate_gb_per_min}};
    root["arena"] = {{"size_m", s.arena.size_m}, {"altitude_m", s.arena.altitude_m}};
    return root.dump(2) + "\n";
}

void save_scenario(const Scenario& s, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot write " + path.string());
    out << save_scenario(s);
    if (!out)
        throw IoError("write failed for " + path.string());
}

// ---------------------------------------------------------------------------
// layer profile CSV

namespace {

std::vector<std::string> split_csv_line(const std::string& line)
{
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ','))
        out.push_back(cell);
    if (!line.empty() && line.back() == ',')
        out.emplace_back();
    for (auto& c : out) {
        while (!c.empty() && (c.back() == '\r' || c.back() == ' '))
            c.pop_back();
        while (!c.empty() && c.front() == ' ')
            c.erase(c.begin());
    }
    return out;
}

double parse_number(const std::string& cell, const std::string& where)
{
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(cell, &used);
    } catch (const std::exception&) {
        throw ParseError(where + ": not a number: '" + cell + "'");
    }
    if (used != cell.size())
        throw ParseError(where + ": not a number: '" + cell + "'");
    return v;
}

} // namespace

DnnModelProfile parse_layer_profiles(const std::string& csv_text, int kind, std::string name)
{
    static const std::vector<std::string> kColumns = {"layer_index", "compute_cycles", "memory_bytes",
                                                      "output_bits"};
    std::istringstream in(csv_text);
    std::string line;
    if (!std::getline(in, line))
        throw ParseError("layer profile: empty file");
    const auto header = split_csv_line(line);
    std::vector<int> col(kColumns.size(), -1);
    for (std::size_t c = 0; c < kColumns.size(); ++c) {
        auto it = std::find(header.begin(), header.end(), kColumns[c]);
        if (it == header.end())
            throw ParseError("layer profile: missing column " + kColumns[c]);
        col[c] = static_cast<int>(it - header.begin());
    }
    DnnModelProfile m{kind, std::move(name), {}};
    int row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty() || line == "\r")
            continue;
        const auto cells = split_csv_line(line);
        const std::string where = "layer profile row " + std::to_string(row);
        if (cells.size() != header.size())
            throw ParseError(where + ": expected " + std::to_string(header.size()) + " cells");
        LayerProfile l;
        const double idx = parse_number(cells[col[0]], where);
        if (idx != std::floor(idx))
            throw ParseError(where + ": layer_index must be an integer");
        l.layer_index = static_cast<int>(idx);
        l.compute_cycles = parse_number(cells[col[1]], where);
        l.memory_bytes = parse_number(cells[col[2]], where);
        l.output_bits = parse_number(cells[col[3]], where);
        if (!(l.compute_cycles > 0))
            throw ValidationError(where + ": compute_cycles must be > 0");
        if (!(l.memory_bytes > 0))
            throw ValidationError(where + ": memory_bytes must be > 0");
        if (!(l.output_bits >= 0))
            throw ValidationError(where + ": output_bits must be >= 0");
        m.layers.push_back(l);
    }
    if (m.layers.empty())
        throw ValidationError("layer profile: no layers");
    std::sort(m.layers.begin(), m.layers.end(),
              [](const LayerProfile& a, const LayerProfile& b) { return a.layer_index < b.layer_index; });
    for (std::size_t i = 0; i < m.layers.size(); ++i)
        if (m.layers[i].layer_index != static_cast<int>(i) + 1)
            throw ValidationError("layer profile: layer_index must be contiguous from 1");
    return m;
}

DnnModelProfile load_layer_profiles(const std::filesystem::path& path, int kind)
{
    return parse_layer_profiles(read_file(path), kind, path.stem().string());
}

std::string layer_profiles_csv(const DnnModelProfile& model)
{
    std::ostringstream out;
    out << "layer_index,compute_cycles,memory_bytes,output_bits\n";
    out.precision(17);
    for (const auto& l : model.layers)
        out << l.layer_index << ',' << l.compute_cycles << ',' << l.memory_bytes << ',' << l.output_bits << '\n';
    return out.str();
}

// ---------------------------------------------------------------------------
// generators

Scenario generate_random_scenario(int num_targets, int num_uavs, std::uint64_t seed, const GeneratorOptions& opts)
{
    if (num_targets < 1)
        throw ValidationError("generate_random_scenario: num_targets must be >= 1");
    if (num_uavs < 2)
        throw ValidationError("generate_random_scenario: num_uavs must be >= 2");
    if (opts.num_models < 1 || opts.num_models > 3)
        throw ValidationError("generate_random_scenario: num_models must be in [1,3]");
    Scenario s;
    s.seed = seed;
    Rng rng(split_seed(seed, 0));
    const double side = s.arena.size_m;
    s.base = {side / 2.0, side / 2.0, 0.0};
    for (int m = 1; m <= opts.num_models; ++m)
        s.models.push_back(builtin_profile(m));
    for (int i = 0; i < num_targets; ++i) {
        TargetArea t;
        t.id = i + 1;
        t.center = {rng.uniform(0.0, side), rng.uniform(0.0, side), 0.0};
        t.task_size_gb = rng.uniform(0.0, opts.task_size_max_gb);
        t.dnn_type = 1 + static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(opts.num_models)));
        t.max_latency_s = rng.uniform(opts.latency_min_s, opts.latency_max_s);
        s.targets.push_back(t);
    }
    for (int n = 0; n < num_uavs; ++n) {
        UavSpec u;
        u.id = n;
        u.role = n == 0 ? Role::Leader : Role::Follower;
        u.position = {rng.uniform(0.0, side), rng.uniform(0.0, side), s.arena.altitude_m};
        u.compute_rate_hz = 15e9;
        u.memory_cap_bytes = rng.uniform(100.0, 500.0) * 1e9;
        u.energy_cap_j = 1e6;
        u.tx_power_w = rng.uniform(0.05, 0.1);
        u.bandwidth_hz = rng.uniform(1e6, 5e6);
        s.fleet.push_back(u);
    }
    s.radio.shadow_sigma_db = opts.shadow_sigma_db;
    validate(s);
    return s;
}

Scenario tiny_scenario()
{
    Scenario s;
    s.seed = 0;
    s.base = {6000.0, 6000.0, 0.0};
    s.models.push_back(demo6_profile());
    s.targets.push_back({1, {6500.0, 6000.0, 0.0}, 10.0, 4, 2.0});
    const double alt = s.arena.altitude_m;
    auto uav = [&](int id, Role role, double x, double y) {
        UavSpec u;
        u.id = id;
        u.role = role;
        u.position = {x, y, alt};
        u.compute_rate_hz = 15e9;
        u.memory_cap_bytes = 8e8;
        u.energy_cap_j = 4e4;
        u.tx_power_w = 0.1;
        u.bandwidth_hz = 1e6;
        return u;
    };
    s.fleet.push_back(uav(0, Role::Leader, 6000.0, 6000.0));
    s.fleet.push_back(uav(1, Role::Follower, 6300.0, 6000.0));
    s.fleet.push_back(uav(2, Role::Follower, 6300.0, 6400.0));
    s.fleet.push_back(uav(3, Role::Follower, 3000.0, 3500.0));
    s.env.leader_executes = false;
    s.radio.shadow_sigma_db = 0.0;
    validate(s);
    return s;
}

} // namespace uavdnn
