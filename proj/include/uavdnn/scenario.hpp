#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace uavdnn {

struct Position3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    friend bool operator==(const Position3&, const Position3&) = default;
};

double distance(const Position3& a, const Position3& b);

struct TargetArea {
    int id = 0;
    Position3 center;
    double task_size_gb = 0.0;
    int dnn_type = 1;
    /// Deadline of the DNN task spawned by this target (seconds).
    double max_latency_s = 1.0;

    friend bool operator==(const TargetArea&, const TargetArea&) = default;
};

struct LayerProfile {
    int layer_index = 1;
    double compute_cycles = 0.0;
    double memory_bytes = 0.0;
    double output_bits = 0.0;

    friend bool operator==(const LayerProfile&, const LayerProfile&) = default;
};

struct DnnModelProfile {
    int kind = 1;
    std::string name;
    std::vector<LayerProfile> layers;

    std::size_t num_layers() const { return layers.size(); }
    double total_compute() const;
    double total_memory() const;

    friend bool operator==(const DnnModelProfile&, const DnnModelProfile&) = default;
};

/// One DNN inference job created when the swarm collects a target's data.
struct TaskSpec {
    int id = 0;
    int model_kind = 1;
    int origin_target = 0;
    double created_at = 0.0;
    double max_latency = 1.0;
    double size_gb = 0.0;
};

enum class Role { Leader, Follower };

struct UavSpec {
    int id = 0;
    Role role = Role::Follower;
    /// Position at mission start; the difference to the leader's position is
    /// the (fixed) formation offset.
    Position3 position;
    double compute_rate_hz = 15e9;
    double memory_cap_bytes = 1e11;
    double energy_cap_j = 1e6;
    double tx_power_w = 0.1;
    double bandwidth_hz = 1e6;

    friend bool operator==(const UavSpec&, const UavSpec&) = default;
};

enum class NoiseMode { Fixed, Thermal };

struct RadioConstants {
    double frequency_hz = 2.4e9;
    double pathloss_exponent = 2.0;
    double shadow_sigma_db = 0.0;
    double interference_w = 0.0;
    /// Used when noise_mode == Fixed. Default is -115 dBm.
    double noise_w = 3.1622776601683795e-15;
    NoiseMode noise_mode = NoiseMode::Fixed;
    double temperature_k = 290.0;

    friend bool operator==(const RadioConstants&, const RadioConstants&) = default;
};

struct FlightConstants {
    double speed_mps = 20.0;
    double p_blade_w = 80.0;
    double p_induced_w = 88.0;
    double tip_speed_mps = 120.0;
    double hover_induced_speed_mps = 4.03;
    double drag_ratio = 0.6;
    double air_density = 1.225;
    double rotor_solidity = 0.05;
    double disk_area_m2 = 0.503;

    friend bool operator==(const FlightConstants&, const FlightConstants&) = default;
};

struct Weights {
    double alpha = 1.0;
    double beta = 1.0;
    double gamma = 1.0;
    double delta = 1.0 / 3.0;
    double epsilon = 1.0 / 3.0;
    double theta = 1.0 / 3.0;
    double sigma = 1.0;
    double vartheta_reward = 0.5;
    double vartheta_dist = 0.5;
    double rho_task = 0.5;
    double k0 = 1e-28;

    friend bool operator==(const Weights&, const Weights&) = default;
};

struct EnvSettings {
    int block_max = 4;
    int rounds_per_leg = 8;
    bool leader_executes = true;
    double idle_slot_s = 0.05;
    /// Task size at which a model's layer profile applies unscaled; compute
    /// and output volume scale linearly with task_size / reference.
    double reference_task_gb = 10.0;
    double invalid_action_penalty = 0.05;

    friend bool operator==(const EnvSettings&, const EnvSettings&) = default;
};

struct PlanningSettings {
    double processing_rate_gb_per_min = 10.0;

    friend bool operator==(const PlanningSettings&, const PlanningSettings&) = default;
};

struct Arena {
    double size_m = 12000.0;
    double altitude_m = 3000.0;

    friend bool operator==(const Arena&, const Arena&) = default;
};

struct Scenario {
    std::vector<TargetArea> targets;
    std::vector<UavSpec> fleet;
    std::vector<DnnModelProfile> models;
    RadioConstants radio;
    FlightConstants flight;
    Weights weights;
    EnvSettings env;
    PlanningSettings planning;
    Arena arena;
    Position3 base;
    std::uint64_t seed = 0;

    const UavSpec& leader() const;
    std::size_t leader_index() const;
    const DnnModelProfile& model(int kind) const;
    const TargetArea& target(int id) const;
    std::size_t target_index(int id) const;

    friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// Throws ValidationError naming the first violated invariant.
void validate(const Scenario& s);

Scenario parse_scenario(const std::string& text,
                        const std::filesystem::path& base_dir = {});
Scenario load_scenario(const std::filesystem::path& path);
/// Canonical text form: sorted keys, two-space indent, shortest round-trip
/// number formatting, layers inlined.
std::string save_scenario(const Scenario& s);
void save_scenario(const Scenario& s, const std::filesystem::path& path);

DnnModelProfile parse_layer_profiles(const std::string& csv_text, int kind = 1,
                                     std::string name = {});
DnnModelProfile load_layer_profiles(const std::filesystem::path& path, int kind = 1);
std::string layer_profiles_csv(const DnnModelProfile& model);

struct GeneratorOptions {
    /// Model kinds drawn uniformly from the built-in profiles 1..num_models.
    int num_models = 3;
    double task_size_max_gb = 80.0;
    double latency_min_s = 1.0;
    double latency_max_s = 20.0;
    double shadow_sigma_db = 4.0;
};

Scenario generate_random_scenario(int num_targets, int num_uavs, std::uint64_t seed,
                                  const GeneratorOptions& opts = {});

/// The fixed three-follower, one-task environment used to check learned
/// policies against the exhaustive oracle.
Scenario tiny_scenario();

std::vector<std::size_t> follower_indices(const Scenario& s);

} // namespace uavdnn
