#pragma once

#include <span>

#include "uavdnn/scenario.hpp"

namespace uavdnn {

inline constexpr double kSpeedOfLight = 3e8;
inline constexpr double kBoltzmann = 1.380649e-23;

double dbm_to_watts(double dbm);
double watts_to_dbm(double watts);

/// Close-in free-space reference model, d0 = 1 m. Throws ValidationError for
/// d < 1 m.
double pathloss_ci(double distance_m, double frequency_hz, double exponent, double shadow_db);

/// Received power in dBm minus interference-plus-noise in dBm.
double sinr_db(double tx_power_dbm, double pathloss_db, double interference_w, double noise_w);

double link_rate(double bandwidth_hz, double sinr_db);

double thermal_noise_watts(double temperature_k, double bandwidth_hz);

struct LinkBudget {
    double distance = 0.0;
    double pathloss_db = 0.0;
    double sinr_db = 0.0;
    double rate = 0.0;
};

/// Link from `tx` to a receiver at `rx_pos`. Distances below the reference
/// distance are clamped to it.
LinkBudget link_budget(const UavSpec& tx, const Position3& tx_pos, const Position3& rx_pos,
                       const RadioConstants& radio, double shadow_db);

double propulsion_power(double speed_mps, const FlightConstants& c);
/// The parasite (drag) term alone.
double parasite_power(double speed_mps, const FlightConstants& c);

double compute_energy(double cycles, double rate_hz, double k0);
double compute_energy(std::span<const LayerProfile> layers, double rate_hz, double k0);
double compute_time(double cycles, double rate_hz);
double compute_time(std::span<const LayerProfile> layers, double rate_hz);

struct TransmitCost {
    double seconds = 0.0;
    double joules = 0.0;
};

/// Throws UnreachableLinkError when bits > 0 and the rate is zero.
TransmitCost transmit_time_energy(double bits, double rate, double tx_power_w);

struct EnergyBreakdown {
    double compute = 0.0;
    double transmit = 0.0;
    double flight = 0.0;

    double total() const { return compute + transmit + flight; }
    EnergyBreakdown& operator+=(const EnergyBreakdown& o)
    {
        compute += o.compute;
        transmit += o.transmit;
        flight += o.flight;
        return *this;
    }
};

struct LatencyBreakdown {
    double waiting = 0.0;
    double transmit = 0.0;
    double compute = 0.0;

    double total() const { return waiting + transmit + compute; }
};

} // namespace uavdnn
