#include "uavdnn/physics.hpp"

#include <cmath>
#include <numbers>

#include "uavdnn/error.hpp"

namespace uavdnn {

double dbm_to_watts(double dbm)
{
    return std::pow(10.0, dbm / 10.0) * 1e-3;
}

double watts_to_dbm(double watts)
{
    return 10.0 * std::log10(watts / 1e-3);
}

double pathloss_ci(double distance_m, double frequency_hz, double exponent, double shadow_db)
{
    if (!(distance_m >= 1.0))
        throw ValidationError("pathloss_ci: distance below the 1 m reference");
    if (!(frequency_hz > 0.0))
        throw ValidationError("pathloss_ci: frequency must be > 0");
    const double reference = 20.0 * std::log10(4.0 * std::numbers::pi * frequency_hz * 1.0 / kSpeedOfLight);
    return reference + 10.0 * exponent * std::log10(distance_m) + shadow_db;
}

double sinr_db(double tx_power_dbm, double pathloss_db, double interference_w, double noise_w)
{
    return tx_power_dbm - pathloss_db - watts_to_dbm(interference_w + noise_w);
}

double link_rate(double bandwidth_hz, double sinr)
{
    return bandwidth_hz * std::log2(1.0 + std::pow(10.0, sinr / 10.0));
}

double thermal_noise_watts(double temperature_k, double bandwidth_hz)
{
    return kBoltzmann * temperature_k * bandwidth_hz;
}

LinkBudget link_budget(const UavSpec& tx, const Position3& tx_pos, const Position3& rx_pos,
                       const RadioConstants& radio, double shadow_db)
{
    LinkBudget lb;
    lb.distance = distance(tx_pos, rx_pos);
    lb.pathloss_db = pathloss_ci(std::max(lb.distance, 1.0), radio.frequency_hz, radio.pathloss_exponent, shadow_db);
    const double noise = radio.noise_mode == NoiseMode::Fixed ? radio.noise_w
                                                              : thermal_noise_watts(radio.temperature_k, tx.bandwidth_hz);
    lb.sinr_db = sinr_db(watts_to_dbm(tx.tx_power_w), lb.pathloss_db, radio.interference_w, noise);
    lb.rate = link_rate(tx.bandwidth_hz, lb.sinr_db);
    return lb;
}

double parasite_power(double v, const FlightConstants& c)
{
    return 0.5 * c.drag_ratio * c.air_density * c.rotor_solidity * c.disk_area_m2 * v * v * v;
}

double propulsion_power(double v, const FlightConstants& c)
{
    const double v2 = v * v;
    const double v0 = c.hover_induced_speed_mps;
    const double v0_2 = v0 * v0;
    const double blade = c.p_blade_w * (1.0 + 3.0 * v2 / (c.tip_speed_mps * c.tip_speed_mps));
    const double induced = c.p_induced_w * (std::sqrt(1.0 + v2 * v2 / (4.0 * v0_2 * v0_2)) - v2 / (2.0 * v0_2));
    return blade + induced + parasite_power(v, c);
}

double compute_energy(double cycles, double rate_hz, double k0)
{
    return k0 * rate_hz * rate_hz * cycles;
}

double compute_energy(std::span<const LayerProfile> layers, double rate_hz, double k0)
{
    double e = 0.0;
    for (const auto& l : layers)
        e += compute_energy(l.compute_cycles, rate_hz, k0);
    return e;
}

double compute_time(double cycles, double rate_hz)
{
    return cycles / rate_hz;
}

double compute_time(std::span<const LayerProfile> layers, double rate_hz)
{
    double t = 0.0;
    for (const auto& l : layers)
        t += l.compute_cycles / rate_hz;
    return t;
}

TransmitCost transmit_time_energy(double bits, double rate, double tx_power_w)
{
    if (bits <= 0.0)
        return {};
    if (!(rate > 0.0))
        throw UnreachableLinkError("transmit: zero-rate link with pending payload");
    const double t = bits / rate;
    return {t, tx_power_w * t};
}

} // namespace uavdnn
