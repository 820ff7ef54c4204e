#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace uavdnn {

/// Mixes a seed with a stream index into an independent 64-bit sub-seed
/// (splitmix64 finalizer). Used for restart, episode and worker streams so
/// results never depend on scheduling order.
std::uint64_t split_seed(std::uint64_t seed, std::uint64_t stream);

/// Thin wrapper over mt19937_64. The distributions are implemented here
/// rather than taken from <random> because the standard distributions are
/// implementation-defined and we promise bit-identical outputs per seed.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }
    /// Uniform in [0, 1).
    double uniform();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    /// Uniform integer in [0, n). n must be > 0.
    std::uint64_t uniform_index(std::uint64_t n);
    /// Standard normal via Box-Muller (cached second value).
    double normal();
    void fill_normal(std::span<double> out);

    /// k distinct elements drawn uniformly from `items` (partial Fisher-Yates
    /// on a copy). Order of the result is the draw order.
    template <class T>
    std::vector<T> sample(const std::vector<T>& items, std::size_t k)
    {
        std::vector<T> pool = items;
        if (k > pool.size())
            k = pool.size();
        for (std::size_t i = 0; i < k; ++i) {
            auto j = i + uniform_index(pool.size() - i);
            std::swap(pool[i], pool[j]);
        }
        pool.resize(k);
        return pool;
    }

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

} // namespace uavdnn
