#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace stablelab {

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t& s) {
    std::uint64_t z = (s += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}
}  // namespace detail

/// Deterministic, splittable random stream. A (master_seed, stream_id) pair
/// fully determines the variate sequence, independent of how work is
/// distributed over threads; sub-streams never overlap in practice because
/// the 256-bit xoshiro state is seeded from distinct splitmix chains.
class RngStream {
public:
    RngStream(std::uint64_t master_seed, std::uint64_t stream_id = 0)
        : master_seed_(master_seed), stream_id_(stream_id) {
        std::uint64_t s = master_seed ^ (0x5851f42d4c957f2dULL * (stream_id + 1));
        for (auto& w : state_) w = detail::splitmix64(s);
    }

    std::uint64_t master_seed() const { return master_seed_; }
    std::uint64_t stream_id() const { return stream_id_; }

    RngStream substream(std::uint64_t k) const {
        return RngStream(master_seed_, stream_id_ * 0x10000ULL + k + 1);
    }

    std::uint64_t next_u64() {
        auto rotl = [](std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); };
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform on (0,1); never returns 0 or 1.
    double u01() {
        const double u = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
        return u > 0.0 ? u : 0x1.0p-54;
    }

    /// Uniform on (-1/2 pi, 1/2 pi), open.
    double uniform_angle_half() { return (u01() - 0.5) * 3.14159265358979323846; }

    double exponential() { return -std::log(u01()); }

    /// Uniform direction on the unit sphere in R^d (Marsaglia via normals).
    std::vector<double> unit_vector(int d) {
        std::vector<double> v(d);
        double norm2 = 0.0;
        do {
            norm2 = 0.0;
            for (int i = 0; i < d; ++i) {
                v[i] = normal();
                norm2 += v[i] * v[i];
            }
        } while (norm2 < 1e-300);
        const double inv = 1.0 / std::sqrt(norm2);
        for (auto& x : v) x *= inv;
        return v;
    }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * u01() - 1.0;
            v = 2.0 * u01() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double m = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * m;
        have_spare_ = true;
        return u * m;
    }

    bool bernoulli(double p) { return u01() < p; }

private:
    std::uint64_t master_seed_;
    std::uint64_t stream_id_;
    std::uint64_t state_[4];
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace stablelab
