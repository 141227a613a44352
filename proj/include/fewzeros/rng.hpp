#pragma once

// Counter-based random streams. A draw is a pure function of
// (master seed, stream index, counter), so trial i always sees the same
// numbers no matter which thread runs it or in which order.

#include <cmath>
#include <cstdint>
#include <numbers>

namespace fewzeros {

namespace detail {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace detail

class RngStream {
public:
    RngStream(std::uint64_t master_seed, std::uint64_t stream_index)
        : master_(master_seed), index_(stream_index),
          key_(detail::splitmix64(detail::splitmix64(master_seed) ^ (stream_index * 0xd1342543de82ef95ULL + 1))) {}

    std::uint64_t master_seed() const { return master_; }
    std::uint64_t stream_index() const { return index_; }

    /// Independent child stream; children of different indices never share draws.
    RngStream child(std::uint64_t index) const { return RngStream(key_, index); }

    std::uint64_t next_u64() { return detail::splitmix64(key_ ^ detail::splitmix64(counter_++)); }

    /// Uniform on the open interval (0, 1).
    double uniform() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Integer uniform on [lo, hi].
    long uniform_int(long lo, long hi) {
        const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<long>(next_u64() % span);
    }

    /// Standard normal via Box-Muller; the second variate is cached.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

private:
    std::uint64_t master_;
    std::uint64_t index_;
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace fewzeros
