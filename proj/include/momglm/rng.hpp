#pragma once

#include <cmath>
#include <cstdint>

namespace momglm {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace detail

/// Counter-based random stream keyed by (seed, n, replicate, purpose). Streams
/// with different keys are independent, so replicates can run on any thread
/// and still reproduce bit-identically.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t n, std::uint64_t replicate,
               std::uint64_t purpose) {
        std::uint64_t s = seed;
        state_ = detail::splitmix64(s);
        s = state_ ^ (0x9E3779B97F4A7C15ULL * (n + 1));
        state_ = detail::splitmix64(s);
        s = state_ ^ (0xC2B2AE3D27D4EB4FULL * (replicate + 1));
        state_ = detail::splitmix64(s);
        s = state_ ^ (0x165667B19E3779F9ULL * (purpose + 1));
        state_ = detail::splitmix64(s);
    }

    std::uint64_t next_u64() { return detail::splitmix64(state_); }

    /// Uniform on [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform on (0, 1).
    double uniform_open() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller with a cached spare.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = uniform_open();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * M_PI * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

    bool bernoulli(double prob) { return uniform() < prob; }

    double rademacher() { return (next_u64() & 1ULL) ? 1.0 : -1.0; }

    /// Poisson by inversion (adequate for the small means used here).
    long poisson(double mean) {
        const double limit = std::exp(-mean);
        double prod = 1.0;
        long count = -1;
        do {
            prod *= uniform_open();
            ++count;
        } while (prod > limit);
        return count;
    }

private:
    std::uint64_t state_ = 0;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

/// Standard normal quantile function (Acklam's rational approximation with a
/// Halley refinement; absolute error well below 1e-9).
inline double normal_quantile(double prob) {
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double p_low = 0.02425;
    double x;
    if (prob <= 0.0 || prob >= 1.0 || !std::isfinite(prob)) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    if (prob < p_low) {
        const double q = std::sqrt(-2.0 * std::log(prob));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (prob <= 1.0 - p_low) {
        const double q = prob - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log(1.0 - prob));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    // One Halley step against the exact cdf.
    const double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - prob;
    const double u = e * std::sqrt(2.0 * M_PI) * std::exp(0.5 * x * x);
    x = x - u / (1.0 + 0.5 * x * u);
    return x;
}

}  // namespace momglm
