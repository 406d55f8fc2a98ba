#pragma once

// Test-side generators and oracles, written independently of the library.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace testing {

inline std::vector<double> gaussian_noise(std::size_t n, std::uint64_t seed, double sd = 1.0) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> dist(0.0, sd);
    std::vector<double> out(n);
    for (double& v : out) v = dist(gen);
    return out;
}

// x_t = phi x_{t-1} + e_t with a 500-step warm-up.
inline std::vector<double> ar1(std::size_t n, double phi, std::uint64_t seed) {
    const auto e = gaussian_noise(n + 500, seed);
    std::vector<double> out;
    double x = 0.0;
    for (std::size_t t = 0; t < e.size(); ++t) {
        x = phi * x + e[t];
        if (t >= 500) out.push_back(x);
    }
    return out;
}

inline std::vector<double> cumsum(const std::vector<double>& x, double start = 0.0) {
    std::vector<double> out(x.size());
    double acc = start;
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = acc += x[i];
    return out;
}

// (1-B) Z_t = (1 - theta B) a_t.
inline std::vector<double> ima11(std::size_t n, double theta, std::uint64_t seed, double start = 100.0) {
    const auto a = gaussian_noise(n + 1, seed);
    std::vector<double> dz(n);
    for (std::size_t t = 0; t < n; ++t) dz[t] = a[t + 1] - theta * a[t];
    return cumsum(dz, start);
}

// Exponential smoothing: S_{t+1} = alpha Z_t + (1 - alpha) S_t, S_1 = Z_0.
// Returns the one-step forecast made after observing Z_0..Z_{n-1}.
inline double ewma_forecast(const std::vector<double>& z, double alpha) {
    double s = z[0];
    for (std::size_t t = 1; t < z.size(); ++t) s = alpha * z[t] + (1.0 - alpha) * s;
    return s;
}

// Direct evaluation of the biased sample autocorrelation.
inline double brute_acf(const std::vector<double>& x, int k) {
    const double n = static_cast<double>(x.size());
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= n;
    double num = 0.0, den = 0.0;
    for (std::size_t t = 0; t < x.size(); ++t) {
        den += (x[t] - mean) * (x[t] - mean);
        if (t + static_cast<std::size_t>(k) < x.size()) num += (x[t] - mean) * (x[t + static_cast<std::size_t>(k)] - mean);
    }
    return num / den;
}

inline double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace testing
