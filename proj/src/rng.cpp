#include "warpsim/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "warpsim/errors.hpp"

namespace warpsim {

namespace {

inline std::uint64_t splitmix64(std::uint64_t& x) {
    std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t mix64(std::uint64_t a, std::uint64_t b) {
    std::uint64_t x = a;
    std::uint64_t h = splitmix64(x);
    x = b ^ h;
    return splitmix64(x);
}

inline std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id) {
    std::uint64_t x = mix64(seed, stream_id);
    for (auto& s : state_) s = splitmix64(x);
    if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 1;
}

RngStream RngStream::split(std::uint64_t k) const {
    return RngStream(seed_, mix64(stream_id_, k + 1));
}

std::uint64_t RngStream::next_u64() {
    // xoshiro256++
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

double RngStream::uniform() {
    for (;;) {
        double u = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
        if (u > 0.0) return u;  // open interval: reject exact zero
    }
}

double RngStream::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    // polar (Marsaglia) method: only sqrt/log from libm
    for (;;) {
        double u = 2.0 * uniform() - 1.0;
        double v = 2.0 * uniform() - 1.0;
        double s = u * u + v * v;
        if (s >= 1.0 || s == 0.0) continue;
        double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        has_spare_ = true;
        return u * f;
    }
}

std::vector<double> sample_uniform_order_stats(std::size_t n, RngStream& rng) {
    if (n == 0) throw InvalidParameterError("sample_uniform_order_stats: n must be >= 1");
    std::vector<double> u(n);
    for (auto& x : u) x = rng.uniform();
    std::sort(u.begin(), u.end());
    // ties have probability zero; redraw offenders until strictly increasing
    for (int pass = 0; pass < 100; ++pass) {
        bool strict = true;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            if (u[i + 1] <= u[i]) {
                u[i + 1] = rng.uniform();
                strict = false;
            }
        }
        if (u.front() <= 0.0) { u.front() = rng.uniform(); strict = false; }
        if (u.back() >= 1.0) { u.back() = rng.uniform(); strict = false; }
        if (strict) break;
        std::sort(u.begin(), u.end());
    }
    std::vector<double> grid(n + 2);
    grid[0] = 0.0;
    std::copy(u.begin(), u.end(), grid.begin() + 1);
    grid[n + 1] = 1.0;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        if (!(grid[i] < grid[i + 1]))
            throw SamplingError("sample_uniform_order_stats: could not break floating-point ties");
    }
    return grid;
}

namespace {

// Marsaglia-Tsang squeeze method, shape >= 1.
double gamma_mt(double shape, RngStream& rng) {
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x = rng.normal();
        double t = 1.0 + c * x;
        if (t <= 0.0) continue;
        double v = t * t * t;
        double u = rng.uniform();
        double x2 = x * x;
        if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
        if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
    }
}

}  // namespace

double sample_log_gamma(double shape, RngStream& rng) {
    if (!(shape > 0.0)) throw InvalidParameterError("sample_gamma: shape must be > 0");
    if (shape >= 1.0) return std::log(gamma_mt(shape, rng));
    // boosting identity in log space: log G(a) = log G(a+1) + log(U)/a
    double lg = std::log(gamma_mt(shape + 1.0, rng));
    return lg + std::log(rng.uniform()) / shape;
}

double sample_gamma(double shape, RngStream& rng) {
    if (!(shape > 0.0)) throw InvalidParameterError("sample_gamma: shape must be > 0");
    if (shape >= 1.0) return gamma_mt(shape, rng);
    return std::exp(sample_log_gamma(shape, rng));
}

std::vector<double> sample_dirichlet(const std::vector<double>& params, RngStream& rng) {
    if (params.empty()) throw InvalidParameterError("sample_dirichlet: empty parameter vector");
    double max_param = 0.0;
    std::size_t argmax = 0;
    for (std::size_t i = 0; i < params.size(); ++i) {
        if (params[i] < 0.0) throw InvalidParameterError("sample_dirichlet: negative parameter");
        if (params[i] > max_param) { max_param = params[i]; argmax = i; }
    }
    if (max_param == 0.0) throw InvalidParameterError("sample_dirichlet: all parameters are zero");

    const int kMaxRetries = 16;
    std::vector<double> w(params.size());
    for (int attempt = 0; attempt < kMaxRetries; ++attempt) {
        double log_max = -std::numeric_limits<double>::infinity();
        bool bad = false;
        for (std::size_t i = 0; i < params.size(); ++i) {
            if (params[i] == 0.0) {
                w[i] = -std::numeric_limits<double>::infinity();
                continue;
            }
            double lg = sample_log_gamma(params[i], rng);
            if (std::isnan(lg) || lg == std::numeric_limits<double>::infinity()) { bad = true; break; }
            w[i] = lg;
            log_max = std::max(log_max, lg);
        }
        if (bad || !std::isfinite(log_max)) continue;
        double sum = 0.0;
        for (auto& x : w) {
            x = (x == -std::numeric_limits<double>::infinity()) ? 0.0 : std::exp(x - log_max);
            sum += x;
        }
        if (!std::isfinite(sum) || sum <= 0.0) continue;
        for (auto& x : w) x /= sum;
        return w;
    }
    // fallback: concentrate all mass on the largest parameter
    std::fill(w.begin(), w.end(), 0.0);
    w[argmax] = 1.0;
    return w;
}

}  // namespace warpsim
