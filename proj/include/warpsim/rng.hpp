#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace warpsim {

// Seeded, splittable random source. All nondeterminism in the library flows
// through this type. The (seed, stream_id) pair fully determines the draw
// sequence; split(k) derives statistically independent child streams, so
// replicate-level parallelism stays reproducible regardless of scheduling.
//
// Core generator: xoshiro256++ with state seeded by splitmix64 from a mix of
// seed and stream_id.
class RngStream {
  public:
    explicit RngStream(std::uint64_t seed, std::uint64_t stream_id = 0);

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_id_; }

    // Child stream with a stream id derived from (stream_id, k).
    RngStream split(std::uint64_t k) const;

    std::uint64_t next_u64();

    // Uniform on the open interval (0,1), 53-bit resolution.
    double uniform();

    // Standard normal (polar method; one spare value cached).
    double normal();

  private:
    std::array<std::uint64_t, 4> state_;
    std::uint64_t seed_;
    std::uint64_t stream_id_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

// n sorted uniforms with 0 and 1 appended; strictly increasing (float ties
// redrawn). Throws InvalidParameterError for n = 0.
std::vector<double> sample_uniform_order_stats(std::size_t n, RngStream& rng);

// Gamma(shape, 1) variate, shape > 0. Shapes below 1 use the boosting
// identity G(a) = G(a+1) * U^(1/a) evaluated in log space.
double sample_gamma(double shape, RngStream& rng);

// log of a Gamma(shape, 1) variate; safe for very small shapes where the
// variate itself would underflow.
double sample_log_gamma(double shape, RngStream& rng);

// Dirichlet vector for non-negative parameters (at least one positive).
// Zero parameters give identically-zero components. Normalization happens
// after log-space gamma draws; non-finite draws are retried a bounded number
// of times and then fall back to assigning mass 1 to the largest parameter.
std::vector<double> sample_dirichlet(const std::vector<double>& params, RngStream& rng);

inline double sample_standard_normal(RngStream& rng) { return rng.normal(); }

}  // namespace warpsim
