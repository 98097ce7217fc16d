#pragma once

#include <functional>
#include <vector>

#include "warpsim/rng.hpp"
#include "warpsim/warp.hpp"

namespace warpsim {

struct BkConfig {
    std::size_t n = 1;      // number of random partition points
    double theta = 1.0;     // concentration
    TargetWarp target = TargetWarp::phi1();
};

struct CdfConfig {
    std::size_t n = 1;
    double theta = 1.0;
    double p = 0.5;         // knot localization, in (0,1)
    TargetWarp target = TargetWarp::phi1();
};

// Score generator hook: fills m scores. Defaults to independent normals with
// variance v_i / (1 + theta); tests inject degenerate laws through it.
using ScoreGenerator = std::function<std::vector<double>(std::size_t, RngStream&)>;

struct MzwConfig {
    std::size_t m = 1;              // truncation order
    double theta = 1.0;
    std::vector<double> v;          // positive base variances, length m
    TargetWarp target = TargetWarp::phi1();
    ScoreGenerator scores;          // optional override of the Gaussian law
};

// Deterministic-partition predecessor of the BK sampler: interpolates
// (t*_i, cumulative Dirichlet(theta,...,theta) sums).
WarpPath simulate_cdh(std::size_t n, const std::vector<double>& t_grid, double theta,
                      RngStream& rng);

// Random jump heights of the BK sampler given a frozen abscissa grid:
// Dirichlet with parameters theta * (phi(U*_j) - phi(U*_{j-1})).
std::vector<double> bk_jump_heights(const std::vector<double>& grid, double theta,
                                    const TargetWarp& target, RngStream& rng);

WarpPath simulate_bk(const BkConfig& cfg, RngStream& rng);

// Ordinates of the CDF sampler (cumulative sums of the p-localized Dirichlet
// weights); independent of the target, which only shapes the abscissae.
std::vector<double> cdf_ordinates(std::size_t n, double theta, double p, RngStream& rng);

WarpPath simulate_cdf(const CdfConfig& cfg, RngStream& rng);

WarpPath simulate_mzw(const MzwConfig& cfg, RngStream& rng);

WarpPath simulate_mzw_original(std::size_t m, const std::vector<double>& v, RngStream& rng);

}  // namespace warpsim
