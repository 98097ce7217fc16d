#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "warpsim/warp.hpp"

namespace warpsim {

// Mean and variance curves on a grid, with provenance.
struct MomentProfile {
    std::vector<double> grid;
    std::vector<double> mean;
    std::vector<double> variance;
    std::string kind;        // "exact" | "asymptotic" | "empirical"
    std::string algorithm;   // "bk" | "cdf" | "mzw" | ...
    std::size_t size_param = 0;  // n or m
    double theta = 0.0;
    double p = 0.0;

    // Enforces the invariants: variance >= -1e-10 with negatives inside the
    // slack clamped to 0, mean in [0,1] within 1e-8.
    void finalize();
};

// Largest n accepted by the exact oracles.
inline constexpr std::size_t kExactOracleMaxN = 128;

// Exact first two moments of the BK path at a point t in (0,1). The mean does
// not depend on the concentration parameter (structurally: theta is absent).
double bk_mean_exact(double t, std::size_t n, const TargetWarp& target);
double bk_var_exact(double t, std::size_t n, double theta, const TargetWarp& target);

// Exact first two moments of the CDF path. The mean depends on p but not theta.
double cdf_mean_exact(double t, std::size_t n, double p, const TargetWarp& target);
double cdf_var_exact(double t, std::size_t n, double theta, double p, const TargetWarp& target);

// Limits as n grows: mean phi(t), variance phi(t)(1 - phi(t)) / (1 + theta).
MomentProfile asymptotic_profile(const std::vector<double>& grid, double theta,
                                 const TargetWarp& target);

// Limit L2 risk: (1/(1+theta)) int_0^1 phi(1-phi).
double l2_risk_limit(double theta, const TargetWarp& target);

// Frechet variance of the MZW process: (1/(1+theta)) sum_i v_i.
double mzw_frechet_variance(const std::vector<double>& v, double theta);

// CSV: t,mean,variance,kind
void write_profile_csv(std::ostream& os, const MomentProfile& profile);

}  // namespace warpsim
