#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace warpsim {

struct CheckResult {
    std::string name;
    bool passed = false;
    double measured = 0.0;
    double tolerance = 0.0;
    std::string details;
};

struct SuiteResult {
    std::string suite;
    std::vector<CheckResult> checks;
    bool all_passed() const;
};

struct ValidateOptions {
    std::uint64_t master_seed = 2024;
    int threads = 0;
    bool include_long = false;  // adds the optional n = 40000 estimator cells
};

// Exact-oracle vs Monte Carlo agreement for BK and CDF at small n
// (4 MC standard errors at 2e5 replicates).
SuiteResult run_moments_suite(const ValidateOptions& opts);

// n * |exact - asymptote| stays bounded over n in {10,20,40,80} (deterministic).
SuiteResult run_rates_suite(const ValidateOptions& opts);

// L2 risk limit agreement at n = 500 and the BK/CDF risk ratio.
SuiteResult run_l2_suite(const ValidateOptions& opts);

// Frechet variance identity for the truncated-expansion sampler, two routes.
SuiteResult run_frechet_suite(const ValidateOptions& opts);

// Large-theta degeneracy of the expansion sampler (exponential envelopes).
SuiteResult run_mzw_limit_suite(const ValidateOptions& opts);

// Concentration-estimator study cells (mean/sd of theta_hat / theta).
SuiteResult run_table2_suite(const ValidateOptions& opts);

// Structural invariants: fuzzed sampler validity, group-operation laws,
// log-derivative isometry round trips, Dirichlet moment identity battery.
SuiteResult run_structural_suite(const ValidateOptions& opts);

// Synthetic drifted dataset end-to-end: drifted periods' bands above zero,
// null periods' bands containing zero, bit-reproducible.
SuiteResult run_drift_suite(const ValidateOptions& opts);

// Empirical-mean convergence toward the target as n grows (250-path figures).
SuiteResult run_convergence_suite(const ValidateOptions& opts);

// Pointwise variance strictly decreasing in theta for all three samplers.
SuiteResult run_theta_sweep_suite(const ValidateOptions& opts);

SuiteResult run_suite_by_name(const std::string& name, const ValidateOptions& opts);

std::string suite_json(const SuiteResult& suite);

}  // namespace warpsim
