#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "warpsim/moments.hpp"
#include "warpsim/rng.hpp"
#include "warpsim/samplers.hpp"
#include "warpsim/warp.hpp"

namespace warpsim {

// Replication study: `sampler` is a pure function of its stream; replicate r
// always runs on RngStream(master_seed, stream_base).split(r), so results are
// bit-identical regardless of thread count or scheduling.
struct StudySpec {
    std::function<WarpPath(RngStream&)> sampler;
    TargetWarp target = TargetWarp::phi1();
    std::size_t replicates = 2;
    std::vector<double> grid;
    std::uint64_t master_seed = 0;
    std::uint64_t stream_base = 0;
    int threads = 0;  // 0 = hardware concurrency

    // metadata carried into the empirical profile
    std::string algorithm = "custom";
    std::size_t size_param = 0;
    double theta = 0.0;
    double p = 0.0;
};

StudySpec make_study(const BkConfig& cfg, std::size_t replicates,
                     std::vector<double> grid, std::uint64_t master_seed);
StudySpec make_study(const CdfConfig& cfg, std::size_t replicates,
                     std::vector<double> grid, std::uint64_t master_seed);
StudySpec make_study(const MzwConfig& cfg, std::size_t replicates,
                     std::vector<double> grid, std::uint64_t master_seed);

struct StudyResult {
    MomentProfile empirical;          // kind = "empirical", unbiased variance
    std::vector<double> mean_se;      // per-point MC standard error of the mean
    std::vector<double> var_se;       // per-point MC standard error of the variance
    double l2_error_mean = 0.0;       // mean over replicates of ||w - phi||^2
    double sup_error_mean = 0.0;      // mean over replicates of sup |w - phi|
    std::vector<std::uint64_t> per_replicate_seeds;  // stream ids actually used
};

StudyResult run_study(const StudySpec& spec);

// Default evaluation grid: 99 equispaced interior points 0.01 .. 0.99.
std::vector<double> default_grid();

enum class PolygonAlgorithm { bk, cdf };

struct ConvergenceRow {
    std::size_t n = 0;
    MomentProfile reference;   // exact oracle for n <= 128, asymptotic beyond
    StudyResult study;
    double mean_err_sup = 0.0;  // sup over grid |empirical mean - reference mean|
    double var_err_sup = 0.0;
};

std::vector<ConvergenceRow> convergence_study(PolygonAlgorithm algorithm,
                                              const std::vector<std::size_t>& sizes,
                                              double theta, double p, const TargetWarp& target,
                                              std::size_t replicates,
                                              const std::vector<double>& grid,
                                              std::uint64_t master_seed);

struct MzwThetaRow {
    double theta = 0.0;
    double sup_mean_dev = 0.0;       // sup over grid |empirical mean - phi|
    double sup_mean_se = 0.0;        // sup over grid of the mean's MC s.e.
    double sup_variance = 0.0;       // sup over grid of the empirical variance
    double mean_envelope = 0.0;      // exp(sum v_i/(1+theta)) - 1 (per-point scale phi(t))
};

std::vector<MzwThetaRow> mzw_theta_limit_study(std::size_t m, const std::vector<double>& v,
                                               const TargetWarp& target,
                                               const std::vector<double>& thetas,
                                               std::size_t replicates,
                                               const std::vector<double>& grid,
                                               std::uint64_t master_seed);

// CSV (t, mean, var) and JSON summary of a study.
void write_study_csv(std::ostream& os, const StudyResult& result);
std::string study_summary_json(const StudyResult& result);

}  // namespace warpsim
