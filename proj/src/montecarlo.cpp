#include "warpsim/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "warpsim/errors.hpp"

namespace warpsim {

namespace {

void check_grid(const std::vector<double>& grid) {
    if (grid.empty()) throw InvalidParameterError("study grid must be non-empty");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!(grid[i] >= 0.0 && grid[i] <= 1.0))
            throw InvalidParameterError("study grid must lie in [0,1]");
        if (i > 0 && grid[i] <= grid[i - 1])
            throw InvalidParameterError("study grid must be strictly increasing");
    }
}

// Per-block raw-moment accumulators. Blocks have a fixed size and are merged
// in block order, so the result is independent of the thread count.
struct BlockSums {
    std::vector<double> s1, s2, s3, s4;
    double l2 = 0.0;
    double sup = 0.0;

    explicit BlockSums(std::size_t g) : s1(g, 0.0), s2(g, 0.0), s3(g, 0.0), s4(g, 0.0) {}

    void merge(const BlockSums& o) {
        for (std::size_t i = 0; i < s1.size(); ++i) {
            s1[i] += o.s1[i];
            s2[i] += o.s2[i];
            s3[i] += o.s3[i];
            s4[i] += o.s4[i];
        }
        l2 += o.l2;
        sup += o.sup;
    }
};

constexpr std::size_t kBlockSize = 2048;

// Trapezoid weights for the grid extended with the endpoints of [0,1], where
// every warp and target coincide (so the extension adds no error mass).
std::vector<double> l2_weights(const std::vector<double>& grid) {
    std::vector<double> ext;
    ext.reserve(grid.size() + 2);
    if (grid.front() > 0.0) ext.push_back(0.0);
    const std::size_t off = ext.size();
    ext.insert(ext.end(), grid.begin(), grid.end());
    if (grid.back() < 1.0) ext.push_back(1.0);
    std::vector<double> w(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        std::size_t k = i + off;
        double lo = (k == 0) ? ext.front() : ext[k - 1];
        double hi = (k + 1 < ext.size()) ? ext[k + 1] : ext.back();
        w[i] = 0.5 * (hi - lo);
    }
    return w;
}

}  // namespace

std::vector<double> default_grid() {
    std::vector<double> g(99);
    for (int i = 0; i < 99; ++i) g[i] = (i + 1) / 100.0;
    return g;
}

StudySpec make_study(const BkConfig& cfg, std::size_t replicates, std::vector<double> grid,
                     std::uint64_t master_seed) {
    StudySpec spec;
    spec.sampler = [cfg](RngStream& rng) { return simulate_bk(cfg, rng); };
    spec.target = cfg.target;
    spec.replicates = replicates;
    spec.grid = std::move(grid);
    spec.master_seed = master_seed;
    spec.algorithm = "bk";
    spec.size_param = cfg.n;
    spec.theta = cfg.theta;
    return spec;
}

StudySpec make_study(const CdfConfig& cfg, std::size_t replicates, std::vector<double> grid,
                     std::uint64_t master_seed) {
    StudySpec spec;
    spec.sampler = [cfg](RngStream& rng) { return simulate_cdf(cfg, rng); };
    spec.target = cfg.target;
    spec.replicates = replicates;
    spec.grid = std::move(grid);
    spec.master_seed = master_seed;
    spec.algorithm = "cdf";
    spec.size_param = cfg.n;
    spec.theta = cfg.theta;
    spec.p = cfg.p;
    return spec;
}

StudySpec make_study(const MzwConfig& cfg, std::size_t replicates, std::vector<double> grid,
                     std::uint64_t master_seed) {
    StudySpec spec;
    spec.sampler = [cfg](RngStream& rng) { return simulate_mzw(cfg, rng); };
    spec.target = cfg.target;
    spec.replicates = replicates;
    spec.grid = std::move(grid);
    spec.master_seed = master_seed;
    spec.algorithm = "mzw";
    spec.size_param = cfg.m;
    spec.theta = cfg.theta;
    return spec;
}

StudyResult run_study(const StudySpec& spec) {
    if (!spec.sampler) throw InvalidParameterError("run_study: missing sampler");
    if (spec.replicates < 2) throw InvalidParameterError("run_study: need at least 2 replicates");
    check_grid(spec.grid);

    const std::size_t G = spec.grid.size();
    const std::size_t R = spec.replicates;

    std::vector<double> phi(G);
    for (std::size_t i = 0; i < G; ++i) phi[i] = spec.target(spec.grid[i]);
    const std::vector<double> tw = l2_weights(spec.grid);

    const std::size_t nblocks = (R + kBlockSize - 1) / kBlockSize;
    std::vector<BlockSums> blocks(nblocks, BlockSums(G));
    RngStream root(spec.master_seed, spec.stream_base);

    auto run_block = [&](std::size_t b) {
        BlockSums acc(G);
        const std::size_t lo = b * kBlockSize;
        const std::size_t hi = std::min(R, lo + kBlockSize);
        for (std::size_t r = lo; r < hi; ++r) {
            RngStream rs = root.split(r);
            WarpPath path = spec.sampler(rs);
            double l2 = 0.0, sup = 0.0;
            for (std::size_t i = 0; i < G; ++i) {
                double x = path(spec.grid[i]);
                double x2 = x * x;
                acc.s1[i] += x;
                acc.s2[i] += x2;
                acc.s3[i] += x2 * x;
                acc.s4[i] += x2 * x2;
                double d = x - phi[i];
                l2 += tw[i] * d * d;
                sup = std::max(sup, std::abs(d));
            }
            acc.l2 += l2;
            acc.sup += sup;
        }
        blocks[b] = std::move(acc);
    };

    unsigned hw = std::thread::hardware_concurrency();
    std::size_t nthreads =
        spec.threads > 0 ? static_cast<std::size_t>(spec.threads) : (hw ? hw : 1);
    nthreads = std::min<std::size_t>(nthreads, nblocks);
    if (nthreads <= 1) {
        for (std::size_t b = 0; b < nblocks; ++b) run_block(b);
    } else {
        std::exception_ptr error;
        std::mutex error_mu;
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(nthreads);
        for (std::size_t t = 0; t < nthreads; ++t) {
            pool.emplace_back([&] {
                for (;;) {
                    std::size_t b = next.fetch_add(1);
                    if (b >= nblocks) return;
                    try {
                        run_block(b);
                    } catch (...) {
                        std::lock_guard<std::mutex> lk(error_mu);
                        if (!error) error = std::current_exception();
                        return;
                    }
                }
            });
        }
        for (auto& th : pool) th.join();
        if (error) std::rethrow_exception(error);
    }

    BlockSums total(G);
    for (const auto& b : blocks) total.merge(b);

    StudyResult res;
    res.empirical.grid = spec.grid;
    res.empirical.kind = "empirical";
    res.empirical.algorithm = spec.algorithm;
    res.empirical.size_param = spec.size_param;
    res.empirical.theta = spec.theta;
    res.empirical.p = spec.p;
    res.empirical.mean.resize(G);
    res.empirical.variance.resize(G);
    res.mean_se.resize(G);
    res.var_se.resize(G);
    const double M = static_cast<double>(R);
    for (std::size_t i = 0; i < G; ++i) {
        double m1 = total.s1[i] / M;
        double var = (total.s2[i] - M * m1 * m1) / (M - 1.0);  // unbiased, divisor M-1
        var = std::max(var, 0.0);
        double m2 = total.s2[i] / M - m1 * m1;
        double m4 = total.s4[i] / M - 4.0 * m1 * total.s3[i] / M +
                    6.0 * m1 * m1 * total.s2[i] / M - 3.0 * m1 * m1 * m1 * m1;
        double var_of_var = (m4 - (M - 3.0) / (M - 1.0) * m2 * m2) / M;
        res.empirical.mean[i] = m1;
        res.empirical.variance[i] = var;
        res.mean_se[i] = std::sqrt(std::max(m2, 0.0) / M);
        res.var_se[i] = std::sqrt(std::max(var_of_var, 0.0));
    }
    res.empirical.finalize();
    res.l2_error_mean = total.l2 / M;
    res.sup_error_mean = total.sup / M;
    res.per_replicate_seeds.reserve(R);
    for (std::size_t r = 0; r < R; ++r)
        res.per_replicate_seeds.push_back(root.split(r).stream_id());
    return res;
}

std::vector<ConvergenceRow> convergence_study(PolygonAlgorithm algorithm,
                                              const std::vector<std::size_t>& sizes,
                                              double theta, double p, const TargetWarp& target,
                                              std::size_t replicates,
                                              const std::vector<double>& grid,
                                              std::uint64_t master_seed) {
    for (std::size_t i = 1; i < sizes.size(); ++i)
        if (sizes[i] <= sizes[i - 1])
            throw InvalidParameterError("convergence_study: sizes must be increasing");
    std::vector<ConvergenceRow> rows;
    rows.reserve(sizes.size());
    for (std::size_t idx = 0; idx < sizes.size(); ++idx) {
        const std::size_t n = sizes[idx];
        StudySpec spec;
        if (algorithm == PolygonAlgorithm::bk) {
            spec = make_study(BkConfig{n, theta, target}, replicates, grid, master_seed);
        } else {
            spec = make_study(CdfConfig{n, theta, p, target}, replicates, grid, master_seed);
        }
        spec.stream_base = idx + 1;

        ConvergenceRow row;
        row.n = n;
        row.study = run_study(spec);
        row.reference.grid = grid;
        row.reference.algorithm = spec.algorithm;
        row.reference.size_param = n;
        row.reference.theta = theta;
        row.reference.p = spec.p;
        if (n <= kExactOracleMaxN) {
            row.reference.kind = "exact";
            for (double t : grid) {
                if (algorithm == PolygonAlgorithm::bk) {
                    row.reference.mean.push_back(bk_mean_exact(t, n, target));
                    row.reference.variance.push_back(bk_var_exact(t, n, theta, target));
                } else {
                    row.reference.mean.push_back(cdf_mean_exact(t, n, p, target));
                    row.reference.variance.push_back(cdf_var_exact(t, n, theta, p, target));
                }
            }
        } else {
            MomentProfile asym = asymptotic_profile(grid, theta, target);
            row.reference.kind = asym.kind;
            row.reference.mean = std::move(asym.mean);
            row.reference.variance = std::move(asym.variance);
        }
        row.reference.finalize();
        for (std::size_t i = 0; i < grid.size(); ++i) {
            row.mean_err_sup =
                std::max(row.mean_err_sup,
                         std::abs(row.study.empirical.mean[i] - row.reference.mean[i]));
            row.var_err_sup =
                std::max(row.var_err_sup,
                         std::abs(row.study.empirical.variance[i] - row.reference.variance[i]));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<MzwThetaRow> mzw_theta_limit_study(std::size_t m, const std::vector<double>& v,
                                               const TargetWarp& target,
                                               const std::vector<double>& thetas,
                                               std::size_t replicates,
                                               const std::vector<double>& grid,
                                               std::uint64_t master_seed) {
    for (std::size_t i = 1; i < thetas.size(); ++i)
        if (thetas[i] <= thetas[i - 1])
            throw InvalidParameterError("mzw_theta_limit_study: thetas must be increasing");
    double vsum = 0.0;
    for (double vi : v) vsum += vi;

    std::vector<MzwThetaRow> rows;
    rows.reserve(thetas.size());
    for (std::size_t idx = 0; idx < thetas.size(); ++idx) {
        MzwConfig cfg;
        cfg.m = m;
        cfg.theta = thetas[idx];
        cfg.v = v;
        cfg.target = target;
        StudySpec spec = make_study(cfg, replicates, grid, master_seed);
        spec.stream_base = idx + 1;
        StudyResult study = run_study(spec);

        MzwThetaRow row;
        row.theta = thetas[idx];
        row.mean_envelope = std::expm1(vsum / (1.0 + thetas[idx]));
        for (std::size_t i = 0; i < grid.size(); ++i) {
            row.sup_mean_dev =
                std::max(row.sup_mean_dev, std::abs(study.empirical.mean[i] - target(grid[i])));
            row.sup_mean_se = std::max(row.sup_mean_se, study.mean_se[i]);
            row.sup_variance = std::max(row.sup_variance, study.empirical.variance[i]);
        }
        rows.push_back(row);
    }
    return rows;
}

void write_study_csv(std::ostream& os, const StudyResult& result) {
    os << "t,mean,var\n";
    os.precision(17);
    for (std::size_t i = 0; i < result.empirical.grid.size(); ++i)
        os << result.empirical.grid[i] << ',' << result.empirical.mean[i] << ','
           << result.empirical.variance[i] << '\n';
}

std::string study_summary_json(const StudyResult& result) {
    std::ostringstream os;
    os.precision(17);
    os << "{\"l2_error_mean\":" << result.l2_error_mean
       << ",\"sup_error_mean\":" << result.sup_error_mean << ",\"seeds\":[";
    for (std::size_t i = 0; i < result.per_replicate_seeds.size(); ++i) {
        if (i) os << ',';
        os << result.per_replicate_seeds[i];
    }
    os << "]}";
    return os.str();
}

}  // namespace warpsim
