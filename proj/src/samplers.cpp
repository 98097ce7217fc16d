#include "warpsim/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "warpsim/errors.hpp"
#include "warpsim/gamma_space.hpp"

namespace warpsim {

namespace {

void check_theta(double theta) {
    if (!(theta > 0.0)) throw InvalidParameterError("theta must be > 0");
}

std::vector<double> cumulative_with_endpoints(const std::vector<double>& jumps) {
    // jumps of total mass 1 -> ordinates 0, j1, j1+j2, ..., 1 (last pinned)
    std::vector<double> y(jumps.size() + 1, 0.0);
    for (std::size_t i = 0; i < jumps.size(); ++i) y[i + 1] = y[i] + jumps[i];
    y.back() = 1.0;
    for (std::size_t i = 1; i + 1 < y.size(); ++i) y[i] = std::min(y[i], 1.0);
    return y;
}

// Strictly increasing xs in [0,1] with fixed endpoints; float-level collisions
// (e.g. a steep inverse collapsing two order statistics) are nudged apart.
void strictify(std::vector<double>& xs) {
    xs.front() = 0.0;
    xs.back() = 1.0;
    for (std::size_t i = 1; i + 1 < xs.size(); ++i) {
        if (xs[i] <= xs[i - 1]) xs[i] = std::nextafter(xs[i - 1], 2.0);
        if (xs[i] >= 1.0) {
            // walk back from 1 so the tail stays strictly below the endpoint
            double cap = 1.0;
            for (std::size_t k = xs.size() - 2; k >= i; --k) {
                cap = std::nextafter(cap, 0.0);
                if (xs[k] >= cap) xs[k] = cap; else break;
                if (k == 0) break;
            }
        }
    }
    for (std::size_t i = 0; i + 1 < xs.size(); ++i)
        if (!(xs[i] < xs[i + 1]))
            throw SamplingError("degenerate abscissa grid after tie-breaking");
}

}  // namespace

WarpPath simulate_cdh(std::size_t n, const std::vector<double>& t_grid, double theta,
                      RngStream& rng) {
    if (n == 0) throw InvalidParameterError("simulate_cdh: n must be >= 1");
    check_theta(theta);
    if (t_grid.size() != n + 2 || t_grid.front() != 0.0 || t_grid.back() != 1.0)
        throw InvalidParameterError("simulate_cdh: grid must be 0 = t0 < ... < t_{n+1} = 1");
    for (std::size_t i = 0; i + 1 < t_grid.size(); ++i)
        if (!(t_grid[i] < t_grid[i + 1]))
            throw InvalidParameterError("simulate_cdh: grid must be strictly increasing");
    std::vector<double> params(n + 1, theta);
    auto jumps = sample_dirichlet(params, rng);
    return WarpPath(t_grid, cumulative_with_endpoints(jumps));
}

std::vector<double> bk_jump_heights(const std::vector<double>& grid, double theta,
                                    const TargetWarp& target, RngStream& rng) {
    check_theta(theta);
    std::vector<double> params(grid.size() - 1);
    double prev = 0.0;
    for (std::size_t j = 1; j < grid.size(); ++j) {
        double cur = target(grid[j]);
        params[j - 1] = theta * std::max(cur - prev, 0.0);
        prev = cur;
    }
    try {
        return sample_dirichlet(params, rng);
    } catch (const InvalidParameterError& e) {
        throw SamplingError(std::string("bk jump heights: ") + e.what());
    }
}

WarpPath simulate_bk(const BkConfig& cfg, RngStream& rng) {
    if (cfg.n == 0) throw InvalidParameterError("simulate_bk: n must be >= 1");
    check_theta(cfg.theta);
    auto grid = sample_uniform_order_stats(cfg.n, rng);
    auto jumps = bk_jump_heights(grid, cfg.theta, cfg.target, rng);
    return WarpPath(std::move(grid), cumulative_with_endpoints(jumps));
}

std::vector<double> cdf_ordinates(std::size_t n, double theta, double p, RngStream& rng) {
    if (n == 0) throw InvalidParameterError("simulate_cdf: n must be >= 1");
    check_theta(theta);
    if (!(p > 0.0 && p < 1.0)) throw InvalidParameterError("simulate_cdf: p must be in (0,1)");
    std::vector<double> params(n, theta / static_cast<double>(n));
    auto beta = sample_dirichlet(params, rng);
    // gamma_j = (1-p) beta_j + p beta_{j-1}, with beta_0 = beta_{n+1} = 0
    std::vector<double> jumps(n + 1, 0.0);
    for (std::size_t j = 1; j <= n + 1; ++j) {
        double bj = (j <= n) ? beta[j - 1] : 0.0;
        double bjm1 = (j >= 2) ? beta[j - 2] : 0.0;
        jumps[j - 1] = (1.0 - p) * bj + p * bjm1;
    }
    return cumulative_with_endpoints(jumps);
}

WarpPath simulate_cdf(const CdfConfig& cfg, RngStream& rng) {
    if (cfg.n == 0) throw InvalidParameterError("simulate_cdf: n must be >= 1");
    check_theta(cfg.theta);
    // draw order: abscissae first, then weights, so the Dirichlet draws are
    // reusable across targets under a shared seed
    auto u = sample_uniform_order_stats(cfg.n, rng);
    auto ys = cdf_ordinates(cfg.n, cfg.theta, cfg.p, rng);
    std::vector<double> xs(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) xs[i] = cfg.target.inverse(u[i]);
    strictify(xs);
    return WarpPath(std::move(xs), std::move(ys));
}

namespace {

std::vector<double> gaussian_scores(const std::vector<double>& v, double theta,
                                    RngStream& rng) {
    std::vector<double> g(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        g[i] = std::sqrt(v[i] / (1.0 + theta)) * rng.normal();
    return g;
}

WarpPath mzw_path(const std::vector<double>& mean_fn, const std::vector<double>& scores) {
    const std::size_t G = mean_fn.size();
    const double kSqrt2 = 1.4142135623730951;
    std::vector<double> x(G);
    for (std::size_t i = 0; i < G; ++i) {
        double t = grid_node(i, G);
        double s = mean_fn[i];
        // sum_k G_k basis_k(t) via the angle-addition recurrence for
        // cos(2 pi k t), sin(2 pi k t): one sincos per node instead of m
        double c1 = std::cos(2.0 * M_PI * t), s1 = std::sin(2.0 * M_PI * t);
        double ck = c1, sk = s1;
        for (std::size_t j = 0; j < scores.size(); ++j) {
            double basis = (j % 2 == 0) ? kSqrt2 * ck : kSqrt2 * sk;
            s += scores[j] * basis;
            if (j % 2 == 1) {
                double cn = ck * c1 - sk * s1;
                sk = sk * c1 + ck * s1;
                ck = cn;
            }
        }
        if (std::abs(s) > 700.0)
            throw SamplingError("mzw: exp overflow on grid; reduce v or increase theta");
        x[i] = s;
    }
    return psi_inverse(HFunction(std::move(x))).to_path();
}

}  // namespace

WarpPath simulate_mzw(const MzwConfig& cfg, RngStream& rng) {
    if (cfg.m == 0) throw InvalidParameterError("simulate_mzw: m must be >= 1");
    // theta = 0 is a valid boundary here: score variance v_i/(1+theta) = v_i
    if (!(cfg.theta >= 0.0)) throw InvalidParameterError("simulate_mzw: theta must be >= 0");
    if (cfg.v.size() != cfg.m)
        throw InvalidParameterError("simulate_mzw: v must have length m");
    for (double vi : cfg.v)
        if (!(vi > 0.0)) throw InvalidParameterError("simulate_mzw: v_i must be > 0");
    auto mean_fn = psi(GridWarp::from_target(cfg.target)).values();
    auto scores = cfg.scores ? cfg.scores(cfg.m, rng)
                             : gaussian_scores(cfg.v, cfg.theta, rng);
    if (scores.size() != cfg.m) throw InvalidParameterError("simulate_mzw: bad score count");
    return mzw_path(mean_fn, scores);
}

WarpPath simulate_mzw_original(std::size_t m, const std::vector<double>& v, RngStream& rng) {
    if (m == 0) throw InvalidParameterError("simulate_mzw_original: m must be >= 1");
    if (v.size() != m) throw InvalidParameterError("simulate_mzw_original: v must have length m");
    for (double vi : v)
        if (!(vi > 0.0)) throw InvalidParameterError("simulate_mzw_original: v_i must be > 0");
    std::vector<double> scores(m);
    for (std::size_t i = 0; i < m; ++i) scores[i] = std::sqrt(v[i]) * rng.normal();
    return mzw_path(std::vector<double>(kGridSize, 0.0), scores);
}

}  // namespace warpsim
