#include "warpsim/validate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "warpsim/analysis.hpp"
#include "warpsim/errors.hpp"
#include "warpsim/gamma_space.hpp"
#include "warpsim/moments.hpp"
#include "warpsim/montecarlo.hpp"
#include "warpsim/rng.hpp"
#include "warpsim/samplers.hpp"

namespace warpsim {

bool SuiteResult::all_passed() const {
    for (const auto& c : checks)
        if (!c.passed) return false;
    return true;
}

namespace {

CheckResult make_check(std::string name, bool passed, double measured, double tolerance,
                       std::string details = {}) {
    return {std::move(name), passed, measured, tolerance, std::move(details)};
}

// |measured - expected| <= k standard errors
CheckResult se_check(std::string name, double measured, double expected, double se, double k) {
    double dev = std::abs(measured - expected);
    std::ostringstream d;
    d.precision(6);
    d << "measured " << measured << " expected " << expected << " se " << se;
    return make_check(std::move(name), dev <= k * se, dev, k * se, d.str());
}

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(6);
    os << x;
    return os.str();
}

}  // namespace

SuiteResult run_moments_suite(const ValidateOptions& opts) {
    SuiteResult suite{"moments", {}};
    const std::vector<double> tgrid{0.2, 0.5, 0.8};
    const std::size_t M = 200000;
    int combo = 0;
    for (const char* algo : {"bk", "cdf"}) {
        for (const char* tname : {"phi1", "phi2", "phi3"}) {
            TargetWarp phi = TargetWarp::by_name(tname);
            for (std::size_t n : {std::size_t{5}, std::size_t{15}, std::size_t{32}}) {
                for (double theta : {1.0, 10.0}) {
                    StudySpec spec;
                    if (std::string(algo) == "bk")
                        spec = make_study(BkConfig{n, theta, phi}, M, tgrid, opts.master_seed);
                    else
                        spec = make_study(CdfConfig{n, theta, 0.5, phi}, M, tgrid,
                                          opts.master_seed);
                    spec.stream_base = 1000 + combo++;
                    spec.threads = opts.threads;
                    StudyResult st = run_study(spec);
                    for (std::size_t i = 0; i < tgrid.size(); ++i) {
                        double t = tgrid[i];
                        double em, ev;
                        if (std::string(algo) == "bk") {
                            em = bk_mean_exact(t, n, phi);
                            ev = bk_var_exact(t, n, theta, phi);
                        } else {
                            em = cdf_mean_exact(t, n, 0.5, phi);
                            ev = cdf_var_exact(t, n, theta, 0.5, phi);
                        }
                        std::string base = std::string(algo) + "/" + tname + "/n=" +
                                           std::to_string(n) + "/theta=" + fmt(theta) +
                                           "/t=" + fmt(t);
                        suite.checks.push_back(se_check(base + "/mean", st.empirical.mean[i],
                                                        em, st.mean_se[i], 4.0));
                        suite.checks.push_back(se_check(base + "/var", st.empirical.variance[i],
                                                        ev, st.var_se[i], 4.0));
                    }
                }
            }
        }
    }
    return suite;
}

SuiteResult run_rates_suite(const ValidateOptions&) {
    SuiteResult suite{"rates", {}};
    const TargetWarp phi = TargetWarp::phi3();
    const double theta = 1.0;
    const std::vector<std::size_t> sizes{10, 20, 40, 80};
    // evaluation points inside the asymptotic regime: phi3(t)^10 must already
    // be small, otherwise the phi(t)^n terms dominate through n = 80
    for (const char* algo : {"bk", "cdf"}) {
        for (double t : {0.1, 0.25, 0.4}) {
            for (const char* moment : {"mean", "var"}) {
                std::vector<double> scaled;  // n * |exact - asymptote|
                for (std::size_t n : sizes) {
                    double exact, asym;
                    if (std::string(moment) == "mean") {
                        exact = (std::string(algo) == "bk") ? bk_mean_exact(t, n, phi)
                                                            : cdf_mean_exact(t, n, 0.5, phi);
                        asym = phi(t);
                    } else {
                        exact = (std::string(algo) == "bk")
                                    ? bk_var_exact(t, n, theta, phi)
                                    : cdf_var_exact(t, n, theta, 0.5, phi);
                        asym = phi(t) * (1.0 - phi(t)) / (1.0 + theta);
                    }
                    scaled.push_back(static_cast<double>(n) * std::abs(exact - asym));
                }
                std::ostringstream d;
                d.precision(6);
                d << "n*err =";
                for (double s : scaled) d << ' ' << s;
                std::string base = std::string(algo) + "/" + moment + "/t=" + fmt(t);
                // bounded: the scaled deviation never outruns its n=10 level
                double bound = 4.0 * std::max(scaled.front(), 1e-6);
                double worst = *std::max_element(scaled.begin(), scaled.end());
                suite.checks.push_back(
                    make_check(base + "/bounded", worst <= bound, worst, bound, d.str()));
                // no growth: the last doubling's growth factor has died down
                double growth = scaled[3] / std::max(scaled[2], 1e-12);
                suite.checks.push_back(make_check(base + "/growth_dying",
                                                  growth <= 1.15, growth, 1.15, d.str()));
            }
        }
    }
    return suite;
}

SuiteResult run_l2_suite(const ValidateOptions& opts) {
    SuiteResult suite{"l2", {}};
    const TargetWarp phi = TargetWarp::phi3();
    const std::size_t n = 500;
    const std::size_t M = 10000;
    auto grid = default_grid();
    int combo = 0;
    for (double theta : {1.0, 10.0}) {
        double limit = l2_risk_limit(theta, phi);
        double bk_risk = 0.0, cdf_risk = 0.0;
        for (const char* algo : {"bk", "cdf"}) {
            StudySpec spec;
            if (std::string(algo) == "bk")
                spec = make_study(BkConfig{n, theta, phi}, M, grid, opts.master_seed);
            else
                spec = make_study(CdfConfig{n, theta, 0.5, phi}, M, grid, opts.master_seed);
            spec.stream_base = 2000 + combo++;
            spec.threads = opts.threads;
            StudyResult st = run_study(spec);
            double risk = st.l2_error_mean;
            if (std::string(algo) == "bk") bk_risk = risk; else cdf_risk = risk;
            double rel = std::abs(risk - limit) / limit;
            suite.checks.push_back(make_check(std::string(algo) + "/theta=" + fmt(theta) +
                                                  "/l2_risk",
                                              rel <= 0.05, rel, 0.05,
                                              "risk " + fmt(risk) + " limit " + fmt(limit)));
        }
        double ratio = bk_risk / cdf_risk;
        suite.checks.push_back(make_check("ratio/theta=" + fmt(theta),
                                          ratio >= 0.5 && ratio <= 2.0, ratio, 2.0,
                                          "bk/cdf L2 risk ratio"));
    }
    return suite;
}

SuiteResult run_frechet_suite(const ValidateOptions& opts) {
    SuiteResult suite{"frechet", {}};
    const std::size_t m = 10;
    std::vector<double> v(m);
    for (std::size_t i = 0; i < m; ++i) v[i] = 1.0 / ((i + 1.0) * (i + 1.0));
    const std::size_t M = 10000;
    const TargetWarp phi = TargetWarp::phi3();
    const GridWarp phi_grid = GridWarp::from_target(phi);

    int combo = 0;
    for (double theta : {0.0, 1.0}) {
        double expected = mzw_frechet_variance(v, theta);

        // route 1: ||X_m - psi(phi)||^2 = ||sum_i G_i basis_i||^2 by grid
        // quadrature on fresh score draws
        RngStream root1(opts.master_seed, 3000 + combo);
        double sum_l2 = 0.0;
        std::vector<double> field(kGridSize);
        for (std::size_t r = 0; r < M; ++r) {
            RngStream rs = root1.split(r);
            std::fill(field.begin(), field.end(), 0.0);
            for (std::size_t i = 0; i < m; ++i) {
                double g = std::sqrt(v[i] / (1.0 + theta)) * rs.normal();
                for (std::size_t k = 0; k < kGridSize; ++k)
                    field[k] += g * fourier_basis(i + 1, grid_node(k));
            }
            std::vector<double> sq(kGridSize);
            for (std::size_t k = 0; k < kGridSize; ++k) sq[k] = field[k] * field[k];
            sum_l2 += trapezoid(sq);
        }

        // route 2: squared distance of the sampled paths in the derivative
        // inner product (the Frechet-variance identity)
        RngStream root2(opts.master_seed, 3100 + combo);
        double sum_gamma = 0.0;
        MzwConfig cfg;
        cfg.m = m;
        cfg.theta = theta;
        cfg.v = v;
        cfg.target = phi;
        for (std::size_t r = 0; r < M; ++r) {
            RngStream rs = root2.split(r);
            WarpPath w = simulate_mzw(cfg, rs);
            GridWarp wg = GridWarp::from_path(w);
            GridWarp diff = gamma_minus(wg, phi_grid);
            sum_gamma += gamma_inner(diff, diff);
        }

        double mean_l2 = sum_l2 / static_cast<double>(M);
        double mean_gamma = sum_gamma / static_cast<double>(M);
        suite.checks.push_back(make_check("expansion_norm/theta=" + fmt(theta),
                                          std::abs(mean_l2 - expected) <= 0.05 * expected,
                                          mean_l2, expected, "within 5%"));
        suite.checks.push_back(make_check("gamma_norm/theta=" + fmt(theta),
                                          std::abs(mean_gamma - expected) <= 0.05 * expected,
                                          mean_gamma, expected, "within 5%"));
        ++combo;
    }
    return suite;
}

SuiteResult run_mzw_limit_suite(const ValidateOptions& opts) {
    SuiteResult suite{"mzw-limit", {}};
    const std::size_t m = 10;
    std::vector<double> v(m);
    for (std::size_t i = 0; i < m; ++i) v[i] = 1.0 / ((i + 1.0) * (i + 1.0));
    const TargetWarp phi = TargetWarp::phi3();
    const std::size_t M = 10000;
    auto grid = default_grid();
    std::vector<double> thetas{1.0, 10.0, 100.0, 10000.0};
    auto rows = mzw_theta_limit_study(m, v, phi, thetas, M, grid, opts.master_seed);

    // the large-theta row against the proof's envelope + 4 MC standard errors
    const MzwThetaRow& top = rows.back();
    double bound = top.mean_envelope + 4.0 * top.sup_mean_se;
    suite.checks.push_back(make_check("theta=1e4/sup_mean_dev", top.sup_mean_dev <= bound,
                                      top.sup_mean_dev, bound,
                                      "envelope " + fmt(top.mean_envelope) + " + 4se"));
    suite.checks.push_back(make_check("theta=1e4/sup_variance", top.sup_variance <= 1e-3,
                                      top.sup_variance, 1e-3, ""));

    // diagnostics non-increasing across the sweep (up to MC noise)
    bool mono_dev = true, mono_var = true;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        double slack = 4.0 * (rows[i].sup_mean_se + rows[i - 1].sup_mean_se);
        if (rows[i].sup_mean_dev > rows[i - 1].sup_mean_dev + slack) mono_dev = false;
        if (rows[i].sup_variance > rows[i - 1].sup_variance) mono_var = false;
    }
    suite.checks.push_back(make_check("sweep/mean_dev_non_increasing", mono_dev,
                                      mono_dev ? 1.0 : 0.0, 1.0, ""));
    suite.checks.push_back(make_check("sweep/variance_non_increasing", mono_var,
                                      mono_var ? 1.0 : 0.0, 1.0, ""));
    suite.checks.push_back(make_check("theta=1/contrast",
                                      rows.front().sup_mean_dev > top.sup_mean_dev,
                                      rows.front().sup_mean_dev, top.sup_mean_dev,
                                      "small theta shows visibly larger deviation"));
    return suite;
}

SuiteResult run_table2_suite(const ValidateOptions& opts) {
    SuiteResult suite{"table2", {}};
    struct Cell {
        double theta;
        std::size_t n;
        double mean, mean_tol;
        double sd, sd_tol;  // sd_tol 0 = not checked
    };
    std::vector<Cell> cells{
        {5.0, 25, 0.696, 0.06, 0.122, 0.04},
        {500.0, 200, 0.296, 0.05, 0.0, 0.0},
        {1800.0, 2000, 0.531, 0.07, 0.0, 0.0},
    };
    if (opts.include_long) cells.push_back({500.0, 40000, 0.99, 0.12, 0.0, 0.0});

    for (std::size_t c = 0; c < cells.size(); ++c) {
        const Cell& cell = cells[c];
        auto rows = theta_study(cell.theta, {cell.n}, 50, 100,
                                opts.master_seed + 40000 + c);
        const auto& row = rows.front();
        std::string base = "theta=" + fmt(cell.theta) + "/n=" + std::to_string(cell.n);
        suite.checks.push_back(make_check(base + "/mean_ratio",
                                          std::abs(row.mean_ratio - cell.mean) <= cell.mean_tol,
                                          row.mean_ratio, cell.mean_tol,
                                          "expected " + fmt(cell.mean)));
        if (cell.sd_tol > 0.0)
            suite.checks.push_back(make_check(base + "/sd_ratio",
                                              std::abs(row.sd_ratio - cell.sd) <= cell.sd_tol,
                                              row.sd_ratio, cell.sd_tol,
                                              "expected " + fmt(cell.sd)));
    }
    return suite;
}

namespace {

// -------- structural suite helpers --------

struct MomentAcc {
    double s = 0.0, s2 = 0.0;
    long n = 0;
    void add(double x) {
        s += x;
        s2 += x * x;
        ++n;
    }
    double mean() const { return s / n; }
    double se() const {
        double m = mean();
        double var = (s2 - n * m * m) / (n - 1.0);
        return std::sqrt(std::max(var, 0.0) / n);
    }
};

void check_path_valid(const WarpPath& w, bool& ok) {
    if (w.xs().front() != 0.0 || w.xs().back() != 1.0) ok = false;
    if (w.ys().front() != 0.0 || w.ys().back() != 1.0) ok = false;
    for (std::size_t i = 0; i + 1 < w.knot_count(); ++i) {
        if (!(w.xs()[i] < w.xs()[i + 1])) ok = false;
        if (w.ys()[i + 1] < w.ys()[i]) ok = false;
    }
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

GridWarp random_grid_warp(RngStream& rng) {
    // psi_inverse of a random bounded trigonometric polynomial
    std::vector<double> h(kGridSize);
    double a1 = 2.0 * rng.uniform() - 1.0;
    double a2 = 2.0 * rng.uniform() - 1.0;
    double a3 = 2.0 * rng.uniform() - 1.0;
    for (std::size_t i = 0; i < kGridSize; ++i) {
        double t = grid_node(i, kGridSize);
        h[i] = a1 * fourier_basis(1, t) + a2 * fourier_basis(2, t) + a3 * fourier_basis(3, t);
    }
    return psi_inverse(HFunction(std::move(h)));
}

}  // namespace

SuiteResult run_structural_suite(const ValidateOptions& opts) {
    SuiteResult suite{"structural", {}};
    RngStream root(opts.master_seed, 50000);

    // --- fuzzed sampler calls produce valid paths ---
    {
        RngStream fuzz = root.split(0);
        bool ok = true;
        std::size_t count = 0;
        const std::size_t kFuzz = 10000;
        std::vector<TargetWarp> targets{TargetWarp::phi1(), TargetWarp::phi2(),
                                        TargetWarp::phi3()};
        while (count < kFuzz) {
            RngStream rs = fuzz.split(count);
            std::size_t n = 1 + static_cast<std::size_t>(rs.next_u64() % 64);
            double theta = std::exp(3.0 * (2.0 * rs.uniform() - 1.0));  // e^-3 .. e^3
            double p = 0.02 + 0.96 * rs.uniform();
            const TargetWarp& phi = targets[rs.next_u64() % targets.size()];
            WarpPath w = WarpPath::identity();
            switch (count % 5) {
                case 0: w = simulate_bk(BkConfig{n, theta, phi}, rs); break;
                case 1: w = simulate_cdf(CdfConfig{n, theta, p, phi}, rs); break;
                case 2: {
                    std::vector<double> grid(n + 2);
                    for (std::size_t i = 0; i < n + 2; ++i)
                        grid[i] = static_cast<double>(i) / static_cast<double>(n + 1);
                    grid.back() = 1.0;
                    w = simulate_cdh(n, grid, theta, rs);
                    break;
                }
                case 3: {
                    std::size_t m = 1 + n % 12;
                    std::vector<double> v(m);
                    for (std::size_t i = 0; i < m; ++i) v[i] = 1.0 / ((i + 1.0) * (i + 1.0));
                    w = simulate_mzw({m, theta, v, phi, nullptr}, rs);
                    break;
                }
                default: {
                    std::size_t m = 1 + n % 12;
                    std::vector<double> v(m);
                    for (std::size_t i = 0; i < m; ++i) v[i] = 0.5 / (i + 1.0);
                    w = simulate_mzw_original(m, v, rs);
                    break;
                }
            }
            check_path_valid(w, ok);
            ++count;
        }
        suite.checks.push_back(make_check("fuzz/10k_paths_valid", ok, ok ? 1.0 : 0.0, 1.0, ""));
    }

    // --- group-operation laws on random warps ---
    {
        RngStream rs = root.split(1);
        double worst_assoc = 0.0, worst_comm = 0.0, worst_ident = 0.0, worst_inv = 0.0;
        double worst_iso = 0.0, worst_round = 0.0;
        for (int rep = 0; rep < 25; ++rep) {
            GridWarp f = random_grid_warp(rs);
            GridWarp g = random_grid_warp(rs);
            GridWarp k = random_grid_warp(rs);
            GridWarp id = GridWarp::identity();

            worst_ident = std::max(worst_ident,
                                   max_abs_diff(gamma_plus(id, g).values(), g.values()));
            worst_inv = std::max(worst_inv,
                                 max_abs_diff(gamma_plus(f, gamma_scale(-1.0, f)).values(),
                                              id.values()));
            worst_assoc = std::max(worst_assoc,
                                   max_abs_diff(gamma_plus(gamma_plus(f, g), k).values(),
                                                gamma_plus(f, gamma_plus(g, k)).values()));
            worst_comm = std::max(worst_comm, max_abs_diff(gamma_plus(f, g).values(),
                                                           gamma_plus(g, f).values()));

            // the log-derivative map is an isometry
            HFunction hf = psi(f), hg = psi(g);
            std::vector<double> diff(hf.size());
            for (std::size_t i = 0; i < hf.size(); ++i)
                diff[i] = hf.values()[i] - hg.values()[i];
            double lhs = std::sqrt(HFunction(std::move(diff)).l2_norm_sq());
            GridWarp fg = gamma_minus(f, g);
            double rhs = std::sqrt(std::max(gamma_inner(fg, fg), 0.0));
            worst_iso = std::max(worst_iso, std::abs(lhs - rhs));

            // round trip through the isometry
            GridWarp back = psi_inverse(psi(f));
            worst_round = std::max(worst_round,
                                   max_abs_diff(back.values(), f.values()));
        }
        suite.checks.push_back(make_check("gamma/identity_law", worst_ident <= 1e-7,
                                          worst_ident, 1e-7, ""));
        suite.checks.push_back(make_check("gamma/inverse_law", worst_inv <= 1e-7, worst_inv,
                                          1e-7, ""));
        suite.checks.push_back(make_check("gamma/associative", worst_assoc <= 1e-7,
                                          worst_assoc, 1e-7, ""));
        suite.checks.push_back(make_check("gamma/commutative", worst_comm <= 1e-7, worst_comm,
                                          1e-7, ""));
        suite.checks.push_back(make_check("gamma/isometry", worst_iso <= 1e-6, worst_iso, 1e-6,
                                          ""));
        suite.checks.push_back(make_check("gamma/round_trip", worst_round <= 1e-7, worst_round,
                                          1e-7, ""));
    }

    // --- Dirichlet moment identity battery ---
    {
        const std::size_t M = 100000;
        const std::size_t n = 6;
        const double theta = 1.7;
        const double p = 0.3;
        const double nn = static_cast<double>(n);
        const double lam = 1.0 / (1.0 + theta);
        const std::size_t j = 3;  // interior index for the j-dependent identities

        RngStream rs = root.split(2);
        MomentAcc beta_j, beta_j_sq, beta_cross, beta_tilde, tilde_sq;
        MomentAcc beta_var, beta_cov;  // centered at the analytic mean 1/n
        MomentAcc g1, gj, gn1, g1_sq, gn1_sq, gj_sq, tg1, tg1_sq, tgj, tgj_sq, cross_g, cross_gn;
        double tgn1_dev = 0.0, beta_tilde_n1_dev = 0.0, tbn1_sq_dev = 0.0, tgn1_sq_dev = 0.0;
        for (std::size_t r = 0; r < M; ++r) {
            RngStream rr = rs.split(r);
            std::vector<double> params(n, theta / nn);
            auto beta = sample_dirichlet(params, rr);
            std::vector<double> tilde(n + 2, 0.0);
            for (std::size_t i = 1; i <= n; ++i) tilde[i] = tilde[i - 1] + beta[i - 1];
            tilde[n + 1] = tilde[n];  // beta_{n+1} = 0

            beta_j.add(beta[j - 1]);
            beta_j_sq.add(beta[j - 1] * beta[j - 1]);
            beta_cross.add(beta[j - 1] * beta[j]);
            beta_var.add((beta[j - 1] - 1.0 / nn) * (beta[j - 1] - 1.0 / nn));
            beta_cov.add((beta[j - 1] - 1.0 / nn) * (beta[j] - 1.0 / nn));
            beta_tilde.add(beta[j - 1] * tilde[j]);
            tilde_sq.add(tilde[j] * tilde[j]);
            beta_tilde_n1_dev = std::max(beta_tilde_n1_dev, std::abs(0.0 * tilde[n + 1]));
            tbn1_sq_dev = std::max(tbn1_sq_dev, std::abs(tilde[n + 1] * tilde[n + 1] - 1.0));

            auto gamma_at = [&](std::size_t jj) {
                double bj = (jj >= 1 && jj <= n) ? beta[jj - 1] : 0.0;
                double bjm = (jj >= 2 && jj <= n + 1) ? beta[jj - 2] : 0.0;
                return (1.0 - p) * bj + p * bjm;
            };
            double tg = 0.0;
            std::vector<double> tgs(n + 2, 0.0);
            for (std::size_t jj = 0; jj <= n + 1; ++jj) {
                tg += gamma_at(jj);
                tgs[jj] = tg;
            }
            g1.add(gamma_at(1));
            gj.add(gamma_at(j));
            gn1.add(gamma_at(n + 1));
            g1_sq.add(gamma_at(1) * gamma_at(1));
            gn1_sq.add(gamma_at(n + 1) * gamma_at(n + 1));
            gj_sq.add(gamma_at(j) * gamma_at(j));
            tg1.add(tgs[1]);
            tg1_sq.add(tgs[1] * tgs[1]);
            tgj.add(tgs[j]);
            tgj_sq.add(tgs[j] * tgs[j]);
            cross_g.add(gamma_at(j + 1) * tgs[j]);
            cross_gn.add(gamma_at(n + 1) * tgs[n]);
            tgn1_dev = std::max(tgn1_dev, std::abs(tgs[n + 1] - 1.0));
            tgn1_sq_dev = std::max(tgn1_sq_dev, std::abs(tgs[n + 1] * tgs[n + 1] - 1.0));
        }
        const double mix = lam / nn + (1.0 - lam) / (nn * nn);
        auto add = [&](const char* name, const MomentAcc& acc, double expected) {
            suite.checks.push_back(se_check(std::string("dirichlet/") + name, acc.mean(),
                                            expected, acc.se(), 4.0));
        };
        add("esp_beta", beta_j, 1.0 / nn);
        add("var_beta", beta_var, lam / nn - lam / (nn * nn));
        add("cov_beta", beta_cov, -lam / (nn * nn));
        add("mom_ord_2_beta", beta_j_sq, mix);
        add("esp_cross_beta", beta_cross, (1.0 - lam) / (nn * nn));
        add("esp_beta_tildebeta", beta_tilde, lam / nn + j * (1.0 - lam) / (nn * nn));
        add("mom_ord_2_tilde_beta", tilde_sq,
            j * lam / nn + static_cast<double>(j * j) * (1.0 - lam) / (nn * nn));
        suite.checks.push_back(make_check("dirichlet/esp_beta_tildebeta_n+1",
                                          beta_tilde_n1_dev <= 1e-12, beta_tilde_n1_dev, 1e-12,
                                          "exactly zero"));
        suite.checks.push_back(make_check("dirichlet/mom_ord_2_tilde_beta_n+1",
                                          tbn1_sq_dev <= 1e-9, tbn1_sq_dev, 1e-9,
                                          "exactly one"));
        add("esp_gamma_1", g1, (1.0 - p) / nn);
        add("esp_gamma_j", gj, 1.0 / nn);
        add("esp_gamma_n+1", gn1, p / nn);
        add("mom_ord_2_gamma_1", g1_sq, (1.0 - p) * (1.0 - p) * mix);
        add("mom_ord_2_gamma_n+1", gn1_sq, p * p * mix);
        add("mom_ord_2_gamma_j", gj_sq,
            (1.0 - 2.0 * p + 2.0 * p * p) * lam / nn + (1.0 - lam) / (nn * nn));
        add("esp_tilde_gamma_1", tg1, (1.0 - p) / nn);
        add("mom_ord_2_tilde_gamma_1", tg1_sq, (1.0 - p) * (1.0 - p) * mix);
        add("esp_tilde_gamma_j", tgj, (j - p) / nn);
        suite.checks.push_back(make_check("dirichlet/esp_tilde_gamma_n+1", tgn1_dev <= 1e-9,
                                          tgn1_dev, 1e-9, "exactly one"));
        suite.checks.push_back(make_check("dirichlet/mom_ord_2_tilde_gamma_n+1",
                                          tgn1_sq_dev <= 1e-9, tgn1_sq_dev, 1e-9,
                                          "exactly one"));
        add("mom_ord_2_tilde_gamma_j", tgj_sq,
            (j - 2.0 * p + p * p) * lam / nn + (j - p) * (j - p) * (1.0 - lam) / (nn * nn));
        add("esp_cross_gamma_tilde_gamma", cross_g,
            (p - p * p) * lam / nn + (j - p) * (1.0 - lam) / (nn * nn));
        add("esp_cross_gamma_tilde_gamma_n", cross_gn,
            p / nn - p * p * lam / nn - p * p * (1.0 - lam) / (nn * nn));
    }

    // --- conditional jump-height identities with a frozen abscissa grid ---
    {
        const std::size_t M = 100000;
        const std::size_t n = 6;
        const double theta = 1.7;
        const TargetWarp phi = TargetWarp::phi3();
        RngStream rs = root.split(3);
        RngStream grid_stream = rs.split(0);
        auto grid = sample_uniform_order_stats(n, grid_stream);
        std::vector<double> dphi(n + 1);
        std::vector<double> phis(n + 2);
        for (std::size_t i = 0; i < n + 2; ++i) phis[i] = phi(grid[i]);
        for (std::size_t i = 0; i < n + 1; ++i) dphi[i] = phis[i + 1] - phis[i];

        const std::size_t j = 3;
        const double lam = 1.0 / (1.0 + theta);
        double dj = dphi[j - 1], dj1 = dphi[j];
        MomentAcc aj, aj_sq, aj_var, cov_ij, tilde_j, tilde_j_sq, cross;
        for (std::size_t r = 0; r < M; ++r) {
            RngStream rr = rs.split(r + 1);
            auto alpha = bk_jump_heights(grid, theta, phi, rr);
            double tilde = 0.0;
            for (std::size_t i = 0; i < j; ++i) tilde += alpha[i];
            aj.add(alpha[j - 1]);
            aj_sq.add(alpha[j - 1] * alpha[j - 1]);
            aj_var.add((alpha[j - 1] - dj) * (alpha[j - 1] - dj));
            cov_ij.add((alpha[j - 1] - dj) * (alpha[j] - dj1));
            tilde_j.add(tilde);
            tilde_j_sq.add(tilde * tilde);
            cross.add(tilde * alpha[j]);
        }
        auto add = [&](const char* name, const MomentAcc& acc, double expected) {
            suite.checks.push_back(se_check(std::string("bk_conditional/") + name, acc.mean(),
                                            expected, acc.se(), 4.0));
        };
        add("prop_dir1", aj, dj);
        add("prop_dir2", aj_var, lam * dj - lam * dj * dj);
        add("prop_dir3", cov_ij, -lam * dj * dj1);
        add("mom_ord_2_alpha", aj_sq, lam * dj + (1.0 - lam) * dj * dj);
        add("esp_tilde_alpha", tilde_j, phis[j]);
        add("mom_ord_2_tilde_alpha", tilde_j_sq, lam * phis[j] + (1.0 - lam) * phis[j] * phis[j]);
        add("cross_esp", cross, (1.0 - lam) * dj1 * phis[j]);
    }

    return suite;
}

SuiteResult run_drift_suite(const ValidateOptions& opts) {
    SuiteResult suite{"drift", {}};
    // seven synthetic decades, hourly; last three shifted upward
    std::vector<SynthPeriodSpec> synth;
    std::vector<PeriodSpec> periods;
    const std::size_t count = 12000;
    std::vector<double> drifts{0.0, 0.0, 0.0, 0.0, 1.5, 2.0, 2.5};
    for (std::size_t i = 0; i < drifts.size(); ++i) {
        std::int64_t start = parse_iso8601(std::to_string(1953 + 10 * i) + "-01-01");
        SynthPeriodSpec s;
        s.label = "period" + std::to_string(i + 1);
        s.start = start;
        s.count = count;
        s.location_shift = drifts[i];
        s.scale = 1.0;
        synth.push_back(s);
        periods.push_back({s.label, start, start + static_cast<std::int64_t>(count) * 3600});
    }
    RngStream rng(opts.master_seed, 60000);
    auto records = synthesize_temperature(synth, rng);

    AnalyzeOptions aopts;
    aopts.m = 50;
    aopts.B = 100;
    aopts.alpha = 0.05;
    aopts.master_seed = opts.master_seed + 61000;
    // reference: periods 3-4 pooled
    std::int64_t ref_start = periods[2].start;
    std::int64_t ref_end = periods[3].end;
    auto results = analyze_periods(records, ref_start, ref_end, periods, aopts);
    auto results2 = analyze_periods(records, ref_start, ref_end, periods, aopts);

    bool identical = true;
    for (std::size_t i = 0; i < results.size(); ++i) {
        if (results[i].band.half_width != results2[i].band.half_width) identical = false;
        for (std::size_t k = 0; k < results[i].band.phi_hat.size(); ++k)
            if (results[i].band.phi_hat[k] != results2[i].band.phi_hat[k]) identical = false;
    }
    suite.checks.push_back(make_check("pipeline/deterministic", identical,
                                      identical ? 1.0 : 0.0, 1.0, "bit-identical re-run"));

    for (std::size_t i = 0; i < results.size(); ++i) {
        const auto& band = results[i].band;
        double h = band.half_width;
        bool drifted = drifts[i] > 0.0;
        if (drifted) {
            // band strictly above zero somewhere in the interior
            double best = 0.0;
            for (std::size_t k = 0; k < band.grid.size(); ++k) {
                if (band.grid[k] < 0.05 || band.grid[k] > 0.95) continue;
                best = std::max(best, band.centered[k] - h);
            }
            suite.checks.push_back(make_check(results[i].label + "/band_above_zero", best > 0.0,
                                              best, 0.0,
                                              "max interior lower bound"));
        } else {
            double worst = 0.0;
            for (std::size_t k = 0; k < band.grid.size(); ++k) {
                double lo = band.centered[k] - h, hi = band.centered[k] + h;
                if (lo > 0.0) worst = std::max(worst, lo);
                if (hi < 0.0) worst = std::max(worst, -hi);
            }
            suite.checks.push_back(make_check(results[i].label + "/band_contains_zero",
                                              worst == 0.0, worst, 0.0, ""));
        }
    }
    return suite;
}

SuiteResult run_convergence_suite(const ValidateOptions& opts) {
    SuiteResult suite{"convergence", {}};
    const TargetWarp phi = TargetWarp::phi3();
    auto grid = default_grid();
    for (const char* algo : {"bk", "cdf"}) {
        PolygonAlgorithm a =
            std::string(algo) == "bk" ? PolygonAlgorithm::bk : PolygonAlgorithm::cdf;
        std::vector<std::size_t> sizes{5, 25, 200};
        // reference the target itself (the asymptote): record per-point errors
        std::vector<std::vector<double>> errs;
        for (std::size_t idx = 0; idx < sizes.size(); ++idx) {
            StudySpec spec;
            if (a == PolygonAlgorithm::bk)
                spec = make_study(BkConfig{sizes[idx], 1.0, phi}, 2000, grid,
                                  opts.master_seed + 70000);
            else
                spec = make_study(CdfConfig{sizes[idx], 1.0, 0.5, phi}, 2000, grid,
                                  opts.master_seed + 70000);
            spec.stream_base = idx + 10 * (a == PolygonAlgorithm::cdf ? 2 : 1);
            spec.threads = opts.threads;
            auto st = run_study(spec);
            std::vector<double> e(grid.size());
            for (std::size_t i = 0; i < grid.size(); ++i)
                e[i] = std::abs(st.empirical.mean[i] - phi(grid[i]));
            errs.push_back(std::move(e));
        }
        bool pointwise = true;
        double worst_gap = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            if (errs.back()[i] >= errs.front()[i]) {
                pointwise = false;
                worst_gap = std::max(worst_gap, errs.back()[i] - errs.front()[i]);
            }
        }
        suite.checks.push_back(make_check(std::string(algo) + "/mean_error_shrinks_pointwise",
                                          pointwise, worst_gap, 0.0,
                                          "n=200 error below n=5 error at every grid point"));
    }
    return suite;
}

SuiteResult run_theta_sweep_suite(const ValidateOptions& opts) {
    SuiteResult suite{"theta-sweep", {}};
    const TargetWarp phi = TargetWarp::phi3();
    const std::vector<double> grid{0.5};
    const std::vector<double> thetas{0.1, 1.0, 50.0};
    for (const char* algo : {"bk", "cdf", "mzw"}) {
        std::vector<double> vars;
        for (std::size_t idx = 0; idx < thetas.size(); ++idx) {
            StudySpec spec;
            if (std::string(algo) == "bk") {
                spec = make_study(BkConfig{15, thetas[idx], phi}, 250, grid,
                                  opts.master_seed + 80000);
            } else if (std::string(algo) == "cdf") {
                spec = make_study(CdfConfig{15, thetas[idx], 0.5, phi}, 250, grid,
                                  opts.master_seed + 80000);
            } else {
                MzwConfig cfg;
                cfg.m = 15;
                cfg.theta = thetas[idx];
                cfg.v.assign(15, 0.0);
                for (std::size_t i = 0; i < 15; ++i) cfg.v[i] = 1.0 / ((i + 1.0) * (i + 1.0));
                cfg.target = phi;
                spec = make_study(cfg, 250, grid, opts.master_seed + 80000);
            }
            spec.stream_base = idx + 1;
            auto st = run_study(spec);
            vars.push_back(st.empirical.variance[0]);
        }
        bool decreasing = vars[0] > vars[1] && vars[1] > vars[2];
        std::ostringstream d;
        d.precision(6);
        d << "var(t=0.5) over theta {0.1,1,50}:";
        for (double v : vars) d << ' ' << v;
        suite.checks.push_back(make_check(std::string(algo) + "/variance_decreasing_in_theta",
                                          decreasing, vars.back(), vars.front(), d.str()));
    }
    return suite;
}

SuiteResult run_suite_by_name(const std::string& name, const ValidateOptions& opts) {
    if (name == "moments") return run_moments_suite(opts);
    if (name == "rates") return run_rates_suite(opts);
    if (name == "l2") return run_l2_suite(opts);
    if (name == "frechet") return run_frechet_suite(opts);
    if (name == "mzw-limit") return run_mzw_limit_suite(opts);
    if (name == "table2") return run_table2_suite(opts);
    if (name == "structural") return run_structural_suite(opts);
    if (name == "drift") return run_drift_suite(opts);
    if (name == "convergence") return run_convergence_suite(opts);
    if (name == "theta-sweep") return run_theta_sweep_suite(opts);
    throw InvalidParameterError("unknown validation suite: " + name);
}

std::string suite_json(const SuiteResult& suite) {
    std::ostringstream os;
    os.precision(17);
    os << "{\"suite\":\"" << suite.suite << "\",\"passed\":"
       << (suite.all_passed() ? "true" : "false") << ",\"checks\":[";
    for (std::size_t i = 0; i < suite.checks.size(); ++i) {
        const auto& c = suite.checks[i];
        if (i) os << ',';
        os << "{\"name\":\"" << c.name << "\",\"passed\":" << (c.passed ? "true" : "false")
           << ",\"measured\":" << c.measured << ",\"tolerance\":" << c.tolerance
           << ",\"details\":\"" << c.details << "\"}";
    }
    os << "]}";
    return os.str();
}

}  // namespace warpsim
