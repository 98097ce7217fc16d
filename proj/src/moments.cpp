#include "warpsim/moments.hpp"

#include <array>
#include <cmath>
#include <functional>
#include <ostream>

#include "warpsim/errors.hpp"
#include "warpsim/quadrature.hpp"

namespace warpsim {

namespace {

void check_oracle_args(double t, std::size_t n) {
    if (!(t > 0.0 && t < 1.0)) throw DomainError("exact oracle: t must be in (0,1)");
    if (n < 1) throw InvalidParameterError("exact oracle: n must be >= 1");
    if (n > kExactOracleMaxN)
        throw UnsupportedParameterError(
            "exact oracle: n exceeds the cost guard (128); use the asymptotic profile");
}

// The pair densities of consecutive order statistics summed over j collapse by
// the binomial theorem. With s = 1 + u - v in (0,1]:
//   sum_j f_j(u,v)   = n(n-1) s^(n-2)
//   sum_j j f_j(u,v) = n(n-1) [ (n-2) u s^(n-3) + s^(n-2) ]
// Powers evaluated in log space so deep tails underflow to zero gracefully.
struct KernelSums {
    double w0;
    double w1;
};

KernelSums kernel_sums(std::size_t n, double u, double v) {
    const double s = 1.0 + u - v;
    if (s <= 0.0) return {0.0, 0.0};
    const double nn = static_cast<double>(n);
    const double ls = std::log(s);
    double pow_nm2 = std::exp((nn - 2.0) * ls);
    double w0 = nn * (nn - 1.0) * pow_nm2;
    double w1 = w0;  // the s^(n-2) part of the j-weighted sum
    if (n >= 3) w1 += nn * (nn - 1.0) * (nn - 2.0) * u * std::exp((nn - 3.0) * ls);
    return {w0, w1};
}

// 2D integrals of K smooth integrands against both kernel sums over
// [0,A] x [A,1], tensor Gauss-Legendre on panels graded toward the corner
// (A,A) where the kernels concentrate. Refined until converged.
template <std::size_t K>
struct MiddleIntegrals {
    std::array<double, K> w0{};
    std::array<double, K> w1{};
};

template <std::size_t K, typename Smooth>
MiddleIntegrals<K> middle_pass(std::size_t n, double A, const Smooth& smooth,
                               const std::function<double(double)>& map, int panels,
                               int order) {
    std::vector<double> gl_x, gl_w;
    gauss_legendre(order, gl_x, gl_w);

    auto build = [&](double a, double b, double toward) {
        auto edges = graded_edges(a, b, panels, toward);
        std::vector<std::array<double, 3>> nodes;  // x, weight, mapped
        nodes.reserve(static_cast<std::size_t>(order) * panels);
        for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
            double c = 0.5 * (edges[p] + edges[p + 1]);
            double h = 0.5 * (edges[p + 1] - edges[p]);
            if (h <= 0.0) continue;
            for (int i = 0; i < order; ++i) {
                double x = c + h * gl_x[i];
                nodes.push_back({x, h * gl_w[i], map ? map(x) : x});
            }
        }
        return nodes;
    };

    auto un = build(0.0, A, A);
    auto vn = build(A, 1.0, A);

    MiddleIntegrals<K> out;
    std::array<double, K> s{};
    for (const auto& [u, wu, mu] : un) {
        for (const auto& [v, wv, mv] : vn) {
            KernelSums ks = kernel_sums(n, u, v);
            if (ks.w0 == 0.0 && ks.w1 == 0.0) continue;
            smooth(u, v, mu, mv, s);
            const double w2 = wu * wv;
            for (std::size_t k = 0; k < K; ++k) {
                out.w0[k] += w2 * ks.w0 * s[k];
                out.w1[k] += w2 * ks.w1 * s[k];
            }
        }
    }
    return out;
}

template <std::size_t K, typename Smooth>
MiddleIntegrals<K> middle_integrals(std::size_t n, double A, const Smooth& smooth,
                                    const std::function<double(double)>& map) {
    if (n < 2) return {};
    const int order = 16;
    int panels = std::max(8, static_cast<int>(std::ceil(std::log2(static_cast<double>(n)))) + 4);
    auto coarse = middle_pass<K>(n, A, smooth, map, panels, order);
    for (int bump = 0; bump < 4; ++bump) {
        auto fine = middle_pass<K>(n, A, smooth, map, panels + 3, order);
        double diff = 0.0;
        for (std::size_t k = 0; k < K; ++k) {
            diff = std::max(diff, std::abs(fine.w0[k] - coarse.w0[k]));
            diff = std::max(diff, std::abs(fine.w1[k] - coarse.w1[k]));
        }
        if (diff <= 1e-9) return fine;
        coarse = fine;
        panels += 3;
        if (bump == 3)
            throw AccuracyError("exact oracle: 2D quadrature did not converge", coarse.w0[0],
                                diff);
    }
    return coarse;
}

double beta_mix(std::size_t n, double theta) {
    // lambda/n + mu/n^2 with lambda = 1/(1+theta), mu = theta/(1+theta)
    const double nn = static_cast<double>(n);
    const double lambda = 1.0 / (1.0 + theta);
    return lambda / nn + (1.0 - lambda) / (nn * nn);
}

}  // namespace

double bk_mean_exact(double t, std::size_t n, const TargetWarp& target) {
    check_oracle_args(t, n);
    const double nn = static_cast<double>(n);
    auto lower_density = [nn](double u) { return nn * std::pow(1.0 - u, nn - 1.0); };
    auto upper_density = [nn](double v) { return nn * std::pow(v, nn - 1.0); };

    double first = integrate_gk(
        [&](double u) { return (t / u) * target(u) * lower_density(u); }, t, 1.0);
    double last = integrate_gk(
        [&](double v) {
            return (1.0 - (1.0 - target(v)) * (1.0 - t) / (1.0 - v)) * upper_density(v);
        },
        0.0, t);

    double mid = 0.0;
    if (n >= 2) {
        auto smooth = [&](double u, double v, double pu, double pv, std::array<double, 1>& s) {
            double r = (t - u) / (v - u);
            s[0] = pu + r * (pv - pu);
        };
        auto res = middle_integrals<1>(n, t, smooth,
                                       [&](double x) { return target(x); });
        mid = res.w0[0];
    }
    return first + mid + last;
}

double bk_var_exact(double t, std::size_t n, double theta, const TargetWarp& target) {
    check_oracle_args(t, n);
    if (!(theta > 0.0)) throw InvalidParameterError("bk_var_exact: theta must be > 0");
    const double nn = static_cast<double>(n);
    const double lambda = 1.0 / (1.0 + theta);
    const double mu = 1.0 - lambda;
    auto lower_density = [nn](double u) { return nn * std::pow(1.0 - u, nn - 1.0); };
    auto upper_density = [nn](double v) { return nn * std::pow(v, nn - 1.0); };

    // E[A_0^2]
    double a0_lin = integrate_gk(
        [&](double u) {
            double q = t / u;
            return q * q * target(u) * lower_density(u);
        },
        t, 1.0);
    double a0_sq = integrate_gk(
        [&](double u) {
            double q = t / u, f = target(u);
            return q * q * f * f * lower_density(u);
        },
        t, 1.0);
    double ea0sq = lambda * a0_lin + mu * a0_sq;

    // E[A_n^2]
    double an_cross = integrate_gk(
        [&](double v) {
            return ((1.0 - t) / (1.0 - v)) * (1.0 - target(v)) * upper_density(v);
        },
        0.0, t);
    double an_lin = integrate_gk(
        [&](double v) {
            double q = (1.0 - t) / (1.0 - v);
            return q * q * (1.0 - target(v)) * upper_density(v);
        },
        0.0, t);
    double an_sq = integrate_gk(
        [&](double v) {
            double q = (1.0 - t) / (1.0 - v), g = 1.0 - target(v);
            return q * q * g * g * upper_density(v);
        },
        0.0, t);
    double eansq = std::pow(t, nn) - 2.0 * an_cross + lambda * an_lin + mu * an_sq;

    // sum_j E[A_j^2]
    double emidsq = 0.0;
    if (n >= 2) {
        auto smooth = [&](double u, double v, double pu, double pv, std::array<double, 5>& s) {
            double r = (t - u) / (v - u);
            double d = pv - pu;
            s[0] = pu;
            s[1] = pu * pu;
            s[2] = r * d * pu;
            s[3] = d * r * r;
            s[4] = d * d * r * r;
        };
        auto res = middle_integrals<5>(n, t, smooth,
                                       [&](double x) { return target(x); });
        emidsq = lambda * res.w0[0] + mu * res.w0[1] + 2.0 * mu * res.w0[2] +
                 lambda * res.w0[3] + mu * res.w0[4];
    }

    double mean = bk_mean_exact(t, n, target);
    return ea0sq + emidsq + eansq - mean * mean;
}

namespace {

struct CdfPieces {
    double mean;
    double t0;   // int int r W0 (0 when n < 2)
    double t1;   // int int r W1
    double t2;   // int int r^2 W0
    double c1, c2, d1, d2;
};

CdfPieces cdf_pieces(double t, std::size_t n, double p, const TargetWarp& target,
                     bool need_var) {
    const double nn = static_cast<double>(n);
    const double F = target(t);
    auto inv = [&](double x) { return target.inverse(x); };
    auto lower_density = [nn](double u) { return nn * std::pow(1.0 - u, nn - 1.0); };
    auto upper_density = [nn](double v) { return nn * std::pow(v, nn - 1.0); };

    CdfPieces out{};
    out.c1 = integrate_gk([&](double u) { return (t / inv(u)) * lower_density(u); }, F, 1.0);
    out.d1 = integrate_gk(
        [&](double v) { return ((1.0 - t) / (1.0 - inv(v))) * upper_density(v); }, 0.0, F);
    if (need_var) {
        out.c2 = integrate_gk(
            [&](double u) {
                double q = t / inv(u);
                return q * q * lower_density(u);
            },
            F, 1.0);
        out.d2 = integrate_gk(
            [&](double v) {
                double q = (1.0 - t) / (1.0 - inv(v));
                return q * q * upper_density(v);
            },
            0.0, F);
    }

    if (n >= 2) {
        auto smooth = [&](double, double, double iu, double iv, std::array<double, 2>& s) {
            double r = (t - iu) / (iv - iu);
            s[0] = r;
            s[1] = r * r;
        };
        auto res = middle_integrals<2>(n, F, smooth, inv);
        out.t0 = res.w0[0];
        out.t1 = res.w1[0];
        out.t2 = res.w0[1];
    }

    const double Fn = std::pow(F, nn);
    const double Gn = std::pow(1.0 - F, nn);
    double mid_closed = (nn * F - nn * Fn - p * (1.0 - Fn - Gn)) / nn;
    out.mean = ((1.0 - p) / nn) * out.c1 + mid_closed + out.t0 / nn + (Fn - (p / nn) * out.d1);
    return out;
}

}  // namespace

double cdf_mean_exact(double t, std::size_t n, double p, const TargetWarp& target) {
    check_oracle_args(t, n);
    if (!(p > 0.0 && p < 1.0)) throw InvalidParameterError("cdf_mean_exact: p must be in (0,1)");
    return cdf_pieces(t, n, p, target, /*need_var=*/false).mean;
}

double cdf_var_exact(double t, std::size_t n, double theta, double p, const TargetWarp& target) {
    check_oracle_args(t, n);
    if (!(theta > 0.0)) throw InvalidParameterError("cdf_var_exact: theta must be > 0");
    if (!(p > 0.0 && p < 1.0)) throw InvalidParameterError("cdf_var_exact: p must be in (0,1)");
    const double nn = static_cast<double>(n);
    const double lambda = 1.0 / (1.0 + theta);
    const double mu = 1.0 - lambda;
    const double F = target(t);
    const double Fn = std::pow(F, nn);
    const double Gn = std::pow(1.0 - F, nn);

    CdfPieces pc = cdf_pieces(t, n, p, target, /*need_var=*/true);

    double eb0sq = (1.0 - p) * (1.0 - p) * beta_mix(n, theta) * pc.c2;
    double ebnsq = Fn - (2.0 * p / nn) * pc.d1 + p * p * beta_mix(n, theta) * pc.d2;

    // closed-form indicator sums (order statistics of the transformed grid)
    double sum_pj = 1.0 - Fn - Gn;
    double sum_j_pj = nn * F - nn * Fn;
    double sum_jp2_pj = nn * (nn - 1.0) * F * F - (nn - p) * (nn - p) * Fn +
                        nn * (1.0 - 2.0 * p) * F + p * p - p * p * Gn;

    double tilde_sq = (lambda / nn) * (sum_j_pj - (2.0 * p - p * p) * sum_pj) +
                      (mu / (nn * nn)) * sum_jp2_pj;
    double cross = 2.0 * ((lambda / nn) * (p - p * p) * pc.t0 +
                          (mu / (nn * nn)) * (pc.t1 - p * pc.t0));
    double gamma_sq = ((lambda / nn) * (1.0 - 2.0 * p + 2.0 * p * p) + mu / (nn * nn)) * pc.t2;

    double ebmidsq = tilde_sq + cross + gamma_sq;
    return eb0sq + ebmidsq + ebnsq - pc.mean * pc.mean;
}

MomentProfile asymptotic_profile(const std::vector<double>& grid, double theta,
                                 const TargetWarp& target) {
    if (!(theta > 0.0)) throw InvalidParameterError("asymptotic_profile: theta must be > 0");
    MomentProfile prof;
    prof.grid = grid;
    prof.kind = "asymptotic";
    prof.theta = theta;
    prof.mean.reserve(grid.size());
    prof.variance.reserve(grid.size());
    for (double t : grid) {
        if (!(t >= 0.0 && t <= 1.0)) throw DomainError("asymptotic_profile: grid outside [0,1]");
        double f = target(t);
        prof.mean.push_back(f);
        prof.variance.push_back(f * (1.0 - f) / (1.0 + theta));
    }
    return prof;
}

double l2_risk_limit(double theta, const TargetWarp& target) {
    if (!(theta > 0.0) && theta != 0.0)
        throw InvalidParameterError("l2_risk_limit: theta must be >= 0");
    double integral = integrate_gk(
        [&](double t) {
            double f = target(t);
            return f * (1.0 - f);
        },
        0.0, 1.0, 1e-12);
    return integral / (1.0 + theta);
}

double mzw_frechet_variance(const std::vector<double>& v, double theta) {
    if (theta < 0.0) throw InvalidParameterError("mzw_frechet_variance: theta must be >= 0");
    double sum = 0.0;
    for (double vi : v) {
        if (!(vi > 0.0)) throw InvalidParameterError("mzw_frechet_variance: v_i must be > 0");
        sum += vi;
    }
    return sum / (1.0 + theta);
}

void MomentProfile::finalize() {
    if (grid.size() != mean.size() || grid.size() != variance.size())
        throw InvalidParameterError("MomentProfile: mismatched lengths");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (variance[i] < -1e-10)
            throw InvalidParameterError("MomentProfile: negative variance beyond slack");
        if (variance[i] < 0.0) variance[i] = 0.0;
        if (mean[i] < -1e-8 || mean[i] > 1.0 + 1e-8)
            throw InvalidParameterError("MomentProfile: mean outside [0,1]");
    }
}

void write_profile_csv(std::ostream& os, const MomentProfile& profile) {
    os << "t,mean,variance,kind\n";
    os.precision(17);
    for (std::size_t i = 0; i < profile.grid.size(); ++i)
        os << profile.grid[i] << ',' << profile.mean[i] << ',' << profile.variance[i] << ','
           << profile.kind << '\n';
}

}  // namespace warpsim
