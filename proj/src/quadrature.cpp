#include "warpsim/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace warpsim {

namespace {

// (G7,K15) abscissae/weights, positive half (QUADPACK values).
constexpr double kXgk[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.0};
constexpr double kWgk[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
constexpr double kWg[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

struct GkEstimate {
    double kronrod;
    double err;
};

GkEstimate gk15(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const double fc = f(c);
    double gauss = fc * kWg[3];
    double kron = fc * kWgk[7];
    for (int i = 0; i < 7; ++i) {
        double x = h * kXgk[i];
        double fsum = f(c - x) + f(c + x);
        kron += fsum * kWgk[i];
        if (i % 2 == 1) gauss += fsum * kWg[i / 2];
    }
    kron *= h;
    gauss *= h;
    return {kron, std::abs(kron - gauss)};
}

}  // namespace

double integrate_gk(const std::function<double(double)>& f, double a, double b,
                    double abs_tol, int max_segments) {
    if (a == b) return 0.0;
    struct Seg {
        double a, b, val, err;
        bool operator<(const Seg& o) const { return err < o.err; }
    };
    std::vector<Seg> heap;
    auto push = [&](double lo, double hi) {
        GkEstimate e = gk15(f, lo, hi);
        heap.push_back({lo, hi, e.kronrod, e.err});
        std::push_heap(heap.begin(), heap.end());
    };
    push(a, b);
    double total_err = heap.front().err;
    double total_val = heap.front().val;
    while (static_cast<int>(heap.size()) < max_segments) {
        if (total_err <= std::max(abs_tol, 1e-13 * std::abs(total_val))) break;
        std::pop_heap(heap.begin(), heap.end());
        Seg worst = heap.back();
        heap.pop_back();
        double m = 0.5 * (worst.a + worst.b);
        if (m <= worst.a || m >= worst.b) {  // cannot split further
            heap.push_back(worst);
            std::push_heap(heap.begin(), heap.end());
            break;
        }
        push(worst.a, m);
        push(m, worst.b);
        total_val = 0.0;
        total_err = 0.0;
        for (const auto& s : heap) {
            total_val += s.val;
            total_err += s.err;
        }
    }
    if (total_err > std::max(10.0 * abs_tol, 1e-9 * std::abs(total_val)))
        throw AccuracyError("integrate_gk: tolerance not reached", total_val, total_err);
    return total_val;
}

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    nodes.assign(n, 0.0);
    weights.assign(n, 0.0);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double z1, pp;
        do {
            double p1 = 1.0, p2 = 0.0;
            for (int j = 0; j < n; ++j) {
                double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1);
            }
            pp = n * (z * p1 - p2) / (z * z - 1.0);
            z1 = z;
            z = z1 - p1 / pp;
        } while (std::abs(z - z1) > 1e-15);
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        weights[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        weights[n - 1 - i] = weights[i];
    }
}

std::vector<double> graded_edges(double a, double b, int panels, double toward) {
    std::vector<double> edges;
    edges.reserve(panels + 1);
    const double len = b - a;
    if (toward == b) {
        edges.push_back(a);
        for (int i = panels - 1; i >= 1; --i) edges.push_back(b - len * std::ldexp(1.0, -(panels - i)));
        edges.push_back(b);
    } else {
        edges.push_back(a);
        for (int i = 1; i < panels; ++i) edges.push_back(a + len * std::ldexp(1.0, -(panels - i)));
        edges.push_back(b);
    }
    std::sort(edges.begin(), edges.end());
    return edges;
}

namespace {

struct Axis {
    std::vector<double> x;       // node positions
    std::vector<double> w;       // node weights
    std::vector<double> mapped;  // map(x)
    std::vector<double> lg;      // log(x) or log(1-x), precomputed by caller
};

Axis build_axis(double a, double b, int panels, double toward, int order,
                const std::function<double(double)>& map) {
    std::vector<double> gl_x, gl_w;
    gauss_legendre(order, gl_x, gl_w);
    auto edges = graded_edges(a, b, panels, toward);
    Axis axis;
    axis.x.reserve(order * panels);
    axis.w.reserve(order * panels);
    for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
        double c = 0.5 * (edges[p] + edges[p + 1]);
        double h = 0.5 * (edges[p + 1] - edges[p]);
        if (h <= 0.0) continue;
        for (int i = 0; i < order; ++i) {
            axis.x.push_back(c + h * gl_x[i]);
            axis.w.push_back(h * gl_w[i]);
        }
    }
    axis.mapped.resize(axis.x.size());
    for (std::size_t i = 0; i < axis.x.size(); ++i)
        axis.mapped[i] = map ? map(axis.x[i]) : axis.x[i];
    return axis;
}

std::vector<std::vector<double>> jsum_pass(
    int n, double ua, double ub, double va, double vb,
    const std::function<double(double)>& map_u,
    const std::function<double(double)>& map_v,
    const std::function<void(double, double, double, double, double*)>& smooth,
    int K, int panels, int order) {
    const int nj = n - 1;
    // log n! - log (j-1)! - log (n-j-1)! for j = 1..n-1
    std::vector<double> log_coeff(nj);
    const double lognf = std::lgamma(n + 1.0);
    for (int j = 1; j <= nj; ++j)
        log_coeff[j - 1] = lognf - std::lgamma(static_cast<double>(j)) -
                           std::lgamma(static_cast<double>(n - j));

    // mass of u^(j-1) concentrates at ub, of (1-v)^(n-j-1) at va
    Axis au = build_axis(ua, ub, panels, ub, order, map_u);
    Axis av = build_axis(va, vb, panels, va, order, map_v);
    au.lg.resize(au.x.size());
    for (std::size_t i = 0; i < au.x.size(); ++i) au.lg[i] = std::log(au.x[i]);
    av.lg.resize(av.x.size());
    for (std::size_t i = 0; i < av.x.size(); ++i) av.lg[i] = std::log1p(-av.x[i]);

    std::vector<std::vector<double>> acc(nj, std::vector<double>(K, 0.0));
    std::vector<double> s(K);
    for (std::size_t iu = 0; iu < au.x.size(); ++iu) {
        const double u = au.x[iu];
        const double lu = au.lg[iu];
        for (std::size_t iv = 0; iv < av.x.size(); ++iv) {
            const double v = av.x[iv];
            const double w2 = au.w[iu] * av.w[iv];
            smooth(u, v, au.mapped[iu], av.mapped[iv], s.data());
            const double lv = av.lg[iv];
            for (int j = 1; j <= nj; ++j) {
                double lk = log_coeff[j - 1] + (j - 1) * lu + (n - j - 1) * lv;
                if (lk < -700.0) continue;
                double kw = std::exp(lk) * w2;
                auto& row = acc[j - 1];
                for (int k = 0; k < K; ++k) row[k] += kw * s[k];
            }
        }
    }
    return acc;
}

}  // namespace

JsumResult integrate_jsum_2d(
    int n, double ua, double ub, double va, double vb,
    const std::function<double(double)>& map_u,
    const std::function<double(double)>& map_v,
    const std::function<void(double, double, double, double, double*)>& smooth,
    int K, double rel_tol) {
    if (n < 2 || ub <= ua || vb <= va) return {{}, 0.0};
    const int order = 16;
    int panels = std::max(6, static_cast<int>(std::ceil(std::log2(static_cast<double>(n)))) + 3);

    auto coarse = jsum_pass(n, ua, ub, va, vb, map_u, map_v, smooth, K, panels, order);
    for (int bump = 0; bump < 3; ++bump) {
        auto fine = jsum_pass(n, ua, ub, va, vb, map_u, map_v, smooth, K, panels + 3, order);
        double diff = 0.0, scale = 0.0;
        for (std::size_t j = 0; j < fine.size(); ++j) {
            for (int k = 0; k < K; ++k) {
                diff = std::max(diff, std::abs(fine[j][k] - coarse[j][k]));
                scale = std::max(scale, std::abs(fine[j][k]));
            }
        }
        if (diff <= rel_tol * std::max(1.0, scale)) return {std::move(fine), diff};
        coarse = std::move(fine);
        panels += 3;
        if (bump == 2) {
            throw AccuracyError("integrate_jsum_2d: tolerance not reached",
                                coarse[0].empty() ? 0.0 : coarse[0][0], diff);
        }
    }
    return {std::move(coarse), 0.0};  // unreachable
}

}  // namespace warpsim
