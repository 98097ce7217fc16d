#include "warpsim/gamma_space.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "warpsim/errors.hpp"

namespace warpsim {

double grid_node(std::size_t i, std::size_t size) {
    return static_cast<double>(i) / static_cast<double>(size - 1);
}

std::vector<double> uniform_grid(std::size_t size) {
    std::vector<double> g(size);
    for (std::size_t i = 0; i < size; ++i) g[i] = grid_node(i, size);
    g.back() = 1.0;
    return g;
}

double trapezoid(const std::vector<double>& values) {
    const std::size_t n = values.size();
    if (n < 2) throw InvalidParameterError("trapezoid: need at least 2 nodes");
    double sum = 0.5 * (values.front() + values.back());
    for (std::size_t i = 1; i + 1 < n; ++i) sum += values[i];
    return sum / static_cast<double>(n - 1);
}

HFunction::HFunction(std::vector<double> values) : values_(std::move(values)) {
    if (values_.size() < 2) throw InvalidElementError("HFunction: need at least 2 nodes");
    for (double v : values_)
        if (!std::isfinite(v)) throw InvalidElementError("HFunction: non-finite value");
    // values represent the mean-zero class: center at construction (idempotent)
    double mean = trapezoid(values_);
    if (mean != 0.0)
        for (auto& v : values_) v -= mean;
}

double HFunction::l2_norm_sq() const {
    std::vector<double> sq(values_.size());
    for (std::size_t i = 0; i < values_.size(); ++i) sq[i] = values_[i] * values_[i];
    return trapezoid(sq);
}

GridWarp::GridWarp(std::vector<double> derivative) : deriv_(std::move(derivative)) {
    if (deriv_.size() < 2) throw InvalidElementError("GridWarp: need at least 2 nodes");
    for (double d : deriv_)
        if (!(d > 0.0) || !std::isfinite(d))
            throw InvalidElementError("GridWarp: derivative must be positive and finite");
}

GridWarp GridWarp::identity(std::size_t size) {
    return GridWarp(std::vector<double>(size, 1.0));
}

GridWarp GridWarp::from_target(const TargetWarp& target, std::size_t size) {
    std::vector<double> d(size);
    for (std::size_t i = 0; i < size; ++i)
        d[i] = std::max(target.derivative(grid_node(i, size)), 1e-12);
    return GridWarp(std::move(d));
}

GridWarp GridWarp::from_path(const WarpPath& path, std::size_t size) {
    const auto& xs = path.xs();
    const auto& ys = path.ys();
    std::vector<double> d(size);
    std::size_t seg = 0;
    for (std::size_t i = 0; i < size; ++i) {
        double t = grid_node(i, size);
        while (seg + 2 < xs.size() && xs[seg + 1] <= t) ++seg;
        double slope = (ys[seg + 1] - ys[seg]) / (xs[seg + 1] - xs[seg]);
        d[i] = std::max(slope, 1e-12);
    }
    return GridWarp(std::move(d));
}

std::vector<double> GridWarp::values() const {
    const std::size_t n = deriv_.size();
    std::vector<double> v(n, 0.0);
    const double h = 1.0 / static_cast<double>(n - 1);
    for (std::size_t i = 1; i < n; ++i)
        v[i] = v[i - 1] + 0.5 * h * (deriv_[i - 1] + deriv_[i]);
    double total = v.back();
    for (auto& x : v) x /= total;
    v.front() = 0.0;
    v.back() = 1.0;
    return v;
}

WarpPath GridWarp::to_path() const {
    auto ys = values();
    auto xs = uniform_grid(deriv_.size());
    // cumulative sums of a positive derivative can still produce float-equal
    // neighbours; nudge them apart so the path stays a valid warp
    for (std::size_t i = 1; i + 1 < ys.size(); ++i)
        if (ys[i] < ys[i - 1]) ys[i] = ys[i - 1];
    return WarpPath(std::move(xs), std::move(ys));
}

namespace {

void check_same_grid(std::size_t a, std::size_t b) {
    if (a != b) throw InvalidElementError("grid operations need a common grid size");
}

}  // namespace

GridWarp gamma_plus(const GridWarp& f, const GridWarp& g) {
    check_same_grid(f.size(), g.size());
    std::vector<double> d(f.size());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = f.derivative()[i] * g.derivative()[i];
    double total = trapezoid(d);
    for (auto& x : d) x /= total;
    return GridWarp(std::move(d));
}

GridWarp gamma_scale(double a, const GridWarp& f) {
    std::vector<double> d(f.size());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = std::pow(f.derivative()[i], a);
    double total = trapezoid(d);
    for (auto& x : d) x /= total;
    return GridWarp(std::move(d));
}

double gamma_inner(const GridWarp& f, const GridWarp& g) {
    check_same_grid(f.size(), g.size());
    const std::size_t n = f.size();
    std::vector<double> lf(n), lg(n), prod(n);
    for (std::size_t i = 0; i < n; ++i) {
        lf[i] = std::log(f.derivative()[i]);
        lg[i] = std::log(g.derivative()[i]);
        prod[i] = lf[i] * lg[i];
    }
    return trapezoid(prod) - trapezoid(lf) * trapezoid(lg);
}

HFunction psi(const GridWarp& f) {
    const std::size_t n = f.size();
    std::vector<double> h(n);
    for (std::size_t i = 0; i < n; ++i) h[i] = std::log(f.derivative()[i]);
    double mean = trapezoid(h);
    for (auto& x : h) x -= mean;
    return HFunction(std::move(h));
}

GridWarp psi_inverse(const HFunction& h) {
    const std::size_t n = h.size();
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) {
        double x = h.values()[i];
        if (!std::isfinite(x)) throw InvalidElementError("psi_inverse: non-finite grid value");
        d[i] = std::exp(x);
    }
    double total = trapezoid(d);
    for (auto& x : d) x /= total;
    return GridWarp(std::move(d));
}

double fourier_basis(std::size_t i, double t) {
    if (i == 0) throw InvalidParameterError("fourier_basis: index starts at 1");
    const double kSqrt2 = 1.4142135623730951;
    std::size_t k = (i + 1) / 2;
    double arg = 2.0 * M_PI * static_cast<double>(k) * t;
    return (i % 2 == 1) ? kSqrt2 * std::cos(arg) : kSqrt2 * std::sin(arg);
}

double kernel_K(double s, double t, const std::vector<double>& v) {
    double sum = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i] < 0.0) throw InvalidParameterError("kernel_K: negative coefficient");
        if (v[i] == 0.0) continue;
        sum += v[i] * fourier_basis(i + 1, s) * fourier_basis(i + 1, t);
    }
    return sum;
}

void write_hfunction_csv(std::ostream& os, const HFunction& h) {
    os << "h\n";
    os.precision(17);
    for (double v : h.values()) os << v << '\n';
}

void write_hfunction_csv(const std::string& file, const HFunction& h) {
    std::ofstream os(file);
    if (!os) throw IngestionError("cannot open for writing: " + file);
    write_hfunction_csv(os, h);
}

}  // namespace warpsim
