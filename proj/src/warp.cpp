#include "warpsim/warp.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "warpsim/errors.hpp"
#include "warpsim/special.hpp"

namespace warpsim {

WarpPath::WarpPath(std::vector<double> xs, std::vector<double> ys)
    : xs_(std::move(xs)), ys_(std::move(ys)) {
    if (xs_.size() != ys_.size() || xs_.size() < 2)
        throw InvalidParameterError("WarpPath: need matching xs/ys with at least 2 knots");
    if (xs_.front() != 0.0 || xs_.back() != 1.0)
        throw InvalidParameterError("WarpPath: xs must start at 0 and end at 1");
    if (ys_.front() != 0.0 || ys_.back() != 1.0)
        throw InvalidParameterError("WarpPath: ys must start at 0 and end at 1");
    for (std::size_t i = 0; i + 1 < xs_.size(); ++i) {
        if (!(xs_[i] < xs_[i + 1]))
            throw InvalidParameterError("WarpPath: xs must be strictly increasing");
        if (ys_[i + 1] < ys_[i])
            throw InvalidParameterError("WarpPath: ys must be non-decreasing");
    }
}

double WarpPath::operator()(double t) const {
    if (t < 0.0 || t > 1.0) throw DomainError("WarpPath: t outside [0,1]");
    if (t == 0.0) return 0.0;
    if (t == 1.0) return 1.0;
    auto it = std::upper_bound(xs_.begin(), xs_.end(), t);
    std::size_t hi = static_cast<std::size_t>(it - xs_.begin());
    std::size_t lo = hi - 1;
    double slope = (ys_[hi] - ys_[lo]) / (xs_[hi] - xs_[lo]);
    return ys_[lo] + slope * (t - xs_[lo]);
}

WarpPath WarpPath::identity() { return WarpPath({0.0, 1.0}, {0.0, 1.0}); }

TargetWarp::TargetWarp(std::string tag, Fn eval, Fn inverse, Fn derivative)
    : tag_(std::move(tag)), eval_(std::move(eval)), inverse_(std::move(inverse)),
      derivative_(std::move(derivative)) {}

TargetWarp TargetWarp::phi1() {
    return TargetWarp(
        "phi1", [](double t) { return t; }, [](double u) { return u; },
        [](double) { return 1.0; });
}

TargetWarp TargetWarp::phi2() {
    // Beta(5,2) CDF; density 30 t^4 (1-t)
    return TargetWarp(
        "phi2", [](double t) { return reg_inc_beta(5.0, 2.0, t); },
        [](double u) { return reg_inc_beta_inv(5.0, 2.0, u); },
        [](double t) { return 30.0 * t * t * t * t * (1.0 - t); });
}

TargetWarp TargetWarp::phi3() {
    const double denom = std::expm1(-5.0);  // e^-5 - 1
    return TargetWarp(
        "phi3", [denom](double t) { return std::expm1(-5.0 * t) / denom; },
        [denom](double u) { return -std::log1p(u * denom) / 5.0; },
        [denom](double t) { return -5.0 * std::exp(-5.0 * t) / denom; });
}

TargetWarp TargetWarp::by_name(const std::string& name) {
    if (name == "phi1") return phi1();
    if (name == "phi2") return phi2();
    if (name == "phi3") return phi3();
    throw InvalidParameterError("unknown target warp: " + name);
}

TargetWarp TargetWarp::empirical(const WarpPath& path, std::string tag) {
    auto shared = std::make_shared<WarpPath>(path);
    auto eval = [shared](double t) { return (*shared)(t); };
    auto inverse = [shared](double u) {
        if (u <= 0.0) return 0.0;
        if (u >= 1.0) return 1.0;
        const auto& xs = shared->xs();
        const auto& ys = shared->ys();
        auto it = std::upper_bound(ys.begin(), ys.end(), u);
        std::size_t hi = static_cast<std::size_t>(it - ys.begin());
        if (hi == 0) return 0.0;
        if (hi >= ys.size()) return 1.0;
        std::size_t lo = hi - 1;
        double dy = ys[hi] - ys[lo];
        if (dy <= 0.0) return xs[hi];  // flat segment: right endpoint
        return xs[lo] + (u - ys[lo]) / dy * (xs[hi] - xs[lo]);
    };
    auto derivative = [shared](double t) {
        const auto& xs = shared->xs();
        const auto& ys = shared->ys();
        if (t >= 1.0) t = 1.0;
        auto it = std::upper_bound(xs.begin(), xs.end(), t);
        std::size_t hi = static_cast<std::size_t>(it - xs.begin());
        if (hi >= xs.size()) hi = xs.size() - 1;
        if (hi == 0) hi = 1;
        std::size_t lo = hi - 1;
        double slope = (ys[hi] - ys[lo]) / (xs[hi] - xs[lo]);
        return std::max(slope, 1e-12);
    };
    return TargetWarp(std::move(tag), eval, inverse, derivative);
}

void write_warp_csv(std::ostream& os, const WarpPath& path) {
    os << "x,y\n";
    os.precision(17);
    for (std::size_t i = 0; i < path.knot_count(); ++i)
        os << path.xs()[i] << ',' << path.ys()[i] << '\n';
}

void write_warp_csv(const std::string& file, const WarpPath& path) {
    std::ofstream os(file);
    if (!os) throw IngestionError("cannot open for writing: " + file);
    write_warp_csv(os, path);
}

WarpPath read_warp_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw IngestionError("warp CSV: empty stream");
    std::vector<double> xs, ys;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string a, b;
        if (!std::getline(ls, a, ',') || !std::getline(ls, b))
            throw IngestionError("warp CSV: malformed row: " + line);
        xs.push_back(std::stod(a));
        ys.push_back(std::stod(b));
    }
    return WarpPath(std::move(xs), std::move(ys));
}

WarpPath read_warp_csv(const std::string& file) {
    std::ifstream is(file);
    if (!is) throw IngestionError("cannot open: " + file);
    return read_warp_csv(is);
}

}  // namespace warpsim
