#pragma once

#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

namespace warpsim {

// Piecewise-linear monotone path through (xs, ys) with xs strictly increasing
// from 0 to 1 and ys non-decreasing from 0 to 1. Invariants are enforced at
// construction. Immutable afterwards.
class WarpPath {
  public:
    WarpPath(std::vector<double> xs, std::vector<double> ys);

    const std::vector<double>& xs() const { return xs_; }
    const std::vector<double>& ys() const { return ys_; }
    std::size_t knot_count() const { return xs_.size(); }

    // Linear interpolation; exact at knots. Throws DomainError outside [0,1].
    double operator()(double t) const;

    static WarpPath identity();

  private:
    std::vector<double> xs_;
    std::vector<double> ys_;
};

inline double eval_warp(const WarpPath& path, double t) { return path(t); }

// An absolutely continuous warping function with evaluable value, inverse and
// derivative (defined a.e.). Cheap to copy.
class TargetWarp {
  public:
    using Fn = std::function<double(double)>;

    TargetWarp(std::string tag, Fn eval, Fn inverse, Fn derivative);

    double operator()(double t) const { return eval_(t); }
    double inverse(double u) const { return inverse_(u); }
    double derivative(double t) const { return derivative_(t); }
    const std::string& tag() const { return tag_; }

    // Built-in targets from the numerical study: uniform CDF (identity),
    // Beta(5,2) CDF, and (e^{-5t}-1)/(e^{-5}-1).
    static TargetWarp phi1();
    static TargetWarp phi2();
    static TargetWarp phi3();
    static TargetWarp by_name(const std::string& name);

    // Piecewise-linear target built from a path's knots: linear evaluation,
    // piecewise-constant derivative (slopes clamped below at 1e-12), exact
    // piecewise-linear inverse.
    static TargetWarp empirical(const WarpPath& path, std::string tag = "empirical");

  private:
    std::string tag_;
    Fn eval_;
    Fn inverse_;
    Fn derivative_;
};

// CSV serialization: two columns "x,y", one-line header, full double precision.
void write_warp_csv(std::ostream& os, const WarpPath& path);
void write_warp_csv(const std::string& file, const WarpPath& path);
WarpPath read_warp_csv(std::istream& is);
WarpPath read_warp_csv(const std::string& file);

}  // namespace warpsim
