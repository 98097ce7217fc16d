#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "warpsim/warp.hpp"

namespace warpsim {

// Shared uniform grid for all grid-function operations (2048 nodes on [0,1],
// trapezoidal quadrature).
inline constexpr std::size_t kGridSize = 2048;

double grid_node(std::size_t i, std::size_t size = kGridSize);
std::vector<double> uniform_grid(std::size_t size = kGridSize);

// Trapezoidal integral of grid values over [0,1].
double trapezoid(const std::vector<double>& values);

// Zero-mean bounded grid function (element of H(0,1)): values on the uniform
// grid, trapezoidal mean 0 within 1e-9.
class HFunction {
  public:
    explicit HFunction(std::vector<double> values);

    const std::vector<double>& values() const { return values_; }
    std::size_t size() const { return values_.size(); }

    double l2_norm_sq() const;  // trapezoidal ||h||^2

  private:
    std::vector<double> values_;
};

// A warp with derivative bounded away from 0 and infinity, represented by its
// strictly positive derivative sampled on the uniform grid. This is the
// working representation for the inner-product space operations.
class GridWarp {
  public:
    explicit GridWarp(std::vector<double> derivative);

    static GridWarp identity(std::size_t size = kGridSize);
    // Sample a target's derivative on the grid (clamped below at 1e-12).
    static GridWarp from_target(const TargetWarp& target, std::size_t size = kGridSize);
    // Piecewise slopes of a path sampled on the grid (clamped below at 1e-12).
    static GridWarp from_path(const WarpPath& path, std::size_t size = kGridSize);

    const std::vector<double>& derivative() const { return deriv_; }
    std::size_t size() const { return deriv_.size(); }

    // Warp values by cumulative trapezoid of the (normalized) derivative.
    std::vector<double> values() const;
    WarpPath to_path() const;

  private:
    std::vector<double> deriv_;
};

// Group operation: warp with derivative f'g' / int f'g'.
GridWarp gamma_plus(const GridWarp& f, const GridWarp& g);
// Scalar action: warp with derivative (f')^a / int (f')^a.
GridWarp gamma_scale(double a, const GridWarp& f);
inline GridWarp gamma_minus(const GridWarp& f, const GridWarp& g) {
    return gamma_plus(f, gamma_scale(-1.0, g));
}
// Inner product: int log f' log g' - (int log f')(int log g').
double gamma_inner(const GridWarp& f, const GridWarp& g);

// Isometry with H(0,1): psi(f) = log f' - int log f'.
HFunction psi(const GridWarp& f);
// psi^{-1}(h) = int_0^. e^h / int_0^1 e^h, returned through its derivative grid.
GridWarp psi_inverse(const HFunction& h);

// Fourier basis of L^2([0,1]) without the constant function, 1-based:
// basis(2k-1) = sqrt(2) cos(2 pi k t), basis(2k) = sqrt(2) sin(2 pi k t).
double fourier_basis(std::size_t i, double t);

// Covariance kernel K(s,t) = sum_i v_i basis_i(s) basis_i(t).
double kernel_K(double s, double t, const std::vector<double>& v);

// One-column CSV ("h") on the implicit uniform grid.
void write_hfunction_csv(std::ostream& os, const HFunction& h);
void write_hfunction_csv(const std::string& file, const HFunction& h);

}  // namespace warpsim
