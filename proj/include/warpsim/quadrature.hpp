#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "warpsim/errors.hpp"

namespace warpsim {

// Adaptive Gauss-Kronrod (G7,K15) on [a,b]. Bisects until the local Kronrod
// vs Gauss discrepancy is below the allotted tolerance. Throws AccuracyError
// (carrying the achieved estimate) when the depth limit is hit.
double integrate_gk(const std::function<double(double)>& f, double a, double b,
                    double abs_tol = 1e-10, int max_segments = 4000);

// Nodes and weights of the N-point Gauss-Legendre rule on [-1,1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

// Panel edges on [a,b], geometrically refined toward `toward` (must be a or b).
// Smallest panel has width ~ (b-a) * 2^-(panels-1).
std::vector<double> graded_edges(double a, double b, int panels, double toward);

// Batched tensor quadrature for the order-statistic kernel sums that appear in
// the exact moment expressions. For each j in [1, n-1] and each of K smooth
// integrands s_k, accumulates
//
//   I[j-1][k] = int_{ua}^{ub} int_{va}^{vb} s_k(u,v) f_j(u,v) dv du,
//   f_j(u,v)  = n!/((j-1)!(n-j-1)!) u^(j-1) (1-v)^(n-j-1),
//
// with the kernel evaluated through log-gamma (raw factorials overflow long
// before n = 128). `map_u`/`map_v` are cached per axis node (identity when
// null) so expensive maps such as a numerical inverse are evaluated once per
// node instead of once per node pair. `smooth` fills K values given
// (u, v, map_u(u), map_v(v)).
struct JsumResult {
    std::vector<std::vector<double>> integrals;  // (n-1) x K
    double error_estimate = 0.0;
};

JsumResult integrate_jsum_2d(
    int n, double ua, double ub, double va, double vb,
    const std::function<double(double)>& map_u,
    const std::function<double(double)>& map_v,
    const std::function<void(double, double, double, double, double*)>& smooth,
    int K, double rel_tol = 1e-9);

}  // namespace warpsim
