#pragma once

namespace warpsim {

// Regularized incomplete beta function I_x(a, b), continued-fraction evaluation.
double reg_inc_beta(double a, double b, double x);

// Inverse of x -> I_x(a, b) on [0,1] (safeguarded Newton, |dx| <= 1e-14).
double reg_inc_beta_inv(double a, double b, double u);

// log of the binomial coefficient C(n, k) via log-gamma.
double log_binomial(int n, int k);

}  // namespace warpsim
