#pragma once

#include "ampcap/common.hpp"

namespace ampcap {

/// Natural log of the Gamma function, x > 0. Lanczos approximation,
/// relative error below 1e-12 on [1e-3, 1e6].
double log_gamma(double x);

/// Gaussian tail probability Q(x) = P(N(0,1) > x).
double q_function(double x);

/// Max-entropy constant k_{n,p}; log-domain evaluation so that Gamma
/// ratios never overflow. k_{n,2} reduces to sqrt(2*pi*e/n) exactly.
double k_np(int n, MomentOrder p);
double log_k_np(int n, MomentOrder p);

/// phi(x) = (exp(-x^2) - 1 + sqrt(pi) x erf(x)) / x^2, the pairwise-difference
/// kernel of the uniform-input Jensen bound. Strictly decreasing from
/// phi(0) = 1 toward sqrt(pi)/x; a Taylor branch handles x < 1e-3 where the
/// closed form is 0/0.
double phi(double x);

/// Volume of the n-dimensional ball of radius r.
double ball_volume(int n, double r);
double log_ball_volume(int n, double r);

struct ChiMomentResult {
  double log_value = 0.0;  // ln E[R^p]
  double value = 0.0;      // exp(log_value); may overflow to +inf for extreme p
  int iterations = 0;
  bool used_quadrature = false;
};

/// p-th moment E[||v + Z||^p] of the noncentral chi distribution with n
/// degrees of freedom and noncentrality ||v|| = lambda. Confluent
/// hypergeometric series with an adaptive-quadrature fallback when the series
/// would exceed the iteration budget.
ChiMomentResult noncentral_chi_moment_full(int n, double lambda, MomentOrder p,
                                           const Tolerance& tol = {});
double noncentral_chi_moment(int n, double lambda, MomentOrder p, const Tolerance& tol = {});
double log_noncentral_chi_moment(int n, double lambda, MomentOrder p, const Tolerance& tol = {});

/// The two evaluation routes, exposed separately so they can be checked
/// against each other.
double log_noncentral_chi_moment_series(int n, double lambda, MomentOrder p,
                                        const Tolerance& tol = {});
double log_noncentral_chi_moment_quadrature(int n, double lambda, MomentOrder p,
                                            const Tolerance& tol = {});

namespace detail {

double logaddexp(double a, double b);

/// ln I_nu(x) for nu >= -1/2, x >= 0.
double log_bessel_i(double nu, double x);

/// ln f_R(r) for R = ||v + Z||, ||v|| = lambda, Z standard normal in n dims.
double log_noncentral_chi_pdf(int n, double lambda, double r);

}  // namespace detail

}  // namespace ampcap
