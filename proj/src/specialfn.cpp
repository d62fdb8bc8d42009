#include "ampcap/specialfn.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

namespace ampcap {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Lanczos g = 7, 9 coefficients.
constexpr double kLanczosG = 7.0;
constexpr double kLanczos[] = {
    0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,   12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7,
};

double log_gamma_lanczos(double x) {
  // valid for x >= 0.5
  const double z = x - 1.0;
  double sum = kLanczos[0];
  for (int i = 1; i < 9; ++i) sum += kLanczos[i] / (z + i);
  const double base = z + kLanczosG + 0.5;
  return 0.5 * std::log(2.0 * kPi) + (z + 0.5) * std::log(base) - base + std::log(sum);
}

}  // namespace

double log_gamma(double x) {
  if (!std::isfinite(x) || x <= 0.0) throw std::domain_error("log_gamma: x must be finite and > 0");
  if (x < 0.5) {
    // reflection keeps the approximation in its accurate range
    return std::log(kPi / std::sin(kPi * x)) - log_gamma_lanczos(1.0 - x);
  }
  return log_gamma_lanczos(x);
}

double q_function(double x) {
  if (std::isnan(x)) throw std::domain_error("q_function: x must not be NaN");
  return 0.5 * std::erfc(x / std::sqrt(2.0));
}

double log_k_np(int n, MomentOrder p) {
  if (n < 1) throw std::domain_error("k_np: n must be >= 1");
  const double nd = static_cast<double>(n);
  return 0.5 * std::log(kPi) + 1.0 / p.p + (std::log(p.p) - std::log(nd)) / p.p +
         (log_gamma(nd / p.p + 1.0) - log_gamma(nd / 2.0 + 1.0)) / nd;
}

double k_np(int n, MomentOrder p) { return std::exp(log_k_np(n, p)); }

double phi(double x) {
  if (!(x >= 0.0)) throw std::domain_error("phi: x must be >= 0");
  if (x < 1e-3) {
    const double x2 = x * x;
    return 1.0 - x2 / 6.0 + x2 * x2 / 30.0;
  }
  if (x > 1e8) return (kSqrtPi - 1.0 / x) / x;
  return (std::expm1(-x * x) + kSqrtPi * x * std::erf(x)) / (x * x);
}

double log_ball_volume(int n, double r) {
  if (n < 1) throw std::domain_error("ball_volume: n must be >= 1");
  if (!(r >= 0.0) || !std::isfinite(r)) throw std::domain_error("ball_volume: r must be finite and >= 0");
  if (r == 0.0) return kNegInf;
  const double nd = static_cast<double>(n);
  return 0.5 * nd * std::log(kPi) + nd * std::log(r) - log_gamma(0.5 * nd + 1.0);
}

double ball_volume(int n, double r) {
  const double lv = log_ball_volume(n, r);
  return lv == kNegInf ? 0.0 : std::exp(lv);
}

namespace detail {

double logaddexp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(std::min(a, b) - m));
}

namespace {

/// ln( I_nu(x) e^{-x} ), cancellation-free for large x.
double log_bessel_i_scaled(double nu, double x) {
  if (!(x >= 0.0) || nu < -0.5) throw std::domain_error("log_bessel_i: need x >= 0, nu >= -1/2");
  if (nu == -0.5) {
    if (x == 0.0) return std::numeric_limits<double>::infinity();
    return 0.5 * std::log(2.0 / (kPi * x)) + std::log1p(std::exp(-2.0 * x)) - kLn2;
  }
  if (x == 0.0) return nu == 0.0 ? 0.0 : kNegInf;

  const double x_switch = std::max(100.0, 4.0 * nu * nu);
  if (x < x_switch) {
    // ascending series, log-domain accumulation
    const double x2q = 0.25 * x * x;
    const double lx2q = std::log(x2q);
    double lt = nu * std::log(0.5 * x) - log_gamma(nu + 1.0);
    double ls = lt;
    for (int k = 1; k < 100000; ++k) {
      lt += lx2q - std::log(static_cast<double>(k)) - std::log(nu + k);
      ls = logaddexp(ls, lt);
      if (lt < ls - 45.0 && x2q < 0.95 * k * (nu + k)) break;
    }
    return ls - x;
  }

  // large-argument asymptotic expansion
  const double mu = 4.0 * nu * nu;
  double sum = 1.0;
  double term = 1.0;
  double prev = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= 60; ++k) {
    term *= -(mu - (2.0 * k - 1.0) * (2.0 * k - 1.0)) / (8.0 * k * x);
    if (std::abs(term) >= prev) break;  // past the optimal truncation point
    sum += term;
    prev = std::abs(term);
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  return -0.5 * std::log(2.0 * kPi * x) + std::log(sum);
}

}  // namespace

double log_bessel_i(double nu, double x) { return log_bessel_i_scaled(nu, x) + x; }

double log_noncentral_chi_pdf(int n, double lambda, double r) {
  if (r < 0.0) return kNegInf;
  if (n == 1) {
    // folded normal around lambda
    const double d = r - lambda;
    return -0.5 * std::log(2.0 * kPi) - 0.5 * d * d + std::log1p(std::exp(-2.0 * lambda * r));
  }
  if (r == 0.0) return kNegInf;
  const double nd = static_cast<double>(n);
  if (lambda == 0.0) {
    return (1.0 - 0.5 * nd) * kLn2 + (nd - 1.0) * std::log(r) - 0.5 * r * r -
           log_gamma(0.5 * nd);
  }
  // -(r^2 + lambda^2)/2 combined with the e^{+lambda r} of the Bessel factor:
  // the exponent is exactly -(r - lambda)^2 / 2, avoiding cancellation
  const double d = r - lambda;
  return -0.5 * d * d + 0.5 * nd * std::log(r) + (1.0 - 0.5 * nd) * std::log(lambda) +
         log_bessel_i_scaled(0.5 * nd - 1.0, lambda * r);
}

namespace {

struct SimpsonState {
  std::function<double(double)> f;
  double tol_abs = 0.0;
  double err_estimate = 0.0;

  double recurse(double a, double b, double fa, double fm, double fb, double whole, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (std::abs(delta) <= 15.0 * tol_abs || depth >= 24) {
      err_estimate += std::abs(delta) / 15.0;
      return left + right + delta / 15.0;
    }
    tol_abs *= 0.5;
    const double res = recurse(a, m, fa, flm, fm, left, depth + 1) +
                       recurse(m, b, fm, frm, fb, right, depth + 1);
    tol_abs *= 2.0;
    return res;
  }
};

}  // namespace

}  // namespace detail

namespace {

void validate_chi_moment_args(int n, double lambda) {
  if (n < 1) throw std::domain_error("noncentral_chi_moment: n must be >= 1");
  if (!(lambda >= 0.0) || !std::isfinite(lambda))
    throw std::domain_error("noncentral_chi_moment: lambda must be finite and >= 0");
}

double series_impl(int n, double lambda, MomentOrder p, const Tolerance& tol, int* iters_out) {
  const double nd = static_cast<double>(n);
  const double a = 0.5 * (nd + p.p);
  const double b = 0.5 * nd;
  const double z = 0.5 * lambda * lambda;
  const double prefactor = 0.5 * p.p * kLn2 + log_gamma(a) - log_gamma(b) - z;
  if (z == 0.0) {
    if (iters_out) *iters_out = 0;
    return prefactor;
  }
  const double lz = std::log(z);
  double lt = 0.0;  // k = 0 term of 1F1(a; b; z)
  double ls = 0.0;
  int k = 0;
  for (; k < tol.max_iter; ++k) {
    lt += std::log(a + k) + lz - std::log(b + k) - std::log(static_cast<double>(k + 1));
    ls = detail::logaddexp(ls, lt);
    const bool past_peak = (a + k + 1) * z < 0.95 * (b + k + 1) * (k + 2);
    if (past_peak && lt < ls + std::log(std::max(tol.rel * 1e-3, 1e-17))) break;
  }
  if (k >= tol.max_iter)
    throw numeric_error("noncentral_chi_moment: series exceeded max_iter", prefactor + ls);
  if (iters_out) *iters_out = k + 1;
  return prefactor + ls;
}

double quadrature_impl(int n, double lambda, MomentOrder p, const Tolerance& tol) {
  const double lo = std::max(0.0, lambda - 12.0);
  const double hi = lambda + 12.0 + 6.0 * std::sqrt(static_cast<double>(n));
  const auto log_integrand = [&](double r) {
    if (r <= 0.0) return kNegInf;
    return p.p * std::log(r) + detail::log_noncentral_chi_pdf(n, lambda, r);
  };

  // scan for the max of the log-integrand to set the scale shift
  const int kScan = 512;
  double m = kNegInf;
  for (int i = 0; i <= kScan; ++i) {
    const double r = lo + (hi - lo) * i / kScan;
    m = std::max(m, log_integrand(r));
  }
  if (m == kNegInf) throw numeric_error("noncentral_chi_moment: vanishing integrand", kNegInf);

  const auto f = [&](double r) {
    const double g = log_integrand(r);
    return g == kNegInf ? 0.0 : std::exp(g - m);
  };
  double coarse = 0.0;
  for (int i = 0; i <= kScan; ++i) coarse += f(lo + (hi - lo) * i / kScan);
  coarse *= (hi - lo) / kScan;

  detail::SimpsonState state;
  state.f = f;
  state.tol_abs = std::max(coarse, 1e-30) * std::max(tol.rel * 1e-3, 1e-13);
  const double fa = f(lo), fb = f(hi), fm = f(0.5 * (lo + hi));
  const double whole = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb);
  const double integral = state.recurse(lo, hi, fa, fm, fb, whole, 0);
  if (!(integral > 0.0) || state.err_estimate > 1e-6 * integral)
    throw numeric_error("noncentral_chi_moment: quadrature failed to converge",
                        m + std::log(std::max(integral, 1e-300)));
  return m + std::log(integral);
}

}  // namespace

double log_noncentral_chi_moment_series(int n, double lambda, MomentOrder p, const Tolerance& tol) {
  validate_chi_moment_args(n, lambda);
  tol.validate();
  return series_impl(n, lambda, p, tol, nullptr);
}

double log_noncentral_chi_moment_quadrature(int n, double lambda, MomentOrder p,
                                            const Tolerance& tol) {
  validate_chi_moment_args(n, lambda);
  tol.validate();
  return quadrature_impl(n, lambda, p, tol);
}

ChiMomentResult noncentral_chi_moment_full(int n, double lambda, MomentOrder p,
                                           const Tolerance& tol) {
  validate_chi_moment_args(n, lambda);
  tol.validate();
  ChiMomentResult res;
  const double z = 0.5 * lambda * lambda;
  const double est_iters = z + 12.0 * std::sqrt(z) + 50.0;
  if (est_iters <= tol.max_iter) {
    try {
      res.log_value = series_impl(n, lambda, p, tol, &res.iterations);
      res.value = std::exp(res.log_value);
      return res;
    } catch (const numeric_error&) {
      // fall through to quadrature
    }
  }
  res.used_quadrature = true;
  res.log_value = quadrature_impl(n, lambda, p, tol);
  res.value = std::exp(res.log_value);
  return res;
}

double noncentral_chi_moment(int n, double lambda, MomentOrder p, const Tolerance& tol) {
  return noncentral_chi_moment_full(n, lambda, p, tol).value;
}

double log_noncentral_chi_moment(int n, double lambda, MomentOrder p, const Tolerance& tol) {
  return noncentral_chi_moment_full(n, lambda, p, tol).log_value;
}

}  // namespace ampcap
