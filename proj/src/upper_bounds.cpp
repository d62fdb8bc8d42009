#include "ampcap/upper_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "ampcap/specialfn.hpp"

namespace ampcap {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double moment_bits_raw(int nr, double d, MomentOrder p, const Tolerance& tol, bool* quad_used) {
  const auto m = noncentral_chi_moment_full(nr, d, p, tol);
  if (quad_used) *quad_used = *quad_used || m.used_quadrature;
  return nr * (log_k_np(nr, p) + m.log_value / p.p - 0.5 * std::log(kTwoPiE)) / kLn2;
}

double log_binomial(int n, int k) {
  return log_gamma(n + 1.0) - log_gamma(k + 1.0) - log_gamma(n - k + 1.0);
}

}  // namespace

namespace detail {

double scalar_duality_bits(double halfwidth) {
  return std::log2(1.0 + 2.0 * halfwidth / kSqrtTwoPiE);
}

}  // namespace detail

BoundResult moment_bound_at_p(const ChannelMatrix& h, const InputSpace& x, MomentOrder p,
                              const Tolerance& tol) {
  const double d = r_max_image(h, x);
  bool quad = false;
  const double raw = moment_bits_raw(h.rows(), d, p, tol, &quad);
  BoundResult r;
  r.name = "moment_at_p";
  r.kind = BoundKind::Upper;
  r.value_bits = clamp0(raw);
  r.params["p"] = p.p;
  r.params["d"] = d;
  if (raw < 0.0) r.note = "clamped at 0";
  if (quad) r.note += (r.note.empty() ? "" : "; ") + std::string("quadrature path");
  return r;
}

BoundResult moment_bound(const ChannelMatrix& h, const InputSpace& x, const Tolerance& tol) {
  const double d = r_max_image(h, x);
  const int nr = h.rows();
  bool quad = false;

  std::vector<double> grid;
  for (int k = -4; k <= 7; ++k) grid.push_back(std::ldexp(1.0, k));

  double best_val = std::numeric_limits<double>::infinity();
  std::size_t best_i = 0;
  std::vector<double> vals(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    vals[i] = moment_bits_raw(nr, d, MomentOrder(grid[i]), tol, &quad);
    if (vals[i] < best_val) {
      best_val = vals[i];
      best_i = i;
    }
  }

  const double lo = best_i == 0 ? 0.5 * grid.front() : grid[best_i - 1];
  const double hi = best_i + 1 == grid.size() ? 2.0 * grid.back() : grid[best_i + 1];
  const double p_opt = golden_min(
      [&](double p) { return moment_bits_raw(nr, d, MomentOrder(p), tol, &quad); }, lo, hi, 1e-6);
  const double refined = moment_bits_raw(nr, d, MomentOrder(p_opt), tol, &quad);

  // the p = 2 closed form is a guaranteed ceiling
  const double at2 = moment_bits_raw(nr, d, MomentOrder(2.0), tol, &quad);

  double raw = std::min({refined, best_val, at2});
  double p_report = p_opt;
  if (at2 <= raw) p_report = 2.0;
  if (best_val < refined && best_val < at2) p_report = grid[best_i];

  BoundResult r;
  r.name = "moment";
  r.kind = BoundKind::Upper;
  r.value_bits = clamp0(raw);
  r.params["p_opt"] = p_report;
  r.params["d"] = d;
  if (raw < 0.0) r.note = "clamped at 0";
  if (quad) r.note += (r.note.empty() ? "" : "; ") + std::string("quadrature path");
  return r;
}

BoundResult duality_ball_bound(const ChannelMatrix& h, const InputSpace& x) {
  const double d = r_max_image(h, x);
  const int nr = h.rows();

  BoundResult r;
  r.name = "dual1_ball";
  r.kind = BoundKind::Upper;
  r.params["d"] = d;
  if (d == 0.0) return r;

  // term logs for 1 + c_{n_r}(d) + Vol(ball(d)) / (2 pi e)^{n_r/2},
  // summed smallest first in the log domain
  std::vector<double> logs;
  logs.push_back(0.0);
  for (int i = 1; i <= nr - 1; ++i) {
    logs.push_back(log_binomial(nr - 1, i) + log_gamma(0.5 * (nr - 1)) - 0.5 * nr * kLn2 -
                   log_gamma(0.5 * nr) + i * std::log(d));
  }
  logs.push_back(log_ball_volume(nr, d) - 0.5 * nr * std::log(kTwoPiE));
  std::sort(logs.begin(), logs.end());
  double acc = kNegInf;
  for (double l : logs) acc = detail::logaddexp(acc, l);
  r.value_bits = clamp0(acc / kLn2);
  return r;
}

BoundResult duality_box_bound(const ChannelMatrix& h, const InputSpace& x) {
  const Eigen::VectorXd aprime = enclosing_box_of_image(h, x);
  BoundResult r;
  r.name = "dual2_box";
  r.kind = BoundKind::Upper;
  double total = 0.0;
  for (Eigen::Index i = 0; i < aprime.size(); ++i) {
    const double t = detail::scalar_duality_bits(aprime(i));
    r.params["Aprime_" + std::to_string(i + 1)] = aprime(i);
    r.params["term_" + std::to_string(i + 1)] = t;
    total += t;
  }
  r.value_bits = total;
  return r;
}

BoundResult duality_diag_ball_paper_variant(const ChannelMatrix& h, const InputSpace& x) {
  if (!h.is_diagonal()) throw std::invalid_argument("dual2_diag_ball_paper: H must be diagonal");
  if (!x.is_ball()) throw std::invalid_argument("dual2_diag_ball_paper: X must be a ball");
  const int n = h.rows();
  const double scale = x.radius() / std::sqrt(static_cast<double>(n));
  BoundResult r;
  r.name = "dual2_diag_ball_paper";
  r.kind = BoundKind::Upper;
  r.note = "variant with 1/sqrt(n) half-widths; not sandwich-certified";
  double total = 0.0;
  for (int i = 0; i < n; ++i)
    total += detail::scalar_duality_bits(std::abs(h.matrix()(i, i)) * scale);
  r.value_bits = total;
  return r;
}

BoundResult duality_box_svd_bound(const ChannelMatrix& h, const InputSpace& x) {
  if (h.cols() != x.dim()) throw std::invalid_argument("dual2_box_svd: dimension mismatch");
  const int nmin = h.n_min();
  const Eigen::VectorXd& sigma = h.singular_values();

  BoundResult r;
  r.name = "dual2_box_svd";
  r.kind = BoundKind::Upper;
  double total = 0.0;
  for (int i = 0; i < nmin; ++i) {
    // support function of X along the i-th right-singular direction axis
    double b;
    if (x.is_box()) {
      b = h.v().col(i).cwiseAbs().dot(x.halfwidths());
    } else {
      b = x.radius();  // columns of V are unit vectors
    }
    total += detail::scalar_duality_bits(sigma(i) * b);
    r.params["B_" + std::to_string(i + 1)] = b;
  }
  r.value_bits = total;
  return r;
}

double high_amplitude_prelog(const ChannelMatrix& h, const InputSpace& x, const Tolerance& tol) {
  const double rmin = r_min(x);
  if (rmin <= 0.0) throw std::invalid_argument("high_amplitude_prelog: degenerate input space");
  const double denom = detail::scalar_duality_bits(rmin);
  double best = moment_bound(h, x, tol).value_bits;
  best = std::min(best, duality_ball_bound(h, x).value_bits);
  best = std::min(best, duality_box_bound(h, x).value_bits);
  best = std::min(best, duality_box_svd_bound(h, x).value_bits);
  return best / denom;
}

}  // namespace ampcap
