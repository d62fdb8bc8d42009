#include "ampcap/svd_precoding.hpp"

#include <algorithm>
#include <cmath>

#include "ampcap/lower_bounds.hpp"
#include "ampcap/upper_bounds.hpp"

namespace ampcap {

PrecodedChannel precode(const ChannelMatrix& h) {
  PrecodedChannel pc;
  pc.u = h.u();
  pc.v = h.v();
  pc.sigmas = h.singular_values();
  pc.n_min = h.n_min();
  pc.effective_sigmas = pc.sigmas;
  const double s1 = h.spectral_norm();
  for (Eigen::Index i = 0; i < pc.effective_sigmas.size(); ++i)
    if (pc.effective_sigmas(i) < 1e-12 * s1) pc.effective_sigmas(i) = 0.0;
  pc.rank = h.rank();
  return pc;
}

BoundResult jensen_svd(const ChannelMatrix& h, const Eigen::VectorXd& halfwidths) {
  if (halfwidths.size() < h.n_min())
    throw std::invalid_argument("jensen_svd: need at least n_min halfwidths");
  const PrecodedChannel pc = precode(h);
  const Eigen::VectorXd gains = pc.effective_sigmas.head(pc.n_min);
  BoundResult r = jensen_bound_diag(gains, InputSpace::box(halfwidths.head(pc.n_min)));
  r.name = "jensen_svd";
  if (pc.rank < pc.n_min) {
    r.note = "rank " + std::to_string(pc.rank) + " < n_min";
  }
  return r;
}

std::vector<PrelogRow> prelog_sweep(const ChannelMatrix& h, const Eigen::VectorXd& base_halfwidths,
                                    const std::vector<double>& scales, const Tolerance& tol) {
  if (base_halfwidths.size() != h.cols())
    throw std::invalid_argument("prelog_sweep: base box dimension mismatch");
  if (base_halfwidths.minCoeff() <= 0.0)
    throw std::invalid_argument("prelog_sweep: base box must be nondegenerate");

  const PrecodedChannel pc = precode(h);
  std::vector<PrelogRow> rows;
  rows.reserve(scales.size());
  for (double c : scales) {
    const InputSpace x = InputSpace::box(base_halfwidths * c);
    const double denom = detail::scalar_duality_bits(r_min(x));

    double lower = jensen_svd(h, x.halfwidths()).value_bits;
    lower = std::max(lower, epi_svd(h, x.halfwidths()).exact.value_bits);
    if (h.is_square() && h.is_invertible())
      lower = std::max(lower, epi_uniform_invertible(h, x).exact.value_bits);

    double upper = moment_bound(h, x, tol).value_bits;
    upper = std::min(upper, duality_ball_bound(h, x).value_bits);
    upper = std::min(upper, duality_box_bound(h, x).value_bits);
    upper = std::min(upper, duality_box_svd_bound(h, x).value_bits);

    PrelogRow row;
    row.scale = c;
    row.lower_ratio = lower / denom;
    row.upper_ratio = upper / denom;
    row.rank_deficient = pc.rank < pc.n_min;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace ampcap
