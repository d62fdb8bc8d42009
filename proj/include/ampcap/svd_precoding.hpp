#pragma once

#include <vector>

#include "ampcap/common.hpp"
#include "ampcap/geometry.hpp"

namespace ampcap {

/// Singular-value reduction of a channel: Y~ = Lambda X~ + Z~ with
/// X~ = V^T X and Z~ = U^T Z still standard normal.
struct PrecodedChannel {
  Eigen::MatrixXd u;
  Eigen::MatrixXd v;
  Eigen::VectorXd sigmas;            // nonincreasing, as factored
  Eigen::VectorXd effective_sigmas;  // values below 1e-12 * sigma_1 snapped to 0
  int n_min = 0;
  int rank = 0;
};

PrecodedChannel precode(const ChannelMatrix& h);

/// Jensen lower bound through SVD precoding on Box(a): delegates to the
/// per-dimension form with gains sigma_1..sigma_{n_min}; only the first
/// n_min box half-widths matter.
BoundResult jensen_svd(const ChannelMatrix& h, const Eigen::VectorXd& halfwidths);

struct PrelogRow {
  double scale = 0.0;
  double lower_ratio = 0.0;
  double upper_ratio = 0.0;
  bool rank_deficient = false;
};

/// Ratios of the best lower/upper bounds to log2(1 + 2 r_min / sqrt(2 pi e))
/// over scaled copies of the base box; both approach min(n_r, n_t) as the
/// box grows. Rank-deficient channels are flagged: only rank(H) streams
/// carry rate, so the ratio tracks the rank instead.
std::vector<PrelogRow> prelog_sweep(const ChannelMatrix& h, const Eigen::VectorXd& base_halfwidths,
                                    const std::vector<double>& scales, const Tolerance& tol = {});

}  // namespace ampcap
