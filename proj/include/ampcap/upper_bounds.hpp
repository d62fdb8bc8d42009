#pragma once

#include "ampcap/common.hpp"
#include "ampcap/geometry.hpp"

namespace ampcap {

/// Max-entropy moment upper bound at a fixed moment order p:
///   n_r log2( k_{n_r,p} / sqrt(2 pi e) * (E||v + Z||^p)^{1/p} ),
/// with ||v|| = r_max(H X), clamped at zero.
BoundResult moment_bound_at_p(const ChannelMatrix& h, const InputSpace& x, MomentOrder p,
                              const Tolerance& tol = {});

/// Infimum of the moment bound over p > 0: log-spaced grid p = 2^k,
/// k = -4..7, then golden-section refinement on the best bracket. The p = 2
/// closed form is always probed, so the result never regresses above it.
BoundResult moment_bound(const ChannelMatrix& h, const InputSpace& x, const Tolerance& tol = {});

/// Duality upper bound through the enclosing ball of radius d = r_max(H X):
///   log2( 1 + c_{n_r}(d) + Vol(ball(d)) / (2 pi e)^{n_r/2} ).
BoundResult duality_ball_bound(const ChannelMatrix& h, const InputSpace& x);

/// Duality upper bound through the enclosing box of the image:
///   sum_i log2( 1 + 2 A'_i / sqrt(2 pi e) ).
BoundResult duality_box_bound(const ChannelMatrix& h, const InputSpace& x);

/// Variant of the diagonal ball-constraint duality bound that divides each
/// half-width by sqrt(n). Reported for comparison only: the factored box
/// does not contain the image ellipsoid, so this is not certified as a
/// valid upper bound and is excluded from sandwich assertions.
BoundResult duality_diag_ball_paper_variant(const ChannelMatrix& h, const InputSpace& x);

/// Duality box bound evaluated on the singular-value channel: half-widths
/// are the support function of V^T X along the first n_min axes, scaled by
/// the singular values. Equivalent channel, so a valid upper bound; scales
/// with n_min instead of n_r.
BoundResult duality_box_svd_bound(const ChannelMatrix& h, const InputSpace& x);

/// min(upper bounds) / log2(1 + 2 r_min(X) / sqrt(2 pi e)); approaches
/// min(n_r, n_t) as the input space scales up.
double high_amplitude_prelog(const ChannelMatrix& h, const InputSpace& x,
                             const Tolerance& tol = {});

namespace detail {
/// Scalar duality bound log2(1 + 2 a / sqrt(2 pi e)).
double scalar_duality_bits(double halfwidth);
}  // namespace detail

}  // namespace ampcap
