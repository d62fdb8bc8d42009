#pragma once

#include <cstdint>
#include <vector>

#include "ampcap/common.hpp"
#include "ampcap/geometry.hpp"
#include "ampcap/rng.hpp"

namespace ampcap {

/// N equispaced points on [-A, A]; half the distance between adjacent points
/// is A/(N-1). A single-point constellation is the origin.
struct PamConstellation {
  int points;
  double amplitude;

  PamConstellation(int n_points, double amp) : points(n_points), amplitude(amp) {
    if (points < 1) throw std::invalid_argument("PamConstellation: need at least one point");
    if (!std::isfinite(amplitude) || amplitude < 0.0)
      throw std::invalid_argument("PamConstellation: amplitude must be finite and >= 0");
  }

  double half_spacing() const { return points >= 2 ? amplitude / (points - 1) : 0.0; }
  double point(int k) const {
    return points >= 2 ? -amplitude + 2.0 * half_spacing() * k : 0.0;
  }
  double entropy_bits() const { return std::log2(static_cast<double>(points)); }
};

/// Evaluable/sampleable channel input law.
class InputDistribution {
 public:
  enum class Kind { UniformBox, PamProduct, PointMass, PrecodedUniform };

  static InputDistribution uniform_box(Eigen::VectorXd halfwidths);
  static InputDistribution pam_product(std::vector<PamConstellation> pams);
  static InputDistribution point_mass(Eigen::VectorXd x);
  static InputDistribution precoded_uniform(Eigen::MatrixXd v, Eigen::VectorXd halfwidths);

  Kind kind() const { return kind_; }
  int dim() const { return dim_; }
  bool is_discrete() const { return kind_ == Kind::PamProduct || kind_ == Kind::PointMass; }
  bool is_symmetric() const;

  std::int64_t support_size() const;    // discrete only
  Eigen::MatrixXd support_points() const;  // discrete only; dim x M, uniform mass
  double entropy_bits() const;          // discrete only

  Eigen::VectorXd sample(Rng& rng) const;

  const std::vector<PamConstellation>& pams() const { return pams_; }
  const Eigen::VectorXd& halfwidths() const { return halfwidths_; }
  const Eigen::VectorXd& point() const { return point_; }
  const Eigen::MatrixXd& precoder() const { return precoder_; }

 private:
  InputDistribution() = default;
  Kind kind_ = Kind::PointMass;
  int dim_ = 0;
  std::vector<PamConstellation> pams_;
  Eigen::VectorXd halfwidths_;
  Eigen::VectorXd point_;
  Eigen::MatrixXd precoder_;
};

/// Uniform dither on the product of [-delta_i, delta_i).
struct DitherSpec {
  Eigen::VectorXd half_widths;

  explicit DitherSpec(Eigen::VectorXd hw) : half_widths(std::move(hw)) {
    for (Eigen::Index i = 0; i < half_widths.size(); ++i)
      if (!std::isfinite(half_widths(i)) || half_widths(i) < 0.0)
        throw std::invalid_argument("DitherSpec: half-widths must be finite and >= 0");
  }
};

enum class OwEstimator { MatrixInverse, PseudoInverse, Identity };

struct McBudget {
  std::int64_t samples = 200000;
  std::uint64_t seed = 1;
};

/// A bound together with its alternate volume-convention variant (half-width
/// product instead of side-length product). Only the exact form participates
/// in sandwich assertions.
struct EpiBounds {
  BoundResult exact;
  BoundResult paper;
};

/// EPI lower bound for square invertible channels with a uniform input:
///   (n/2) log2(1 + |det H|^{2/n} Vol(X)^{2/n} / (2 pi e)).
EpiBounds epi_uniform_invertible(const ChannelMatrix& h, const InputSpace& x);

/// EPI lower bound through SVD precoding:
///   (n_min/2) log2(1 + (prod 2 a_i sigma_i)^{2/n_min} / (2 pi e)).
/// Zero (and flagged) when any of the first n_min singular values vanishes.
EpiBounds epi_svd(const ChannelMatrix& h, const Eigen::VectorXd& halfwidths);

/// Jensen lower bound for per-dimension gains:
///   log2plus( (2/e)^{n/2} / min_{b in X} prod phi(sigma_i B_i) ).
/// Box constraints have the closed-form minimizer b* = a; ball constraints
/// run the amplitude allocation optimizer.
BoundResult jensen_bound_diag(const Eigen::VectorXd& sigmas, const InputSpace& constraint);

/// Monte-Carlo Jensen bound for arbitrary sampleable inputs:
///   log2plus( (2/e)^{n_r/2} / E[exp(-||H(X - X')||^2 / 4)] ).
BoundResult jensen_bound_general(const ChannelMatrix& h, const InputDistribution& d,
                                 const McBudget& mc = {});

/// Ozarow-Wyner lower bound [H(X_D) - G1 - G2]^+ for a dithered discrete
/// input. Closed form when p = 2 with the matrix-inverse estimator (the
/// error -H^{-1}Z is independent of U and X_D); Monte Carlo otherwise.
BoundResult ow_bound(const InputDistribution& d, const ChannelMatrix& h, const DitherSpec& u,
                     MomentOrder p, OwEstimator estimator, const McBudget& mc = {});

/// Per-dimension PAM + dither Ozarow-Wyner bound for diagonal channels, with
/// constellation sizes N_i = floor(1 + 2 A_i |h_ii| / sqrt(2 pi e)) (boxes)
/// or the same with A/sqrt(n) half-widths (balls). Single-point dimensions
/// contribute zero.
BoundResult ow_pam_diag(const ChannelMatrix& h, const InputSpace& x);

/// Minimizer of prod phi(sigma_i B_i) over b in the constraint set. Boxes:
/// b* = a (phi is strictly decreasing). Balls: pairwise golden-section
/// descent from the equal split plus 8 random starts.
Eigen::VectorXd amplitude_allocate(const Eigen::VectorXd& sigmas, const InputSpace& constraint);

namespace detail {
/// Scalar closed-form PAM bound: log2 N - (1/2)log2(pi e/6)
///                                      - (1/2)log2(1 + 3/(h^2 Delta^2)), clamped.
double scalar_pam_ow_bits(int n_points, double amplitude, double gain);
}  // namespace detail

}  // namespace ampcap
