#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>

#include "ampcap/common.hpp"
#include "ampcap/rng.hpp"

namespace ampcap {

/// Channel input constraint set: an axis-aligned box of per-antenna
/// half-widths, or a centered Euclidean ball. Both contain the origin;
/// degenerate (zero-measure) spaces are legal.
class InputSpace {
 public:
  enum class Kind { Box, Ball };

  static InputSpace box(Eigen::VectorXd halfwidths);
  static InputSpace ball(int dim, double radius);

  Kind kind() const { return kind_; }
  int dim() const { return dim_; }
  bool is_box() const { return kind_ == Kind::Box; }
  bool is_ball() const { return kind_ == Kind::Ball; }

  const Eigen::VectorXd& halfwidths() const;
  double radius() const;

  InputSpace scaled(double c) const;
  std::string describe() const;

 private:
  InputSpace() = default;
  Kind kind_ = Kind::Box;
  int dim_ = 0;
  Eigen::VectorXd halfwidths_;
  double radius_ = 0.0;
};

/// Dense real channel matrix with its SVD cached at construction.
/// Singular values are nonincreasing; singular vector signs are fixed so
/// the first nonzero entry of each right-singular vector is positive.
class ChannelMatrix {
 public:
  explicit ChannelMatrix(Eigen::MatrixXd h);
  static ChannelMatrix diagonal(const Eigen::VectorXd& gains);

  int rows() const { return static_cast<int>(h_.rows()); }
  int cols() const { return static_cast<int>(h_.cols()); }
  int n_min() const { return std::min(rows(), cols()); }

  const Eigen::MatrixXd& matrix() const { return h_; }
  const Eigen::VectorXd& singular_values() const { return sigma_; }
  const Eigen::MatrixXd& u() const { return u_; }
  const Eigen::MatrixXd& v() const { return v_; }

  double spectral_norm() const { return sigma_.size() ? sigma_(0) : 0.0; }
  int rank(double rel_tol = 1e-12) const;

  bool is_square() const { return rows() == cols(); }
  bool is_invertible(double rel_tol = 1e-12) const;
  bool is_diagonal(double rel_tol = 1e-12) const;

  /// |det H| and its log, square matrices only (product of singular values).
  double abs_det() const;
  double log_abs_det() const;

 private:
  Eigen::MatrixXd h_;
  Eigen::MatrixXd u_;
  Eigen::MatrixXd v_;
  Eigen::VectorXd sigma_;
};

double r_min(const InputSpace& x);
double volume(const InputSpace& x);
double log_volume(const InputSpace& x);

/// max_{x in X} ||Hx||. Balls: spectral norm times radius. Boxes: exact
/// maximum over the sign vertices (a convex function attains its maximum at
/// an extreme point); refuses beyond 2^24 vertices rather than approximate.
double r_max_image(const ChannelMatrix& h, const InputSpace& x);

/// Per-coordinate half-widths of the smallest axis-aligned box containing
/// H X (support function of X along the coordinate axes of the image).
Eigen::VectorXd enclosing_box_of_image(const ChannelMatrix& h, const InputSpace& x);

struct PackingEfficiency {
  double exact = 0.0;                  // Vol(ball(r_max(HX))) / Vol(HX)
  std::optional<double> box_estimate;  // half-width-product convention estimate, box inputs
};

/// Packing efficiency of the image set H X, square invertible H.
PackingEfficiency packing_efficiency(const ChannelMatrix& h, const InputSpace& x);

/// Stream of inputs x = V xt with xt uniform on Box(a); deterministic per seed.
class PrecodedUniformSampler {
 public:
  PrecodedUniformSampler(Eigen::MatrixXd v, Eigen::VectorXd halfwidths, std::uint64_t seed);
  Eigen::VectorXd next();

 private:
  Eigen::MatrixXd v_;
  Eigen::VectorXd a_;
  Rng rng_;
};

/// Matrix ingestion: one row per line, comma-separated decimals. The inline
/// form also accepts ';' as a row separator and spaces between entries.
Eigen::MatrixXd parse_matrix_text(const std::string& text);
ChannelMatrix load_channel_csv(const std::string& path);

}  // namespace ampcap
