#include "ampcap/geometry.hpp"

#include <bit>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "ampcap/specialfn.hpp"

namespace ampcap {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

InputSpace InputSpace::box(Eigen::VectorXd halfwidths) {
  if (halfwidths.size() == 0) throw std::invalid_argument("InputSpace: empty halfwidth vector");
  for (Eigen::Index i = 0; i < halfwidths.size(); ++i) {
    if (!std::isfinite(halfwidths(i)) || halfwidths(i) < 0.0)
      throw std::invalid_argument("InputSpace: halfwidths must be finite and >= 0");
  }
  InputSpace s;
  s.kind_ = Kind::Box;
  s.dim_ = static_cast<int>(halfwidths.size());
  s.halfwidths_ = std::move(halfwidths);
  return s;
}

InputSpace InputSpace::ball(int dim, double radius) {
  if (dim < 1) throw std::invalid_argument("InputSpace: ball dimension must be >= 1");
  if (!std::isfinite(radius) || radius < 0.0)
    throw std::invalid_argument("InputSpace: radius must be finite and >= 0");
  InputSpace s;
  s.kind_ = Kind::Ball;
  s.dim_ = dim;
  s.radius_ = radius;
  return s;
}

const Eigen::VectorXd& InputSpace::halfwidths() const {
  if (kind_ != Kind::Box) throw std::logic_error("InputSpace: not a box");
  return halfwidths_;
}

double InputSpace::radius() const {
  if (kind_ != Kind::Ball) throw std::logic_error("InputSpace: not a ball");
  return radius_;
}

InputSpace InputSpace::scaled(double c) const {
  if (!std::isfinite(c) || c < 0.0) throw std::invalid_argument("InputSpace: scale must be >= 0");
  if (kind_ == Kind::Box) return box(halfwidths_ * c);
  return ball(dim_, radius_ * c);
}

std::string InputSpace::describe() const {
  std::ostringstream os;
  if (kind_ == Kind::Box) {
    os << "box(";
    for (Eigen::Index i = 0; i < halfwidths_.size(); ++i) {
      if (i) os << ",";
      os << halfwidths_(i);
    }
    os << ")";
  } else {
    os << "ball(dim=" << dim_ << ",A=" << radius_ << ")";
  }
  return os.str();
}

ChannelMatrix::ChannelMatrix(Eigen::MatrixXd h) : h_(std::move(h)) {
  if (h_.size() == 0) throw std::invalid_argument("ChannelMatrix: empty matrix");
  if (!h_.allFinite()) throw std::invalid_argument("ChannelMatrix: entries must be finite");

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(h_, Eigen::ComputeFullU | Eigen::ComputeFullV);
  u_ = svd.matrixU();
  v_ = svd.matrixV();
  sigma_ = svd.singularValues();

  // sign convention: first nonzero entry of each right-singular vector positive
  const int nmin = n_min();
  for (Eigen::Index j = 0; j < v_.cols(); ++j) {
    Eigen::Index k = 0;
    while (k < v_.rows() && std::abs(v_(k, j)) <= 1e-12) ++k;
    if (k < v_.rows() && v_(k, j) < 0.0) {
      v_.col(j) *= -1.0;
      if (j < nmin && sigma_(j) > 0.0) u_.col(j) *= -1.0;
    }
  }
  for (Eigen::Index j = 0; j < u_.cols(); ++j) {
    if (j < nmin && sigma_(j) > 0.0) continue;  // paired with a V column
    Eigen::Index k = 0;
    while (k < u_.rows() && std::abs(u_(k, j)) <= 1e-12) ++k;
    if (k < u_.rows() && u_(k, j) < 0.0) u_.col(j) *= -1.0;
  }

  const double ortho_u = (u_.transpose() * u_ - Eigen::MatrixXd::Identity(rows(), rows()))
                             .cwiseAbs()
                             .maxCoeff();
  const double ortho_v = (v_.transpose() * v_ - Eigen::MatrixXd::Identity(cols(), cols()))
                             .cwiseAbs()
                             .maxCoeff();
  if (ortho_u > 1e-10 || ortho_v > 1e-10)
    throw std::runtime_error("ChannelMatrix: SVD factors lost orthogonality");

  Eigen::MatrixXd recon = u_.leftCols(nmin) * sigma_.asDiagonal() * v_.leftCols(nmin).transpose();
  const double hnorm = h_.norm();
  if ((recon - h_).norm() > 1e-9 * std::max(hnorm, 1.0))
    throw std::runtime_error("ChannelMatrix: SVD reconstruction failure");
}

ChannelMatrix ChannelMatrix::diagonal(const Eigen::VectorXd& gains) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(gains.size(), gains.size());
  m.diagonal() = gains;
  return ChannelMatrix(std::move(m));
}

int ChannelMatrix::rank(double rel_tol) const {
  const double thresh = rel_tol * spectral_norm();
  int r = 0;
  for (Eigen::Index i = 0; i < sigma_.size(); ++i)
    if (sigma_(i) > thresh) ++r;
  return r;
}

bool ChannelMatrix::is_invertible(double rel_tol) const {
  if (!is_square()) return false;
  if (spectral_norm() == 0.0) return false;
  // |det| > rel_tol * sigma_1^n, i.e. prod(sigma_i / sigma_1) > rel_tol
  double prod = 1.0;
  for (Eigen::Index i = 0; i < sigma_.size(); ++i) prod *= sigma_(i) / sigma_(0);
  return prod > rel_tol;
}

bool ChannelMatrix::is_diagonal(double rel_tol) const {
  const double scale = h_.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < h_.rows(); ++i)
    for (Eigen::Index j = 0; j < h_.cols(); ++j)
      if (i != j && std::abs(h_(i, j)) > rel_tol * std::max(scale, 1.0)) return false;
  return true;
}

double ChannelMatrix::log_abs_det() const {
  if (!is_square()) throw std::logic_error("ChannelMatrix: determinant of non-square matrix");
  double s = 0.0;
  for (Eigen::Index i = 0; i < sigma_.size(); ++i) {
    if (sigma_(i) == 0.0) return kNegInf;
    s += std::log(sigma_(i));
  }
  return s;
}

double ChannelMatrix::abs_det() const {
  const double l = log_abs_det();
  return l == kNegInf ? 0.0 : std::exp(l);
}

double r_min(const InputSpace& x) {
  if (x.is_box()) return x.halfwidths().minCoeff();
  return x.radius();
}

double log_volume(const InputSpace& x) {
  if (x.is_box()) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < x.halfwidths().size(); ++i) {
      const double a = x.halfwidths()(i);
      if (a == 0.0) return kNegInf;
      s += std::log(2.0 * a);
    }
    return s;
  }
  return log_ball_volume(x.dim(), x.radius());
}

double volume(const InputSpace& x) {
  const double lv = log_volume(x);
  return lv == kNegInf ? 0.0 : std::exp(lv);
}

namespace {

void check_dims(const ChannelMatrix& h, const InputSpace& x) {
  if (h.cols() != x.dim())
    throw std::invalid_argument("dimension mismatch: channel has " + std::to_string(h.cols()) +
                                " inputs, space has dimension " + std::to_string(x.dim()));
}

double r_max_box_exact(const ChannelMatrix& h, const Eigen::VectorXd& a) {
  const int nt = h.cols();
  if (nt > 24)
    throw budget_error(
        "r_max over a box with n_t > 24 exceeds the 2^24 vertex budget; "
        "consider the ball relaxation r_max(H * ball(||a||))");
  const Eigen::MatrixXd& m = h.matrix();
  Eigen::VectorXd y = m * a;
  double best = y.squaredNorm();
  if (nt >= 2) {
    std::vector<double> sign(nt, 1.0);
    const std::uint64_t count = 1ull << (nt - 1);  // x and -x map to the same norm
    for (std::uint64_t k = 1; k < count; ++k) {
      const int j = std::countr_zero(k) + 1;
      y -= (2.0 * sign[j] * a(j)) * m.col(j);
      sign[j] = -sign[j];
      if ((k & 0xFFFu) == 0) {
        // periodic refresh against accumulated drift
        Eigen::VectorXd xs(nt);
        for (int t = 0; t < nt; ++t) xs(t) = sign[t] * a(t);
        y = m * xs;
      }
      best = std::max(best, y.squaredNorm());
    }
  }
  return std::sqrt(best);
}

}  // namespace

double r_max_image(const ChannelMatrix& h, const InputSpace& x) {
  check_dims(h, x);
  if (x.is_ball()) return h.spectral_norm() * x.radius();
  return r_max_box_exact(h, x.halfwidths());
}

Eigen::VectorXd enclosing_box_of_image(const ChannelMatrix& h, const InputSpace& x) {
  check_dims(h, x);
  if (x.is_box()) return h.matrix().cwiseAbs() * x.halfwidths();
  Eigen::VectorXd out(h.rows());
  for (Eigen::Index i = 0; i < h.rows(); ++i) out(i) = x.radius() * h.matrix().row(i).norm();
  return out;
}

PackingEfficiency packing_efficiency(const ChannelMatrix& h, const InputSpace& x) {
  check_dims(h, x);
  if (!h.is_square()) throw std::invalid_argument("packing_efficiency: H must be square");
  if (!h.is_invertible())
    throw std::runtime_error("packing_efficiency: H is rank deficient");
  const double lv = log_volume(x);
  if (lv == kNegInf)
    throw std::invalid_argument("packing_efficiency: degenerate input space has zero volume");

  const int n = h.rows();
  const double rmax = r_max_image(h, x);
  PackingEfficiency pe;
  pe.exact = std::exp(log_ball_volume(n, rmax) - h.log_abs_det() - lv);

  if (x.is_box()) {
    // estimate using the half-width-product volume convention
    const Eigen::VectorXd& a = x.halfwidths();
    double log_prod_a = 0.0;
    for (Eigen::Index i = 0; i < a.size(); ++i) {
      if (a(i) == 0.0) throw std::invalid_argument("packing_efficiency: degenerate box");
      log_prod_a += std::log(a(i));
    }
    pe.box_estimate = std::exp(log_ball_volume(n, h.spectral_norm() * a.norm()) -
                               h.log_abs_det() - log_prod_a);
  }
  return pe;
}

PrecodedUniformSampler::PrecodedUniformSampler(Eigen::MatrixXd v, Eigen::VectorXd halfwidths,
                                               std::uint64_t seed)
    : v_(std::move(v)), a_(std::move(halfwidths)), rng_(seed) {
  if (v_.rows() != v_.cols() || v_.rows() != a_.size())
    throw std::invalid_argument("PrecodedUniformSampler: dimension mismatch");
  const double ortho =
      (v_.transpose() * v_ - Eigen::MatrixXd::Identity(v_.rows(), v_.cols())).cwiseAbs().maxCoeff();
  if (ortho > 1e-10)
    throw std::invalid_argument("PrecodedUniformSampler: V is not orthogonal");
  for (Eigen::Index i = 0; i < a_.size(); ++i)
    if (!std::isfinite(a_(i)) || a_(i) < 0.0)
      throw std::invalid_argument("PrecodedUniformSampler: invalid halfwidths");
}

Eigen::VectorXd PrecodedUniformSampler::next() {
  Eigen::VectorXd xt(a_.size());
  for (Eigen::Index i = 0; i < a_.size(); ++i) xt(i) = rng_.uniform(-a_(i), a_(i));
  return v_ * xt;
}

Eigen::MatrixXd parse_matrix_text(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::string normalized = text;
  for (auto& c : normalized)
    if (c == ';') c = '\n';
  std::istringstream lines(normalized);
  std::string line;
  int lineno = 0;
  while (std::getline(lines, line)) {
    ++lineno;
    for (auto& c : line)
      if (c == ',') c = ' ';
    std::istringstream fields(line);
    std::vector<double> row;
    std::string tok;
    while (fields >> tok) {
      try {
        std::size_t used = 0;
        const double v = std::stod(tok, &used);
        if (used != tok.size()) throw std::invalid_argument(tok);
        row.push_back(v);
      } catch (const std::exception&) {
        throw config_error("matrix parse error at row " + std::to_string(lineno) + ": bad field '" +
                           tok + "'");
      }
    }
    if (row.empty()) continue;
    if (!rows.empty() && row.size() != rows.front().size())
      throw config_error("matrix parse error at row " + std::to_string(lineno) +
                         ": inconsistent column count");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw config_error("matrix parse error: no rows");
  Eigen::MatrixXd m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  return m;
}

ChannelMatrix load_channel_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open channel CSV: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ChannelMatrix(parse_matrix_text(ss.str()));
}

}  // namespace ampcap
