#include "ampcap/lower_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ampcap/specialfn.hpp"

namespace ampcap {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log1pexp(double s) { return s > 36.0 ? s : std::log1p(std::exp(s)); }

/// (n/2) * log2(1 + exp(log_vol2n - ln(2 pi e))) where log_vol2n = (2/n) ln Vol.
double epi_bits_from_log_volume(int n, double log_vol) {
  if (log_vol == kNegInf) return 0.0;
  const double s = (2.0 / n) * log_vol - std::log(kTwoPiE);
  return 0.5 * n * log1pexp(s) / kLn2;
}

}  // namespace

InputDistribution InputDistribution::uniform_box(Eigen::VectorXd halfwidths) {
  InputSpace::box(halfwidths);  // reuse validation
  InputDistribution d;
  d.kind_ = Kind::UniformBox;
  d.dim_ = static_cast<int>(halfwidths.size());
  d.halfwidths_ = std::move(halfwidths);
  return d;
}

InputDistribution InputDistribution::pam_product(std::vector<PamConstellation> pams) {
  if (pams.empty()) throw std::invalid_argument("InputDistribution: empty PAM product");
  InputDistribution d;
  d.kind_ = Kind::PamProduct;
  d.dim_ = static_cast<int>(pams.size());
  d.pams_ = std::move(pams);
  return d;
}

InputDistribution InputDistribution::point_mass(Eigen::VectorXd x) {
  if (x.size() == 0 || !x.allFinite())
    throw std::invalid_argument("InputDistribution: invalid point mass");
  InputDistribution d;
  d.kind_ = Kind::PointMass;
  d.dim_ = static_cast<int>(x.size());
  d.point_ = std::move(x);
  return d;
}

InputDistribution InputDistribution::precoded_uniform(Eigen::MatrixXd v,
                                                      Eigen::VectorXd halfwidths) {
  PrecodedUniformSampler check(v, halfwidths, 0);  // validates orthogonality and widths
  InputDistribution d;
  d.kind_ = Kind::PrecodedUniform;
  d.dim_ = static_cast<int>(halfwidths.size());
  d.precoder_ = std::move(v);
  d.halfwidths_ = std::move(halfwidths);
  return d;
}

bool InputDistribution::is_symmetric() const {
  if (kind_ == Kind::PointMass) return point_.cwiseAbs().maxCoeff() == 0.0;
  return true;
}

std::int64_t InputDistribution::support_size() const {
  if (kind_ == Kind::PointMass) return 1;
  if (kind_ != Kind::PamProduct) throw std::logic_error("support_size: not a discrete input");
  std::int64_t m = 1;
  for (const auto& p : pams_) {
    m *= p.points;
    if (m > 1000000) throw std::invalid_argument("InputDistribution: support exceeds 10^6 points");
  }
  return m;
}

Eigen::MatrixXd InputDistribution::support_points() const {
  const std::int64_t m = support_size();
  Eigen::MatrixXd pts(dim_, m);
  if (kind_ == Kind::PointMass) {
    pts.col(0) = point_;
    return pts;
  }
  std::vector<int> idx(dim_, 0);
  for (std::int64_t c = 0; c < m; ++c) {
    for (int i = 0; i < dim_; ++i) pts(i, c) = pams_[i].point(idx[i]);
    for (int i = 0; i < dim_; ++i) {
      if (++idx[i] < pams_[i].points) break;
      idx[i] = 0;
    }
  }
  return pts;
}

double InputDistribution::entropy_bits() const {
  if (kind_ == Kind::PointMass) return 0.0;
  if (kind_ != Kind::PamProduct) throw std::logic_error("entropy_bits: not a discrete input");
  double h = 0.0;
  for (const auto& p : pams_) h += p.entropy_bits();
  return h;
}

Eigen::VectorXd InputDistribution::sample(Rng& rng) const {
  Eigen::VectorXd x(dim_);
  switch (kind_) {
    case Kind::UniformBox:
      for (int i = 0; i < dim_; ++i) x(i) = rng.uniform(-halfwidths_(i), halfwidths_(i));
      return x;
    case Kind::PamProduct:
      for (int i = 0; i < dim_; ++i) {
        const int n = pams_[i].points;
        int k = static_cast<int>(rng.uniform01() * n);
        if (k >= n) k = n - 1;
        x(i) = pams_[i].point(k);
      }
      return x;
    case Kind::PointMass:
      return point_;
    case Kind::PrecodedUniform: {
      Eigen::VectorXd xt(dim_);
      for (int i = 0; i < dim_; ++i) xt(i) = rng.uniform(-halfwidths_(i), halfwidths_(i));
      return precoder_ * xt;
    }
  }
  throw std::logic_error("InputDistribution: unreachable");
}

EpiBounds epi_uniform_invertible(const ChannelMatrix& h, const InputSpace& x) {
  if (!h.is_square()) throw std::invalid_argument("epi_uniform_invertible: H must be square");
  if (!h.is_invertible()) throw std::runtime_error("epi_uniform_invertible: H is singular");
  if (h.cols() != x.dim()) throw std::invalid_argument("epi_uniform_invertible: dimension mismatch");
  const int n = h.rows();
  const double ld = h.log_abs_det();

  EpiBounds out;
  out.exact.name = "epi";
  out.exact.kind = BoundKind::Lower;
  out.exact.value_bits = epi_bits_from_log_volume(n, ld + log_volume(x));

  out.paper.name = "epi_paper_vol";
  out.paper.kind = BoundKind::Lower;
  out.paper.note = "half-width product volume convention; not sandwich-certified";
  double log_vol_paper;
  if (x.is_box()) {
    log_vol_paper = 0.0;
    for (Eigen::Index i = 0; i < x.halfwidths().size(); ++i) {
      if (x.halfwidths()(i) == 0.0) {
        log_vol_paper = kNegInf;
        break;
      }
      log_vol_paper += std::log(x.halfwidths()(i));
    }
  } else {
    log_vol_paper = log_volume(x);
  }
  out.paper.value_bits = epi_bits_from_log_volume(n, ld + log_vol_paper);
  return out;
}

EpiBounds epi_svd(const ChannelMatrix& h, const Eigen::VectorXd& halfwidths) {
  if (halfwidths.size() < h.n_min())
    throw std::invalid_argument("epi_svd: need at least n_min halfwidths");
  const int nmin = h.n_min();
  const double s1 = h.spectral_norm();

  double log_prod_exact = 0.0;
  double log_prod_paper = 0.0;
  bool rank_deficient = false;
  for (int i = 0; i < nmin; ++i) {
    double s = h.singular_values()(i);
    if (s < 1e-12 * s1) s = 0.0;  // rank decision
    const double a = halfwidths(i);
    if (s == 0.0 || a == 0.0) {
      rank_deficient = rank_deficient || s == 0.0;
      log_prod_exact = kNegInf;
      log_prod_paper = kNegInf;
      break;
    }
    log_prod_exact += std::log(2.0 * a * s);
    log_prod_paper += std::log(a * s);
  }

  EpiBounds out;
  out.exact.name = "epi_svd";
  out.exact.kind = BoundKind::Lower;
  out.exact.value_bits = epi_bits_from_log_volume(nmin, log_prod_exact);
  out.paper.name = "epi_svd_paper";
  out.paper.kind = BoundKind::Lower;
  out.paper.note = "half-width product volume convention; not sandwich-certified";
  out.paper.value_bits = epi_bits_from_log_volume(nmin, log_prod_paper);
  if (rank_deficient) {
    out.exact.note = "rank deficient: zero volume";
    out.paper.note += "; rank deficient";
  }
  return out;
}

Eigen::VectorXd amplitude_allocate(const Eigen::VectorXd& sigmas, const InputSpace& constraint) {
  const int n = static_cast<int>(sigmas.size());
  if (n < 1) throw std::invalid_argument("amplitude_allocate: empty gain vector");
  for (int i = 0; i < n; ++i)
    if (!std::isfinite(sigmas(i)) || sigmas(i) < 0.0)
      throw std::invalid_argument("amplitude_allocate: gains must be finite and >= 0");

  if (constraint.is_box()) {
    if (constraint.dim() < n) throw std::invalid_argument("amplitude_allocate: box too small");
    return constraint.halfwidths().head(n);
  }

  const double radius = constraint.radius();
  Eigen::VectorXd best = Eigen::VectorXd::Zero(n);
  std::vector<int> active;
  for (int i = 0; i < n; ++i)
    if (sigmas(i) > 0.0) active.push_back(i);
  if (active.empty() || radius == 0.0) return best;

  const auto objective = [&](const Eigen::VectorXd& b) {
    double s = 0.0;
    for (int i : active) s += std::log(phi(sigmas(i) * b(i)));
    return s;
  };

  const auto descend = [&](Eigen::VectorXd b) {
    double f = objective(b);
    for (int round = 0; round < 200; ++round) {
      const double f_before = f;
      for (std::size_t ii = 0; ii < active.size(); ++ii) {
        for (std::size_t jj = ii + 1; jj < active.size(); ++jj) {
          const int i = active[ii];
          const int j = active[jj];
          const double s2 = b(i) * b(i) + b(j) * b(j);
          if (s2 <= 0.0) continue;
          const double r = std::sqrt(s2);
          const auto g = [&](double theta) {
            return std::log(phi(sigmas(i) * r * std::cos(theta))) +
                   std::log(phi(sigmas(j) * r * std::sin(theta)));
          };
          const double theta = golden_min(g, 0.0, 0.5 * kPi, 1e-12);
          const double cand_i = r * std::cos(theta);
          const double cand_j = r * std::sin(theta);
          const double before = std::log(phi(sigmas(i) * b(i))) + std::log(phi(sigmas(j) * b(j)));
          const double after = std::log(phi(sigmas(i) * cand_i)) + std::log(phi(sigmas(j) * cand_j));
          if (after < before) {
            b(i) = cand_i;
            b(j) = cand_j;
            f += after - before;
          }
        }
      }
      if (f_before - f < 1e-10) break;
    }
    return std::make_pair(b, f);
  };

  double best_f = std::numeric_limits<double>::infinity();
  std::vector<Eigen::VectorXd> starts;
  {
    Eigen::VectorXd eq = Eigen::VectorXd::Zero(n);
    for (int i : active) eq(i) = radius / std::sqrt(static_cast<double>(active.size()));
    starts.push_back(eq);
    Rng rng(0x5eedu);
    for (int s = 0; s < 8; ++s) {
      Eigen::VectorXd r = Eigen::VectorXd::Zero(n);
      double norm2 = 0.0;
      for (int i : active) {
        const double g = std::abs(rng.normal());
        r(i) = g;
        norm2 += g * g;
      }
      if (norm2 == 0.0) continue;
      for (int i : active) r(i) *= radius / std::sqrt(norm2);
      starts.push_back(r);
    }
  }
  for (const auto& s : starts) {
    auto [b, f] = descend(s);
    if (f < best_f) {
      best_f = f;
      best = b;
    }
  }
  return best;
}

BoundResult jensen_bound_diag(const Eigen::VectorXd& sigmas, const InputSpace& constraint) {
  const int n = static_cast<int>(sigmas.size());
  const Eigen::VectorXd b = amplitude_allocate(sigmas, constraint);
  double log_psi = 0.0;
  for (int i = 0; i < n; ++i) log_psi += std::log(phi(sigmas(i) * b(i)));

  BoundResult r;
  r.name = "jensen_diag";
  r.kind = BoundKind::Lower;
  r.value_bits = clamp0(0.5 * n * std::log2(2.0 / kE) - log_psi / kLn2);
  r.params["psi"] = std::exp(log_psi);
  for (int i = 0; i < n; ++i) r.params["b_" + std::to_string(i + 1)] = b(i);
  return r;
}

BoundResult jensen_bound_general(const ChannelMatrix& h, const InputDistribution& d,
                                 const McBudget& mc) {
  if (h.cols() != d.dim()) throw std::invalid_argument("jensen_bound_general: dimension mismatch");
  if (mc.samples < 1000)
    throw std::invalid_argument("jensen_bound_general: need at least 10^3 samples");

  Rng rng(mc.seed);
  const bool antithetic = d.is_symmetric();
  double mean = 0.0;
  double m2 = 0.0;
  for (std::int64_t k = 0; k < mc.samples; ++k) {
    const Eigen::VectorXd x = d.sample(rng);
    const Eigen::VectorXd x2 = d.sample(rng);
    double v = std::exp(-0.25 * (h.matrix() * (x - x2)).squaredNorm());
    if (antithetic) {
      v = 0.5 * (v + std::exp(-0.25 * (h.matrix() * (x + x2)).squaredNorm()));
    }
    const double delta = v - mean;
    mean += delta / (k + 1);
    m2 += delta * (v - mean);
  }
  const double se = std::sqrt(m2 / mc.samples / std::max<std::int64_t>(mc.samples - 1, 1));

  BoundResult r;
  r.name = "jensen_mc";
  r.kind = BoundKind::Lower;
  const double raw = 0.5 * h.rows() * std::log2(2.0 / kE) - std::log2(mean);
  r.value_bits = clamp0(raw);
  r.params["E"] = mean;
  r.params["se_E"] = se;
  r.params["se_bits"] = se / (mean * kLn2);
  r.params["samples"] = static_cast<double>(mc.samples);
  r.params["seed"] = static_cast<double>(mc.seed);
  if (raw < 0.0) r.note = "clamped at 0";
  return r;
}

namespace detail {

double scalar_pam_ow_bits(int n_points, double amplitude, double gain) {
  if (n_points <= 1) return 0.0;
  const double delta = amplitude / (n_points - 1);
  const double h2d2 = gain * gain * delta * delta;
  if (h2d2 == 0.0) return 0.0;
  const double g2 = 0.5 * std::log2(kPi * kE / 6.0);
  const double g1 = 0.5 * std::log2(1.0 + 3.0 / h2d2);
  return clamp0(std::log2(static_cast<double>(n_points)) - g2 - g1);
}

}  // namespace detail

BoundResult ow_bound(const InputDistribution& d, const ChannelMatrix& h, const DitherSpec& u,
                     MomentOrder p, OwEstimator estimator, const McBudget& mc) {
  if (!d.is_discrete()) throw std::invalid_argument("ow_bound: input must be discrete");
  const int nt = h.cols();
  if (d.dim() != nt || u.half_widths.size() != nt)
    throw std::invalid_argument("ow_bound: dimension mismatch");

  // dithered translates must stay disjoint per dimension
  if (d.kind() == InputDistribution::Kind::PamProduct) {
    for (int i = 0; i < nt; ++i) {
      const auto& pam = d.pams()[i];
      if (pam.points >= 2 && u.half_widths(i) > pam.half_spacing() * (1.0 + 1e-12))
        throw std::invalid_argument("ow_bound: dither overlaps adjacent constellation points");
    }
  }

  BoundResult r;
  r.name = "ow";
  r.kind = BoundKind::Lower;
  r.params["p"] = p.p;

  const double h_bits = d.entropy_bits();
  r.params["H_XD"] = h_bits;
  if (u.half_widths.minCoeff() == 0.0) {
    r.note = "degenerate dither: zero bound";
    return r;
  }

  double h_u_bits = 0.0;  // differential entropy of the dither, bits
  for (int i = 0; i < nt; ++i) h_u_bits += std::log2(2.0 * u.half_widths(i));

  const bool closed = p.p == 2.0 && estimator == OwEstimator::MatrixInverse && h.is_square() &&
                      h.is_invertible();
  double g1, g2;
  if (closed) {
    double u2 = 0.0;
    for (int i = 0; i < nt; ++i) u2 += u.half_widths(i) * u.half_widths(i) / 3.0;
    double trinv = 0.0;
    for (int i = 0; i < nt; ++i) {
      const double s = h.singular_values()(i);
      trinv += 1.0 / (s * s);
    }
    g1 = 0.5 * nt * std::log2((u2 + trinv) / u2);
    g2 = nt * std::log2(k_np(nt, p)) + 0.5 * nt * std::log2(u2) - h_u_bits;
    r.note = "closed form";
  } else {
    if (mc.samples < 1000) throw std::invalid_argument("ow_bound: need at least 10^3 samples");
    Eigen::MatrixXd g_mat;
    switch (estimator) {
      case OwEstimator::MatrixInverse: {
        if (!h.is_square() || !h.is_invertible())
          throw std::invalid_argument("ow_bound: matrix-inverse estimator needs square invertible H");
        g_mat = h.v() * h.singular_values().cwiseInverse().asDiagonal() * h.u().transpose();
        break;
      }
      case OwEstimator::PseudoInverse: {
        const int nmin = h.n_min();
        Eigen::VectorXd inv = Eigen::VectorXd::Zero(nmin);
        for (int i = 0; i < nmin; ++i) {
          const double s = h.singular_values()(i);
          inv(i) = s > 1e-12 * h.spectral_norm() ? 1.0 / s : 0.0;
        }
        g_mat = h.v().leftCols(nmin) * inv.asDiagonal() * h.u().leftCols(nmin).transpose();
        break;
      }
      case OwEstimator::Identity: {
        if (h.rows() != h.cols())
          throw std::invalid_argument("ow_bound: identity estimator needs n_r == n_t");
        g_mat = Eigen::MatrixXd::Identity(nt, nt);
        break;
      }
    }

    Rng rng(mc.seed);
    double mean_err = 0.0, m2_err = 0.0;
    double sum_u = 0.0;
    Eigen::VectorXd z(h.rows()), uu(nt);
    for (std::int64_t k = 0; k < mc.samples; ++k) {
      const Eigen::VectorXd x = d.sample(rng);
      for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = rng.normal();
      for (int i = 0; i < nt; ++i) uu(i) = rng.uniform(-u.half_widths(i), u.half_widths(i));
      const Eigen::VectorXd y = h.matrix() * x + z;
      const Eigen::VectorXd err = uu + x - g_mat * y;
      const double v = std::pow(err.norm(), p.p);
      const double delta = v - mean_err;
      mean_err += delta / (k + 1);
      m2_err += delta * (v - mean_err);
      sum_u += std::pow(uu.norm(), p.p);
    }
    const double e_err = mean_err;
    const double e_u = sum_u / mc.samples;
    g1 = (nt / p.p) * std::log2(e_err / e_u);
    g2 = (nt / p.p) * std::log2(e_u) + nt * std::log2(k_np(nt, p)) - h_u_bits;
    // E[||U||^p] cancels between G1 and G2, so the only Monte-Carlo noise in
    // the bound comes through E[||err||^p]
    const double se_err = std::sqrt(m2_err / mc.samples / std::max<std::int64_t>(mc.samples - 1, 1));
    r.note = "mc path";
    r.params["samples"] = static_cast<double>(mc.samples);
    r.params["seed"] = static_cast<double>(mc.seed);
    r.params["se_bits"] = (nt / p.p) * se_err / (e_err * kLn2);
  }

  r.params["G1"] = g1;
  r.params["G2"] = g2;
  r.value_bits = clamp0(h_bits - g1 - g2);
  return r;
}

BoundResult ow_pam_diag(const ChannelMatrix& h, const InputSpace& x) {
  if (!h.is_diagonal()) throw std::invalid_argument("ow_pam_diag: H must be diagonal");
  if (h.cols() != x.dim()) throw std::invalid_argument("ow_pam_diag: dimension mismatch");
  const int n = h.rows();

  BoundResult r;
  r.name = "ow_pam";
  r.kind = BoundKind::Lower;
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    const double gain = std::abs(h.matrix()(i, i));
    double a_pam;
    if (x.is_box()) {
      a_pam = x.halfwidths()(i);
    } else {
      a_pam = x.radius() / std::sqrt(static_cast<double>(n));
    }
    const int n_points = static_cast<int>(std::floor(1.0 + 2.0 * a_pam * gain / kSqrtTwoPiE));
    const double bits = detail::scalar_pam_ow_bits(n_points, a_pam, gain);
    r.params["N_" + std::to_string(i + 1)] = n_points;
    r.params["A_" + std::to_string(i + 1)] = a_pam;
    total += bits;
  }
  r.value_bits = total;
  return r;
}

}  // namespace ampcap
