#pragma once

#include <optional>
#include <vector>

#include "ampcap/common.hpp"
#include "ampcap/geometry.hpp"

namespace ampcap {

inline constexpr double kCertSlackTol = 1e-9;

/// One executable inequality: pass iff rhs - lhs >= -1e-9 bits.
struct GapCertificate {
  std::string name;
  std::string instance;
  double lhs_bits = 0.0;
  double rhs_bits = 0.0;
  bool pass = false;
  std::map<std::string, double> params;
  std::string note;

  double slack() const { return rhs_bits - lhs_bits; }
  void finalize() { pass = slack() >= -kCertSlackTol; }
};

/// Full-precision PAM gap constant
/// log2(2) + (1/2)log2(pi e / 6) + (1/2)log2(1 + 6/(pi e)).
double pam_gap_constant();

struct PackingGapResult {
  GapCertificate exact_rho;                     // exact volume-quotient packing efficiency
  std::optional<GapCertificate> estimate_rho;   // half-width-convention estimate, box inputs
};

/// Packing-efficiency gap certificate for square invertible channels:
///   moment bound at p = 2  -  exact-volume EPI  <=  (n/2) log2((pi n)^{1/n} rho^{2/n}).
/// The certificate also carries the tighter bound
///   (n/2) log2((2 pi e / n) (rho / V_n(1))^{2/n})
/// in params["rhs_chain"]; the p = 2 closed form satisfies that one with no
/// slack reserve, so it is the sharp reference.
PackingGapResult certify_packing_gap(const ChannelMatrix& h, const InputSpace& x,
                                     const Tolerance& tol = {});

/// PAM gap certificate for diagonal channels:
///   duality box bound  -  per-dimension PAM OW bound  <=  c * n
/// with c = pam_gap_constant(). Ball constraints use the exact enclosing-box
/// duality bound (not the 1/sqrt(n) variant).
GapCertificate certify_pam_gap(const ChannelMatrix& h, const InputSpace& x,
                               std::optional<double> gap_constant_override = std::nullopt);

struct Instance {
  ChannelMatrix h;
  InputSpace x;
  std::string label;
};

struct SandwichRow {
  GapCertificate cert;  // lhs = max certified lower, rhs = min upper
  std::string best_lower;
  std::string best_upper;
  std::map<std::string, double> bounds;  // every evaluated bound, including flagged variants
};

/// max(lower bounds) <= min(upper bounds) with named witnesses. Flagged
/// variants (half-width-convention EPI, 1/sqrt(n) ball duality) are reported
/// in `bounds` but excluded from the assertion.
SandwichRow sandwich_check(const ChannelMatrix& h, const InputSpace& x, const std::string& label,
                           const Tolerance& tol = {});
std::vector<SandwichRow> sandwich_report(const std::vector<Instance>& instances,
                                         const Tolerance& tol = {}, int workers = 1);

// Shipped ensembles.
std::vector<Instance> fig2_instances();
std::vector<Instance> fig3_instances();
std::vector<Instance> random_invertible_instances(int n, int count,
                                                  const std::vector<double>& amplitudes,
                                                  std::uint64_t seed);
std::vector<Instance> pam_grid_instances();
std::vector<Instance> packing_ensemble_instances();

std::string certificates_to_csv(const std::vector<GapCertificate>& certs);
std::string certificates_report(const std::vector<GapCertificate>& certs);

}  // namespace ampcap
