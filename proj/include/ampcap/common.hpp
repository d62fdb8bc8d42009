#pragma once

#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

namespace ampcap {

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kE = 2.718281828459045235360287471352662498;
inline constexpr double kLn2 = 0.693147180559945309417232121458176568;
inline constexpr double kTwoPiE = 2.0 * kPi * kE;
inline const double kSqrtTwoPiE = std::sqrt(kTwoPiE);
inline const double kSqrtPi = std::sqrt(kPi);

/// Convergence budget for iterative evaluations.
struct Tolerance {
  double rel = 1e-9;
  double abs = 0.0;
  int max_iter = 20000;

  void validate() const {
    if (!(rel > 0.0) || !std::isfinite(rel)) throw std::invalid_argument("Tolerance: rel must be finite and > 0");
    if (!(abs >= 0.0) || !std::isfinite(abs)) throw std::invalid_argument("Tolerance: abs must be finite and >= 0");
    if (max_iter < 1) throw std::invalid_argument("Tolerance: max_iter must be >= 1");
  }
};

/// Moment exponent p > 0.
struct MomentOrder {
  double p;
  explicit MomentOrder(double p_) : p(p_) {
    if (!std::isfinite(p) || p <= 0.0) throw std::domain_error("MomentOrder: p must be finite and > 0");
  }
};

/// Iterative evaluation failed to converge; carries the best estimate so far.
class numeric_error : public std::runtime_error {
 public:
  numeric_error(const std::string& what, double partial)
      : std::runtime_error(what), partial_(partial) {}
  double partial() const { return partial_; }

 private:
  double partial_;
};

/// An exact computation would exceed its enumeration budget.
class budget_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class config_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class BoundKind { Upper, Lower };

inline const char* to_string(BoundKind k) { return k == BoundKind::Upper ? "upper" : "lower"; }

/// A named capacity bound evaluation, in bits, with diagnostics.
struct BoundResult {
  std::string name;
  BoundKind kind = BoundKind::Upper;
  double value_bits = 0.0;
  std::map<std::string, double> params;
  std::string note;
};

inline double clamp0(double x) { return x > 0.0 ? x : 0.0; }
inline double log2_of(double x) { return std::log(x) / kLn2; }

/// Quotes a CSV field when it contains a delimiter, quote, or newline.
inline std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

/// Golden-section minimization of a unimodal scalar function on [a, b].
template <class F>
double golden_min(F&& f, double a, double b, double xtol, int max_iter = 400) {
  const double invphi = 0.6180339887498948482;
  double c = b - (b - a) * invphi;
  double d = a + (b - a) * invphi;
  double fc = f(c);
  double fd = f(d);
  for (int it = 0; (b - a) > xtol && it < max_iter; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - (b - a) * invphi;
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + (b - a) * invphi;
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace ampcap
