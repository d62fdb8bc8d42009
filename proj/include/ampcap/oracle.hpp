#pragma once

#include <cstdint>

#include "ampcap/geometry.hpp"
#include "ampcap/lower_bounds.hpp"

namespace ampcap {

struct McEstimate {
  double value = 0.0;  // bits for mutual information; raw expectation otherwise
  double std_error = 0.0;
  std::int64_t samples = 0;
  std::uint64_t seed = 0;
};

/// Stratified Monte-Carlo estimate of I(X; HX + Z) for a finite discrete
/// input: equal sample allocation per support point, mixture output density
/// evaluated with a max-shifted log-sum-exp. Deterministic for a fixed seed
/// regardless of worker count (per-stratum substreams, merged in order).
McEstimate mutual_information_discrete(const InputDistribution& d, const ChannelMatrix& h,
                                       std::int64_t samples, std::uint64_t seed, int workers = 1);

/// Paired-sample estimate of E[exp(-||H(X - X')||^2 / 4)]; the oracle for
/// phi and the closed-form Jensen bounds.
McEstimate expectation_exp_quadratic(const InputDistribution& d, const ChannelMatrix& h,
                                     std::int64_t samples, std::uint64_t seed);

}  // namespace ampcap
