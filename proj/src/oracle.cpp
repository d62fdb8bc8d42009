#include "ampcap/oracle.hpp"

#include <cmath>
#include <vector>

#include "ampcap/parallel.hpp"

namespace ampcap {

McEstimate mutual_information_discrete(const InputDistribution& d, const ChannelMatrix& h,
                                       std::int64_t samples, std::uint64_t seed, int workers) {
  if (!d.is_discrete())
    throw std::invalid_argument("mutual_information_discrete: input must be discrete");
  if (h.cols() != d.dim())
    throw std::invalid_argument("mutual_information_discrete: dimension mismatch");
  if (samples < 10000)
    throw std::invalid_argument("mutual_information_discrete: need at least 10^4 samples");

  const std::int64_t m = d.support_size();  // throws when the support exceeds 10^6
  McEstimate est;
  est.samples = samples;
  est.seed = seed;
  if (m == 1) return est;  // a single point carries no information
  if (samples < m)
    throw std::invalid_argument(
        "mutual_information_discrete: stratified allocation needs samples >= support size");

  const Eigen::MatrixXd x = d.support_points();
  const Eigen::MatrixXd y = h.matrix() * x;  // n_r x M mixture centers
  const int nr = h.rows();
  const double log_m = std::log(static_cast<double>(m));

  const std::int64_t base = samples / m;
  const std::int64_t rem = samples % m;

  std::vector<double> means(m, 0.0);
  std::vector<double> vars(m, 0.0);  // within-stratum sample variance
  std::vector<std::int64_t> counts(m, 0);

  parallel_for(static_cast<int>(m), workers, [&](int k) {
    const std::int64_t mk = base + (k < rem ? 1 : 0);
    counts[k] = mk;
    if (mk == 0) return;
    Rng rng = Rng::substream(seed, static_cast<std::uint64_t>(k));
    Eigen::VectorXd z(nr), w(nr);
    std::vector<double> s(m);
    double mean = 0.0, m2 = 0.0;
    for (std::int64_t t = 0; t < mk; ++t) {
      for (int i = 0; i < nr; ++i) z(i) = rng.normal();
      w = y.col(k) + z;
      const double z2 = z.squaredNorm();
      double smax = 0.0;  // the j = k exponent is exactly 0
      for (std::int64_t j = 0; j < m; ++j) {
        s[j] = 0.5 * (z2 - (w - y.col(j)).squaredNorm());
        if (s[j] > smax) smax = s[j];
      }
      double acc = 0.0;
      for (std::int64_t j = 0; j < m; ++j) acc += std::exp(s[j] - smax);
      // log2( f(Y|X=x_k) / f(Y) ) with uniform mixture weights 1/M
      const double g = -(smax + std::log(acc) - log_m) / kLn2;
      const double delta = g - mean;
      mean += delta / (t + 1);
      m2 += delta * (g - mean);
    }
    means[k] = mean;
    vars[k] = mk > 1 ? m2 / (mk - 1) : 0.0;
  });

  double value = 0.0;
  double var = 0.0;
  for (std::int64_t k = 0; k < m; ++k) {
    value += means[k] / m;
    if (counts[k] > 0) var += vars[k] / (static_cast<double>(m) * m * counts[k]);
  }
  est.value = value;
  est.std_error = std::sqrt(var);
  return est;
}

McEstimate expectation_exp_quadratic(const InputDistribution& d, const ChannelMatrix& h,
                                     std::int64_t samples, std::uint64_t seed) {
  if (h.cols() != d.dim())
    throw std::invalid_argument("expectation_exp_quadratic: dimension mismatch");
  if (samples < 1000)
    throw std::invalid_argument("expectation_exp_quadratic: need at least 10^3 samples");

  Rng rng(seed);
  double mean = 0.0, m2 = 0.0;
  for (std::int64_t k = 0; k < samples; ++k) {
    const Eigen::VectorXd x = d.sample(rng);
    const Eigen::VectorXd x2 = d.sample(rng);
    const double v = std::exp(-0.25 * (h.matrix() * (x - x2)).squaredNorm());
    const double delta = v - mean;
    mean += delta / (k + 1);
    m2 += delta * (v - mean);
  }
  McEstimate est;
  est.value = mean;
  est.std_error = std::sqrt(m2 / samples / std::max<std::int64_t>(samples - 1, 1));
  est.samples = samples;
  est.seed = seed;
  return est;
}

}  // namespace ampcap
