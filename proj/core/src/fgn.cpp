#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "fft_util.hpp"
#include "geotail/errors.hpp"
#include "geotail/rng.hpp"
#include "geotail/synth.hpp"

namespace geotail {

namespace {

// Autocovariance of unit-variance fGn.
double fgn_gamma(double h, std::int64_t k) {
  const double kk = static_cast<double>(k < 0 ? -k : k);
  const double two_h = 2.0 * h;
  return 0.5 * (std::pow(kk + 1.0, two_h) - 2.0 * std::pow(kk, two_h) +
                std::pow(std::abs(kk - 1.0), two_h));
}

}  // namespace

std::vector<double> gen_fgn(double h, std::size_t n, std::uint64_t seed) {
  if (!(h > 0.0 && h < 1.0)) throw ConfigError("gen_fgn: H must be in (0, 1)");
  if (n < 2 || (n & (n - 1)) != 0) {
    throw ConfigError("gen_fgn: n must be a power of two >= 2");
  }

  // Davies-Harte circulant embedding: the length-2n circulant built from the
  // autocovariance has non-negative eigenvalues for fGn, so the square roots
  // weight complex Gaussians into an exact sample.
  const std::size_t m = 2 * n;
  std::vector<std::complex<double>> c(m);
  for (std::size_t k = 0; k <= n; ++k) {
    c[k] = fgn_gamma(h, static_cast<std::int64_t>(k));
  }
  for (std::size_t k = 1; k < n; ++k) c[m - k] = c[k];
  detail::fft_complex_forward(c);

  std::vector<double> lambda(m);
  for (std::size_t k = 0; k < m; ++k) {
    double ev = c[k].real();
    if (ev < 0.0) {
      if (ev < -1e-8) throw EstimationError("gen_fgn: negative circulant eigenvalue");
      ev = 0.0;
    }
    lambda[k] = ev;
  }

  Rng rng(seed);
  std::vector<std::complex<double>> a(m);
  a[0] = std::sqrt(lambda[0]) * rng.normal();
  for (std::size_t k = 1; k < n; ++k) {
    const double w = std::sqrt(0.5 * lambda[k]);
    const double re = w * rng.normal();
    const double im = w * rng.normal();
    a[k] = {re, im};
    a[m - k] = {re, -im};
  }
  a[n] = std::sqrt(lambda[n]) * rng.normal();

  detail::fft_complex_forward(a);
  const double scale = 1.0 / std::sqrt(static_cast<double>(m));
  std::vector<double> out(n);
  for (std::size_t t = 0; t < n; ++t) out[t] = a[t].real() * scale;
  return out;
}

}  // namespace geotail
