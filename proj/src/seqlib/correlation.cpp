#include "seqlib/correlation.hpp"

#include <cmath>
#include <stdexcept>

namespace hynoma::seq {

namespace fft {

static bool is_pow2(std::size_t n) { return n && (n & (n - 1)) == 0; }

static void radix2(std::vector<std::complex<double>>& a, bool inverse) {
  const std::size_t n = a.size();
  // bit-reversal permutation
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = (inverse ? 2.0 : -2.0) * M_PI / static_cast<double>(len);
    const std::complex<double> wlen(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const std::complex<double> u = a[i + k];
        const std::complex<double> v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
  if (inverse)
    for (auto& x : a) x /= static_cast<double>(n);
}

// Bluestein chirp-z: expresses a length-n DFT as a convolution, evaluated
// with a padded radix-2 FFT. Handles the odd lengths 2^m - 1 that PN
// sequences produce.
static void bluestein(std::vector<std::complex<double>>& a, bool inverse) {
  const std::size_t n = a.size();
  std::size_t m = 1;
  while (m < 2 * n - 1) m <<= 1;

  const double sign = inverse ? 1.0 : -1.0;
  std::vector<std::complex<double>> chirp(n);
  for (std::size_t k = 0; k < n; ++k) {
    // k^2 mod 2n keeps the phase argument small
    const std::size_t k2 = (k * k) % (2 * n);
    const double ang = sign * M_PI * static_cast<double>(k2) / static_cast<double>(n);
    chirp[k] = {std::cos(ang), std::sin(ang)};
  }

  std::vector<std::complex<double>> x(m, {0.0, 0.0}), y(m, {0.0, 0.0});
  for (std::size_t k = 0; k < n; ++k) x[k] = a[k] * chirp[k];
  y[0] = std::conj(chirp[0]);
  for (std::size_t k = 1; k < n; ++k) y[k] = y[m - k] = std::conj(chirp[k]);

  radix2(x, false);
  radix2(y, false);
  for (std::size_t k = 0; k < m; ++k) x[k] *= y[k];
  radix2(x, true);

  for (std::size_t k = 0; k < n; ++k) a[k] = x[k] * chirp[k];
  if (inverse)
    for (auto& v : a) v /= static_cast<double>(n);
}

void transform(std::vector<std::complex<double>>& data, bool inverse) {
  if (data.empty()) return;
  if (is_pow2(data.size()))
    radix2(data, inverse);
  else
    bluestein(data, inverse);
}

} // namespace fft

static void check_equal_lengths(const ChipSequence& a, const ChipSequence& b) {
  if (a.length() != b.length())
    throw std::invalid_argument("correlation requires equal lengths (" +
                                std::to_string(a.length()) + " vs " + std::to_string(b.length()) + ")");
  if (a.length() == 0) throw std::invalid_argument("correlation of empty sequence");
}

static CorrelationProfile finish(std::vector<int> values, bool is_auto) {
  CorrelationProfile p;
  p.values = std::move(values);
  p.is_auto = is_auto;
  for (std::size_t tau = 1; tau < p.values.size(); ++tau)
    p.peak_offzero = std::max(p.peak_offzero, std::abs(p.values[tau]));
  return p;
}

CorrelationProfile periodic_correlation_direct(const ChipSequence& a, const ChipSequence& b) {
  check_equal_lengths(a, b);
  const int n = a.length();
  std::vector<int> values(n, 0);
  for (int tau = 0; tau < n; ++tau) {
    int acc = 0;
    for (int i = 0; i < n; ++i) acc += a.chips[i] * b.chips[(i + tau) % n];
    values[tau] = acc;
  }
  return finish(std::move(values), a.chips == b.chips);
}

CorrelationProfile periodic_correlation_fft(const ChipSequence& a, const ChipSequence& b) {
  check_equal_lengths(a, b);
  const int n = a.length();
  std::vector<std::complex<double>> fa(n), fb(n);
  for (int i = 0; i < n; ++i) {
    fa[i] = static_cast<double>(a.chips[i]);
    fb[i] = static_cast<double>(b.chips[i]);
  }
  fft::transform(fa, false);
  fft::transform(fb, false);
  for (int i = 0; i < n; ++i) fa[i] = std::conj(fa[i]) * fb[i];
  fft::transform(fa, true);

  std::vector<int> values(n);
  const double tol = 1e-6 * n;
  for (int i = 0; i < n; ++i) {
    const double re = fa[i].real();
    const long long r = std::llround(re);
    if (std::abs(re - static_cast<double>(r)) > tol || std::abs(fa[i].imag()) > tol)
      throw std::runtime_error("fft correlation residual above tolerance");
    values[i] = static_cast<int>(r);
  }
  return finish(std::move(values), a.chips == b.chips);
}

CorrelationProfile periodic_correlation(const ChipSequence& a, const ChipSequence& b) {
  return periodic_correlation_fft(a, b);
}

double coupling_sync(const ChipSequence& a, const ChipSequence& b) {
  if (a.chips == b.chips) return 1.0;
  check_equal_lengths(a, b);
  long long r0 = 0;
  for (int i = 0; i < a.length(); ++i) r0 += a.chips[i] * b.chips[i];
  const double rho = static_cast<double>(std::llabs(r0)) / a.length();
  return rho * rho;
}

double coupling_async_peak(const ChipSequence& a, const ChipSequence& b) {
  if (a.chips == b.chips) return 1.0;
  CorrelationProfile p = periodic_correlation_fft(a, b);
  const double rho = static_cast<double>(p.peak_offzero) / a.length();
  return rho * rho;
}

double coupling_async_meansq(const ChipSequence& a, const ChipSequence& b) {
  if (a.chips == b.chips) return 1.0;
  CorrelationProfile p = periodic_correlation_fft(a, b);
  const int n = p.length();
  if (n < 2) return 1.0;
  double acc = 0.0;
  for (int tau = 1; tau < n; ++tau) {
    const double r = static_cast<double>(p.values[tau]) / n;
    acc += r * r;
  }
  return acc / static_cast<double>(n - 1);
}

double coupling_async(const ChipSequence& a, const ChipSequence& b) {
  return coupling_async_peak(a, b);
}

double measure_papr(const ChipSequence& s, int oversample) {
  if (s.length() == 0) throw std::invalid_argument("papr of empty sequence");
  if (oversample < 1) throw std::invalid_argument("papr oversample must be >= 1");

  int n = s.length();
  ChipSequence padded = s;
  if ((n & (n - 1)) != 0) {
    int p2 = 1;
    while (p2 < n) p2 <<= 1;
    padded = extend_periodic(s, p2);
    n = p2;
  }
  const int len = n * oversample;
  std::vector<std::complex<double>> x(len, {0.0, 0.0});
  for (int i = 0; i < n; ++i) x[i] = static_cast<double>(padded.chips[i]);
  fft::transform(x, true); // chips as subcarriers -> time-domain samples

  double peak = 0.0, sum = 0.0;
  for (const auto& v : x) {
    const double p = std::norm(v);
    peak = std::max(peak, p);
    sum += p;
  }
  return peak / (sum / static_cast<double>(len));
}

} // namespace hynoma::seq
