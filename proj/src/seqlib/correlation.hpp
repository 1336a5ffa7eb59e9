#pragma once

#include <complex>
#include <vector>

#include "seqlib/sequences.hpp"

namespace hynoma::seq {

// Periodic correlation values[tau] = sum_n a[n] * b[(n + tau) mod N] for
// tau in [0, N).
struct CorrelationProfile {
  std::vector<int> values;
  int peak_offzero = 0; // max |values[tau]| over tau != 0
  bool is_auto = false;

  int length() const { return static_cast<int>(values.size()); }
};

// Direct O(N^2) reference implementation.
CorrelationProfile periodic_correlation_direct(const ChipSequence& a, const ChipSequence& b);

// O(N log N) transform path (radix-2 FFT with Bluenstein fallback for odd N).
// Outputs are rounded to exact integers; a residual above 1e-6 * N trips an
// internal consistency error.
CorrelationProfile periodic_correlation_fft(const ChipSequence& a, const ChipSequence& b);

// Default entry point: the transform path.
CorrelationProfile periodic_correlation(const ChipSequence& a, const ChipSequence& b);

// Synchronous (same-transmitter) normalized squared coupling: (R(0)/N)^2,
// 1.0 for identical sequences.
double coupling_sync(const ChipSequence& a, const ChipSequence& b);

// Worst-case asynchronous coupling: (max_{tau != 0} |R(tau)| / N)^2,
// 1.0 for identical sequences (self-interference bound).
double coupling_async_peak(const ChipSequence& a, const ChipSequence& b);

// Average asynchronous coupling over chip offsets:
// mean_{tau != 0} (R(tau)/N)^2, 1.0 for identical sequences. This is the
// expected interference power when the offset is uniform over lags, the
// usual average-SNR treatment of asynchronous DS spreading.
double coupling_async_meansq(const ChipSequence& a, const ChipSequence& b);

// Backwards-compatible alias for the worst-case form.
double coupling_async(const ChipSequence& a, const ChipSequence& b);

// PAPR after OFDM-style mapping: chips become frequency-domain symbols, the
// spectrum is zero-padded by `oversample`, and the ratio max|x|^2 / mean|x|^2
// of the time-domain samples is returned (linear, >= 1). Sequences whose
// length is not a power of two are padded from their periodic continuation.
double measure_papr(const ChipSequence& s, int oversample = 4);

namespace fft {
// In-place forward/inverse DFT; n must be a power of two for the radix-2
// kernel, arbitrary n goes through Bluestein's chirp-z algorithm.
void transform(std::vector<std::complex<double>>& data, bool inverse);
} // namespace fft

} // namespace hynoma::seq
