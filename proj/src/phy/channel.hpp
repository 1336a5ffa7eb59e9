#pragma once

#include <complex>
#include <span>
#include <vector>

namespace hynoma { class Rng; }

namespace hynoma::phy {

double dbm_to_watts(double dbm);
double watts_to_dbm(double watts);
double db_to_linear(double db);
double linear_to_db(double linear);

// Large-scale model constants: pathloss L0 * (d/d0)^-beta, Rayleigh on top.
struct ChannelParams {
  double l0_linear = 4.6e-5; // reference pathloss at d0 (free space, 3.5 GHz, 1 m)
  double d0_m = 1.0;
  double pathloss_exponent = 3.5;
  double d_min_m = 1.0; // distances clamp here; a user standing on the mast is unphysical
};

struct ChannelState {
  std::complex<double> fading; // CN(0,1) sample
  double distance_m = 0.0;
  double pathloss_linear = 0.0;

  // |h|^2 = pathloss * |g|^2
  double gain_sq() const { return pathloss_linear * std::norm(fading); }
};

double pathloss_linear(double distance_m, const ChannelParams& params);

// Draws the small-scale fading; deterministic given the rng state.
ChannelState sample_channel(double distance_m, const ChannelParams& params, Rng& rng);

// L3-style exponential smoothing of the fading power used for RSRP.
// coeff = 1 degenerates to the instantaneous value.
struct RsrpFilter {
  double coeff = 0.5;
  double state = 1.0;
  bool initialized = false;

  void update(double fading_power) {
    if (!initialized) {
      state = fading_power;
      initialized = true;
    } else {
      state = (1.0 - coeff) * state + coeff * fading_power;
    }
  }
};

// RSRP in dBm from the linear pathloss, smoothed fading power and the
// reference transmit power in watts.
double rsrp_dbm(double pathloss, double smoothed_fading_power, double p_ref_watts);

// Downlink NOMA group in SIC decode order: weakest effective channel first
// (it carries the largest power share and is decoded and cancelled by
// everyone else). alpha is non-increasing along the order.
struct NomaGroup {
  std::vector<int> user_ids;   // decode order
  std::vector<double> alpha;   // power split, sums to 1
  double total_power_w = 1.0;

  std::size_t size() const { return user_ids.size(); }
  // Throws std::logic_error when the simplex or ordering invariants are
  // broken; these are programming errors, not recoverable states.
  void validate() const;
};

// Per-user rates (bit/s/Hz) under SIC. Array arguments are aligned with the
// group's decode order:
//   gain_sq[i]   |h_i|^2 (pathloss * fading power)
//   seq_gain[i]  residual coupling multiplier in (0, 1] applied to the
//                not-yet-decoded intra-cell power
//   inter_w[i]   inter-cell interference power at user i, watts
// R_i = log2(1 + gain*alpha_i*P / (seq_gain_i * gain * sum_{k>i} alpha_k * P
//                                   + inter_w_i + noise_w))
std::vector<double> sic_rate(const NomaGroup& group, std::span<const double> gain_sq,
                             std::span<const double> seq_gain, std::span<const double> inter_w,
                             double noise_w);
// Convenience overload with one interference level for the whole group.
std::vector<double> sic_rate(const NomaGroup& group, std::span<const double> gain_sq,
                             std::span<const double> seq_gain, double inter_w, double noise_w);

// One inter-cell interference contribution: the victim-side pathloss of the
// interfering base station, its transmit power, the interfering user's power
// share, and the normalized squared sequence coupling.
struct InterfererTerm {
  double pathloss_linear = 0.0;
  double tx_power_w = 0.0;
  double alpha = 1.0;
  double rho2 = 1.0;
};

// Sum of pathloss-weighted powers, each scaled by its sequence coupling.
double inter_cell_power(std::span<const InterfererTerm> terms);

} // namespace hynoma::phy
