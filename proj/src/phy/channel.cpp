#include "phy/channel.hpp"

#include <cmath>
#include <stdexcept>

#include "common/rng.hpp"

namespace hynoma::phy {

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
double watts_to_dbm(double watts) { return 10.0 * std::log10(watts) + 30.0; }
double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double linear_to_db(double linear) { return 10.0 * std::log10(linear); }

double pathloss_linear(double distance_m, const ChannelParams& params) {
  const double d = std::max(distance_m, params.d_min_m);
  return params.l0_linear * std::pow(d / params.d0_m, -params.pathloss_exponent);
}

ChannelState sample_channel(double distance_m, const ChannelParams& params, Rng& rng) {
  ChannelState st;
  st.distance_m = std::max(distance_m, params.d_min_m);
  st.pathloss_linear = pathloss_linear(distance_m, params);
  st.fading = rng.cnormal();
  return st;
}

double rsrp_dbm(double pathloss, double smoothed_fading_power, double p_ref_watts) {
  return watts_to_dbm(pathloss * smoothed_fading_power * p_ref_watts);
}

void NomaGroup::validate() const {
  if (user_ids.size() != alpha.size())
    throw std::logic_error("noma group: id/alpha size mismatch");
  if (total_power_w <= 0.0) throw std::logic_error("noma group: nonpositive total power");
  double sum = 0.0;
  for (double a : alpha) {
    if (a < -1e-12 || a > 1.0 + 1e-12)
      throw std::logic_error("noma group: alpha outside [0, 1]");
    sum += a;
  }
  if (!alpha.empty() && std::abs(sum - 1.0) > 1e-9)
    throw std::logic_error("noma group: alpha does not sum to 1");
  for (std::size_t i = 1; i < alpha.size(); ++i)
    if (alpha[i] > alpha[i - 1] + 1e-12)
      throw std::logic_error("noma group: alpha must be non-increasing in decode order");
}

std::vector<double> sic_rate(const NomaGroup& group, std::span<const double> gain_sq,
                             std::span<const double> seq_gain, std::span<const double> inter_w,
                             double noise_w) {
  group.validate();
  const std::size_t n = group.size();
  if (gain_sq.size() != n || seq_gain.size() != n || inter_w.size() != n)
    throw std::invalid_argument("sic_rate: array sizes must match the group");
  if (noise_w < 0.0) throw std::invalid_argument("sic_rate: negative noise power");

  std::vector<double> rates(n, 0.0);
  if (n == 0) return rates;

  // suffix sums of alpha: power of the users decoded after position i
  std::vector<double> residual(n + 1, 0.0);
  for (std::size_t i = n; i-- > 0;) residual[i] = residual[i + 1] + group.alpha[i];

  for (std::size_t i = 0; i < n; ++i) {
    if (seq_gain[i] <= 0.0 || seq_gain[i] > 1.0 + 1e-12)
      throw std::invalid_argument("sic_rate: seq_gain must be in (0, 1]");
    if (inter_w[i] < 0.0) throw std::invalid_argument("sic_rate: negative interference");
    const double signal = gain_sq[i] * group.alpha[i] * group.total_power_w;
    const double intra = seq_gain[i] * gain_sq[i] * residual[i + 1] * group.total_power_w;
    const double denom = intra + inter_w[i] + noise_w;
    rates[i] = std::log2(1.0 + signal / denom);
  }
  return rates;
}

std::vector<double> sic_rate(const NomaGroup& group, std::span<const double> gain_sq,
                             std::span<const double> seq_gain, double inter_w, double noise_w) {
  std::vector<double> inter(group.size(), inter_w);
  return sic_rate(group, gain_sq, seq_gain, inter, noise_w);
}

double inter_cell_power(std::span<const InterfererTerm> terms) {
  double acc = 0.0;
  for (const auto& t : terms) acc += t.pathloss_linear * t.tx_power_w * t.alpha * t.rho2;
  return acc;
}

} // namespace hynoma::phy
