#pragma once

#include <string>
#include <vector>

#include "seqlib/correlation.hpp"
#include "seqlib/sequences.hpp"

namespace hynoma::seq {

// Empirical record for one (Gold, Walsh) pair: both sides of the claimed
// cross-correlation product identity per lag, and the PAPR triple. The
// identity R_H = R_G * R_W does not hold for element-wise products in
// general, so it is logged rather than asserted.
struct HybridClaimRecord {
  int gold_index_a = 0, gold_index_b = 0;
  int walsh_index_a = 0, walsh_index_b = 0;
  std::vector<long long> lhs;     // R_{Ha,Hb}(tau)
  std::vector<long long> rhs;     // R_{Ga,Gb}(tau) * R_{Wa,Wb}(tau)
  int lags_equal = 0;             // count of lags where the two sides agree
  double papr_gold = 0.0, papr_walsh = 0.0, papr_hybrid = 0.0;
  bool papr_inequality_holds = false; // PAPR_H <= min(PAPR_G, PAPR_W)
};

struct HybridClaimReport {
  int gold_m = 0;
  int walsh_order = 0;
  std::vector<HybridClaimRecord> records;
};

// Compares pairs (a, b) of hybrids H = ext(G) (.) W against the product of
// the parents' correlations for `pairs` deterministic pair picks.
HybridClaimReport hybrid_claim_report(int gold_m, int walsh_order, int pairs);

// Aligned plain-text rendering for the CLI.
std::string render_claim_report(const HybridClaimReport& report);

} // namespace hynoma::seq
