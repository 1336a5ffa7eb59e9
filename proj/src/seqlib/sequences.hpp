#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

namespace hynoma::seq {

enum class Family { MSeq, Gold, Walsh, Kasami, Hybrid };

const char* family_name(Family f);
Family family_from_name(const std::string& name);

// A bipolar spreading code. Chips are strictly +1/-1; `index` is the
// family-local identifier (row number, shift index, ...).
struct ChipSequence {
  std::vector<int> chips;
  Family family = Family::MSeq;
  int index = 0;

  int length() const { return static_cast<int>(chips.size()); }
  bool operator==(const ChipSequence& o) const { return chips == o.chips; }
};

// Fibonacci LFSR description. `taps` are the feedback polynomial exponents,
// degree included: {5, 2} means x^5 + x^2 + 1. Primitivity is not assumed;
// generate_msequence() verifies the full period 2^m - 1 and rejects anything
// shorter.
struct LfsrSpec {
  int degree = 0;
  std::set<int> taps;
  std::uint32_t seed = 1;
};

// m-sequence of period 2^m - 1 with the 0 -> +1, 1 -> -1 chip map.
// Throws std::invalid_argument when the spec is out of range or the taps are
// not primitive (period check fails).
ChipSequence generate_msequence(const LfsrSpec& spec);

// Gold family for m in {5, 6, 7}: the two preferred m-sequences plus all
// 2^m - 1 chip-wise products of shifted pairs, 2^m + 1 sequences total.
std::vector<ChipSequence> generate_gold_family(int m);

// Rows of the Sylvester Hadamard matrix, order a power of two in [4, 256].
std::vector<ChipSequence> generate_walsh_family(int order);

// Small Kasami set for even m in {6, 8}: 2^(m/2) sequences of length 2^m - 1.
std::vector<ChipSequence> generate_kasami_small(int m);

// Element-wise product H[n] = G[n] * W[n]. When g is exactly one chip shorter
// than w (Gold 2^m - 1 against Walsh 2^m) g is extended by one chip from its
// periodic continuation; any other mismatch is an error.
ChipSequence make_hybrid(const ChipSequence& g, const ChipSequence& w);

// Periodic extension used by the hybrid length rule and the PAPR padding.
ChipSequence extend_periodic(const ChipSequence& s, int target_len);

// The preferred-pair tap table backing generate_gold_family.
struct PreferredPair {
  std::set<int> taps_a;
  std::set<int> taps_b;
};
const PreferredPair* preferred_pair(int m);

// Plain-text codebook export: per sequence a "family length index" header
// line followed by the chips as +/- characters.
std::string codebook_to_text(const std::vector<ChipSequence>& seqs);
std::vector<ChipSequence> codebook_from_text(const std::string& text);

} // namespace hynoma::seq
