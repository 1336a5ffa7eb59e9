#include "seqlib/sequences.hpp"

#include <map>
#include <sstream>
#include <stdexcept>

namespace hynoma::seq {

const char* family_name(Family f) {
  switch (f) {
    case Family::MSeq: return "mseq";
    case Family::Gold: return "gold";
    case Family::Walsh: return "walsh";
    case Family::Kasami: return "kasami";
    case Family::Hybrid: return "hybrid";
  }
  return "?";
}

Family family_from_name(const std::string& name) {
  if (name == "mseq") return Family::MSeq;
  if (name == "gold") return Family::Gold;
  if (name == "walsh") return Family::Walsh;
  if (name == "kasami") return Family::Kasami;
  if (name == "hybrid") return Family::Hybrid;
  throw std::invalid_argument("unknown sequence family: " + name);
}

namespace {

// One Fibonacci LFSR step. State is an m-bit register; the output bit is the
// LSB, feedback is the parity of the tapped stages and enters at the top.
struct Lfsr {
  int m;
  std::uint32_t state;
  std::vector<int> shifts; // m - tap for every tap

  Lfsr(const LfsrSpec& spec) : m(spec.degree), state(spec.seed & ((1u << spec.degree) - 1)) {
    for (int t : spec.taps) shifts.push_back(spec.degree - t);
  }

  int step_bit() {
    std::uint32_t fb = 0;
    for (int s : shifts) fb ^= (state >> s) & 1u;
    int out = static_cast<int>(state & 1u);
    state = (state >> 1) | (fb << (m - 1));
    return out;
  }
};

} // namespace

ChipSequence generate_msequence(const LfsrSpec& spec) {
  if (spec.degree < 3 || spec.degree > 10)
    throw std::invalid_argument("lfsr degree must be in [3, 10]");
  const std::uint32_t mask = (1u << spec.degree) - 1;
  if ((spec.seed & mask) == 0) throw std::invalid_argument("lfsr seed must be nonzero");
  for (int t : spec.taps)
    if (t < 1 || t > spec.degree)
      throw std::invalid_argument("lfsr tap out of range");
  if (!spec.taps.count(spec.degree))
    throw std::invalid_argument("lfsr taps must include the degree");

  const int period = (1 << spec.degree) - 1;
  Lfsr reg(spec);
  const std::uint32_t start = reg.state;
  ChipSequence out;
  out.family = Family::MSeq;
  out.index = 0;
  out.chips.reserve(period);
  for (int i = 0; i < period; ++i) {
    int bit = reg.step_bit();
    out.chips.push_back(bit ? -1 : +1);
    // a return to the initial state before 2^m - 1 steps means the
    // polynomial is not primitive
    if (reg.state == start && i + 1 < period)
      throw std::invalid_argument("lfsr taps are not primitive (period " +
                                  std::to_string(i + 1) + " < " + std::to_string(period) + ")");
  }
  if (reg.state != start)
    throw std::invalid_argument("lfsr taps are not primitive (no full-period cycle)");
  return out;
}

const PreferredPair* preferred_pair(int m) {
  static const std::map<int, PreferredPair> table = {
      {5, {{5, 2}, {5, 4, 3, 2}}},
      {6, {{6, 1}, {6, 5, 2, 1}}},
      {7, {{7, 3}, {7, 3, 2, 1}}},
  };
  auto it = table.find(m);
  return it == table.end() ? nullptr : &it->second;
}

std::vector<ChipSequence> generate_gold_family(int m) {
  const PreferredPair* pp = preferred_pair(m);
  if (!pp)
    throw std::invalid_argument("no preferred pair for degree " + std::to_string(m) +
                                " (supported: 5, 6, 7)");
  ChipSequence u = generate_msequence({m, pp->taps_a, 1});
  ChipSequence v = generate_msequence({m, pp->taps_b, 1});
  const int n = u.length();

  std::vector<ChipSequence> family;
  family.reserve(n + 2);
  u.family = Family::Gold;
  u.index = 0;
  v.family = Family::Gold;
  v.index = 1;
  family.push_back(u);
  family.push_back(v);
  for (int k = 0; k < n; ++k) {
    ChipSequence s;
    s.family = Family::Gold;
    s.index = 2 + k;
    s.chips.resize(n);
    for (int i = 0; i < n; ++i) s.chips[i] = u.chips[i] * v.chips[(i + k) % n];
    family.push_back(std::move(s));
  }
  return family;
}

std::vector<ChipSequence> generate_walsh_family(int order) {
  if (order < 4 || order > 256 || (order & (order - 1)) != 0)
    throw std::invalid_argument("walsh order must be a power of 2 in [4, 256]");
  std::vector<ChipSequence> rows(order);
  for (int i = 0; i < order; ++i) {
    rows[i].family = Family::Walsh;
    rows[i].index = i;
    rows[i].chips.resize(order);
    for (int j = 0; j < order; ++j)
      rows[i].chips[j] = __builtin_parity(static_cast<unsigned>(i & j)) ? -1 : +1;
  }
  return rows;
}

std::vector<ChipSequence> generate_kasami_small(int m) {
  if (m % 2 != 0) throw std::invalid_argument("kasami degree must be even");
  if (m != 6 && m != 8) throw std::invalid_argument("kasami degree must be 6 or 8");
  static const std::map<int, std::set<int>> polys = {
      {6, {6, 1}},
      {8, {8, 4, 3, 2}},
  };
  ChipSequence u = generate_msequence({m, polys.at(m), 1});
  const int n = u.length();
  const int half = 1 << (m / 2);
  const int dec = half + 1; // decimation index 2^(m/2) + 1

  // decimated sequence, period 2^(m/2) - 1, repeated to fill length n
  std::vector<int> w(n);
  for (int i = 0; i < n; ++i) w[i] = u.chips[static_cast<int>((static_cast<long long>(dec) * i) % n)];

  std::vector<ChipSequence> family;
  family.reserve(half);
  u.family = Family::Kasami;
  u.index = 0;
  family.push_back(u);
  for (int k = 0; k < half - 1; ++k) {
    ChipSequence s;
    s.family = Family::Kasami;
    s.index = 1 + k;
    s.chips.resize(n);
    for (int i = 0; i < n; ++i) s.chips[i] = family[0].chips[i] * w[(i + k) % n];
    family.push_back(std::move(s));
  }
  return family;
}

ChipSequence extend_periodic(const ChipSequence& s, int target_len) {
  if (target_len < s.length()) throw std::invalid_argument("periodic extension cannot shrink");
  ChipSequence out = s;
  out.chips.resize(target_len);
  for (int i = s.length(); i < target_len; ++i) out.chips[i] = s.chips[i % s.length()];
  return out;
}

ChipSequence make_hybrid(const ChipSequence& g, const ChipSequence& w) {
  for (int c : g.chips)
    if (c != 1 && c != -1) throw std::invalid_argument("hybrid input is not bipolar");
  for (int c : w.chips)
    if (c != 1 && c != -1) throw std::invalid_argument("hybrid input is not bipolar");

  const ChipSequence* gp = &g;
  ChipSequence extended;
  if (g.length() != w.length()) {
    // Gold runs one chip short of the Walsh power-of-two length; extend it
    // from its periodic continuation. Truncating the Walsh row instead would
    // destroy orthogonality.
    if (g.length() + 1 == w.length()) {
      extended = extend_periodic(g, w.length());
      gp = &extended;
    } else {
      throw std::invalid_argument("hybrid lengths irreconcilable: " + std::to_string(g.length()) +
                                  " vs " + std::to_string(w.length()));
    }
  }
  ChipSequence h;
  h.family = Family::Hybrid;
  h.index = 0;
  h.chips.resize(w.length());
  for (int i = 0; i < w.length(); ++i) h.chips[i] = gp->chips[i] * w.chips[i];
  return h;
}

std::string codebook_to_text(const std::vector<ChipSequence>& seqs) {
  std::string out;
  for (const auto& s : seqs) {
    out += family_name(s.family);
    out += ' ';
    out += std::to_string(s.length());
    out += ' ';
    out += std::to_string(s.index);
    out += '\n';
    for (int c : s.chips) out += (c > 0 ? '+' : '-');
    out += '\n';
  }
  return out;
}

std::vector<ChipSequence> codebook_from_text(const std::string& text) {
  std::istringstream in(text);
  std::vector<ChipSequence> out;
  std::string header;
  while (std::getline(in, header)) {
    if (header.empty()) continue;
    std::istringstream hs(header);
    std::string fam;
    int len = 0, index = 0;
    if (!(hs >> fam >> len >> index)) throw std::runtime_error("codebook: bad header: " + header);
    std::string chips;
    if (!std::getline(in, chips)) throw std::runtime_error("codebook: missing chip line");
    if (static_cast<int>(chips.size()) != len)
      throw std::runtime_error("codebook: chip line length mismatch");
    ChipSequence s;
    s.family = family_from_name(fam);
    s.index = index;
    s.chips.reserve(len);
    for (char c : chips) {
      if (c == '+') s.chips.push_back(+1);
      else if (c == '-') s.chips.push_back(-1);
      else throw std::runtime_error("codebook: bad chip character");
    }
    out.push_back(std::move(s));
  }
  return out;
}

} // namespace hynoma::seq
