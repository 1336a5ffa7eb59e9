#include <doctest.h>

#include <algorithm>
#include <set>

#include "common/rng.hpp"
#include "seqlib/correlation.hpp"
#include "seqlib/reports.hpp"
#include "seqlib/sequences.hpp"

using namespace hynoma;
using seq::ChipSequence;
using seq::Family;

// test-side oracle: plain double-loop periodic correlation, independent of
// the library's direct/fft paths
static std::vector<int> brute_correlation(const std::vector<int>& a, const std::vector<int>& b) {
  const int n = static_cast<int>(a.size());
  std::vector<int> out(n, 0);
  for (int tau = 0; tau < n; ++tau)
    for (int i = 0; i < n; ++i) out[tau] += a[i] * b[(i + tau) % n];
  return out;
}

static std::set<int> family_cross_values(const std::vector<ChipSequence>& fam) {
  std::set<int> values;
  for (std::size_t i = 0; i < fam.size(); ++i)
    for (std::size_t j = i + 1; j < fam.size(); ++j) {
      const auto r = brute_correlation(fam[i].chips, fam[j].chips);
      values.insert(r.begin(), r.end());
    }
  return values;
}

TEST_CASE("m-sequence m=3 taps {3,2}: period 7, ideal autocorrelation") {
  const auto s = seq::generate_msequence({3, {3, 2}, 1});
  CHECK(s.length() == 7);
  const auto auto_corr = brute_correlation(s.chips, s.chips);
  CHECK(auto_corr[0] == 7);
  for (int tau = 1; tau < 7; ++tau) CHECK(auto_corr[tau] == -1);
}

TEST_CASE("m-sequence m=5: period 31 and balance") {
  const auto s = seq::generate_msequence({5, {5, 2}, 1});
  CHECK(s.length() == 31);
  const int minus = static_cast<int>(std::count(s.chips.begin(), s.chips.end(), -1));
  const int plus = s.length() - minus;
  CHECK(minus == plus + 1); // 0 -> +1, 1 -> -1 bit map
}

TEST_CASE("non-primitive taps are rejected by the period check") {
  CHECK_THROWS_AS(seq::generate_msequence({3, {3, 1, 2}, 1}), std::invalid_argument);
  CHECK_THROWS_AS(seq::generate_msequence({4, {4, 2}, 1}), std::invalid_argument);
  CHECK_THROWS_AS(seq::generate_msequence({5, {5, 2}, 0}), std::invalid_argument); // zero seed
  CHECK_THROWS_AS(seq::generate_msequence({2, {2, 1}, 1}), std::invalid_argument); // degree
  CHECK_THROWS_AS(seq::generate_msequence({11, {11, 2}, 1}), std::invalid_argument);
}

TEST_CASE("gold family m=5: 33 sequences, cross-correlation in {-1,-9,7}") {
  const auto fam = seq::generate_gold_family(5);
  REQUIRE(fam.size() == 33);
  for (const auto& s : fam) CHECK(s.length() == 31);
  const auto values = family_cross_values(fam);
  const std::set<int> allowed = {-9, -1, 7};
  for (int v : values) CHECK(allowed.count(v) == 1);
}

TEST_CASE("gold family m=7: 129 sequences, values within {-1,-17,15}") {
  const auto fam = seq::generate_gold_family(7);
  REQUIRE(fam.size() == 129);
  for (const auto& s : fam) CHECK(s.length() == 127);
  // spot-check a deterministic subset of pairs with the oracle
  const std::set<int> allowed = {-17, -1, 15};
  for (std::size_t i = 0; i < fam.size(); i += 13)
    for (std::size_t j = i + 1; j < fam.size(); j += 11) {
      const auto r = brute_correlation(fam[i].chips, fam[j].chips);
      for (int v : r) CHECK(allowed.count(v) == 1);
    }
}

TEST_CASE("gold family m=4 has no preferred pair") {
  CHECK_THROWS_AS(seq::generate_gold_family(4), std::invalid_argument);
  CHECK_THROWS_AS(seq::generate_gold_family(8), std::invalid_argument);
}

TEST_CASE("walsh order 4: exact Sylvester rows and orthogonality") {
  const auto fam = seq::generate_walsh_family(4);
  REQUIRE(fam.size() == 4);
  CHECK(fam[0].chips == std::vector<int>{+1, +1, +1, +1});
  CHECK(fam[1].chips == std::vector<int>{+1, -1, +1, -1});
  CHECK(fam[2].chips == std::vector<int>{+1, +1, -1, -1});
  CHECK(fam[3].chips == std::vector<int>{+1, -1, -1, +1});
  int dot = 0;
  for (int i = 0; i < 4; ++i) dot += fam[1].chips[i] * fam[2].chips[i];
  CHECK(dot == 0);
}

TEST_CASE("walsh order 64: mutually orthogonal rows") {
  const auto fam = seq::generate_walsh_family(64);
  REQUIRE(fam.size() == 64);
  for (std::size_t i = 0; i < fam.size(); ++i)
    for (std::size_t j = i; j < fam.size(); ++j) {
      int dot = 0;
      for (int k = 0; k < 64; ++k) dot += fam[i].chips[k] * fam[j].chips[k];
      CHECK(dot == (i == j ? 64 : 0));
    }
}

TEST_CASE("walsh rejects non-power-of-two and out-of-range orders") {
  CHECK_THROWS_AS(seq::generate_walsh_family(6), std::invalid_argument);
  CHECK_THROWS_AS(seq::generate_walsh_family(2), std::invalid_argument);
  CHECK_THROWS_AS(seq::generate_walsh_family(512), std::invalid_argument);
}

TEST_CASE("kasami small set m=6: 8 sequences of length 63, three-valued") {
  const auto fam = seq::generate_kasami_small(6);
  REQUIRE(fam.size() == 8);
  for (const auto& s : fam) CHECK(s.length() == 63);
  const auto values = family_cross_values(fam);
  const std::set<int> allowed = {-9, -1, 7};
  for (int v : values) CHECK(allowed.count(v) == 1);
}

TEST_CASE("kasami small set m=8: 16 sequences of length 255") {
  const auto fam = seq::generate_kasami_small(8);
  REQUIRE(fam.size() == 16);
  for (const auto& s : fam) CHECK(s.length() == 255);
  const std::set<int> allowed = {-17, -1, 15};
  const auto r = brute_correlation(fam[2].chips, fam[9].chips);
  for (int v : r) CHECK(allowed.count(v) == 1);
}

TEST_CASE("kasami rejects odd degree") {
  CHECK_THROWS_AS(seq::generate_kasami_small(5), std::invalid_argument);
}

TEST_CASE("hybrid is the element-wise product") {
  ChipSequence g{{+1, -1, +1}, Family::Gold, 0};
  ChipSequence w{{+1, +1, -1}, Family::Walsh, 0};
  const auto h = seq::make_hybrid(g, w);
  CHECK(h.chips == std::vector<int>{+1, -1, -1});
  CHECK(h.family == Family::Hybrid);
}

TEST_CASE("hybrid with the all-ones walsh row is the identity on gold") {
  const auto gold = seq::generate_gold_family(5);
  const auto walsh = seq::generate_walsh_family(32);
  const auto h = seq::make_hybrid(gold[7], walsh[0]);
  const auto extended = seq::extend_periodic(gold[7], 32);
  CHECK(h.chips == extended.chips);
  CHECK(h.chips[31] == gold[7].chips[0]); // the appended chip wraps around
}

TEST_CASE("hybrid length rule: 31 -> 32 by periodic extension, chip by chip") {
  const auto gold = seq::generate_gold_family(5);
  const auto walsh = seq::generate_walsh_family(32);
  const auto h = seq::make_hybrid(gold[3], walsh[5]);
  REQUIRE(h.length() == 32);
  for (int i = 0; i < 32; ++i)
    CHECK(h.chips[i] == gold[3].chips[i % 31] * walsh[5].chips[i]);
}

TEST_CASE("hybrid rejects irreconcilable lengths") {
  const auto gold = seq::generate_gold_family(5);
  const auto walsh = seq::generate_walsh_family(64);
  CHECK_THROWS_AS(seq::make_hybrid(gold[0], walsh[0]), std::invalid_argument);
}

TEST_CASE("correlation: self at zero lag equals N") {
  const auto s = seq::generate_msequence({5, {5, 2}, 1});
  const auto p = seq::periodic_correlation(s, s);
  CHECK(p.values[0] == 31);
  CHECK(p.is_auto);
}

TEST_CASE("correlation: m=3 autocorrelation off-peak is -1") {
  const auto s = seq::generate_msequence({3, {3, 2}, 1});
  const auto p = seq::periodic_correlation(s, s);
  for (int tau = 1; tau < 7; ++tau) CHECK(p.values[tau] == -1);
  CHECK(p.peak_offzero == 1);
}

TEST_CASE("correlation: distinct walsh rows orthogonal at zero lag") {
  const auto fam = seq::generate_walsh_family(16);
  const auto p = seq::periodic_correlation(fam[3], fam[9]);
  CHECK(p.values[0] == 0);
}

TEST_CASE("correlation rejects length mismatch") {
  const auto a = seq::generate_msequence({3, {3, 2}, 1});
  const auto b = seq::generate_msequence({5, {5, 2}, 1});
  CHECK_THROWS_AS(seq::periodic_correlation(a, b), std::invalid_argument);
}

TEST_CASE("fft path equals the direct path exactly on random pairs up to N=256") {
  Rng rng(42);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 2 + static_cast<int>(rng.uniform_int(255)); // 2..256, odd and even
    ChipSequence a, b;
    a.chips.resize(n);
    b.chips.resize(n);
    for (int i = 0; i < n; ++i) {
      a.chips[i] = rng.uniform() < 0.5 ? 1 : -1;
      b.chips[i] = rng.uniform() < 0.5 ? 1 : -1;
    }
    const auto direct = seq::periodic_correlation_direct(a, b);
    const auto fast = seq::periodic_correlation_fft(a, b);
    REQUIRE(direct.values == fast.values);
    CHECK(direct.values == brute_correlation(a.chips, b.chips));
  }
}

TEST_CASE("papr: constant sequence of length 8 gives exactly 8") {
  ChipSequence s;
  s.chips.assign(8, +1);
  CHECK(seq::measure_papr(s) == doctest::Approx(8.0).epsilon(1e-9));
}

TEST_CASE("papr is at least 1 and padding handles non-power-of-two lengths") {
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 3 + static_cast<int>(rng.uniform_int(200));
    ChipSequence s;
    s.chips.resize(n);
    for (int i = 0; i < n; ++i) s.chips[i] = rng.uniform() < 0.5 ? 1 : -1;
    CHECK(seq::measure_papr(s) >= 1.0 - 1e-12);
  }
}

TEST_CASE("every generated sequence is bipolar with its declared length") {
  std::vector<std::vector<ChipSequence>> families;
  families.push_back(seq::generate_gold_family(5));
  families.push_back(seq::generate_gold_family(6));
  families.push_back(seq::generate_walsh_family(32));
  families.push_back(seq::generate_kasami_small(6));
  for (const auto& fam : families)
    for (const auto& s : fam) {
      CHECK(s.length() > 0);
      for (int c : s.chips) CHECK((c == 1 || c == -1));
    }
}

TEST_CASE("codebook text round-trips") {
  const auto fam = seq::generate_gold_family(5);
  const auto text = seq::codebook_to_text(fam);
  const auto parsed = seq::codebook_from_text(text);
  REQUIRE(parsed.size() == fam.size());
  for (std::size_t i = 0; i < fam.size(); ++i) {
    CHECK(parsed[i].chips == fam[i].chips);
    CHECK(parsed[i].family == fam[i].family);
    CHECK(parsed[i].index == fam[i].index);
  }
  // header line shape: family length index
  CHECK(text.rfind("gold 31 0\n", 0) == 0);
}

TEST_CASE("hybrid claim report records both sides of the product identity") {
  const auto report = seq::hybrid_claim_report(5, 32, 6);
  REQUIRE(report.records.size() == 6);
  for (const auto& rec : report.records) {
    CHECK(rec.lhs.size() == 32);
    CHECK(rec.rhs.size() == 32);
    CHECK(rec.papr_gold >= 1.0);
    CHECK(rec.papr_walsh >= 1.0);
    CHECK(rec.papr_hybrid >= 1.0);
    CHECK(rec.lags_equal <= 32);
  }
  const auto text = seq::render_claim_report(report);
  CHECK(text.find("summary:") != std::string::npos);
}

TEST_CASE("coupling helpers: sync uses zero lag, async the off-zero peak") {
  const auto walsh = seq::generate_walsh_family(8);
  CHECK(seq::coupling_sync(walsh[1], walsh[2]) == doctest::Approx(0.0)); // orthogonal rows
  CHECK(seq::coupling_sync(walsh[1], walsh[1]) == doctest::Approx(1.0)); // identical
  CHECK(seq::coupling_async(walsh[1], walsh[1]) == doctest::Approx(1.0));

  const auto gold = seq::generate_gold_family(5);
  // preferred-pair peak is 9 at N=31 for every distinct pair
  CHECK(seq::coupling_async(gold[0], gold[1]) == doctest::Approx(81.0 / (31.0 * 31.0)));
  CHECK(seq::coupling_sync(gold[0], gold[1]) <= 81.0 / (31.0 * 31.0) + 1e-12);
}
