#include <doctest.h>

#include <cmath>
#include <fstream>

#include "common/config.hpp"
#include "common/rng.hpp"

using namespace hynoma;

TEST_CASE("rng is deterministic per seed and differs across seeds") {
  Rng a(123), b(123), c(124);
  for (int i = 0; i < 100; ++i) {
    CHECK(a.next_u64() == b.next_u64());
  }
  bool differs = false;
  Rng a2(123);
  for (int i = 0; i < 10; ++i)
    if (a2.next_u64() != c.next_u64()) differs = true;
  CHECK(differs);
}

TEST_CASE("rng uniform stays in range and normal has sane moments") {
  Rng rng(5);
  double sum = 0.0, sq = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    const double z = rng.normal();
    sum += z;
    sq += z * z;
  }
  CHECK(std::abs(sum / n) < 0.02);
  CHECK(sq / n == doctest::Approx(1.0).epsilon(0.03));
}

TEST_CASE("complex normal has unit mean power") {
  Rng rng(9);
  double power = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) power += std::norm(rng.cnormal());
  CHECK(power / n == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("split streams are decoupled") {
  Rng base(77);
  Rng s1 = base.split(1), s2 = base.split(2);
  bool differs = false;
  for (int i = 0; i < 8; ++i)
    if (s1.next_u64() != s2.next_u64()) differs = true;
  CHECK(differs);
}

TEST_CASE("config parses keys, types and includes") {
  const std::string dir = "/tmp/hynoma_cfg_test";
  if (std::system(("mkdir -p " + dir).c_str()) != 0) FAIL("mkdir failed");
  {
    std::ofstream base(dir + "/base.cfg");
    base << "rings = 1\nho_margin_db = 3.0\n# comment\n";
  }
  {
    std::ofstream top(dir + "/top.cfg");
    top << "include base.cfg\nho_margin_db = 6.0\nname = desk\nflag = true\ninf_margin = inf\n";
  }
  const auto cfg = Config::from_file(dir + "/top.cfg");
  CHECK(cfg.get_int("rings") == 1);
  CHECK(cfg.get_double("ho_margin_db") == doctest::Approx(6.0)); // include overridden
  CHECK(cfg.get_string("name") == "desk");
  CHECK(cfg.get_bool("flag", false));
  CHECK(std::isinf(cfg.get_double("inf_margin")));
  CHECK(cfg.get_int("missing", 17) == 17);
  CHECK_THROWS(cfg.get_string("missing"));
}

TEST_CASE("config hash is stable and order-insensitive") {
  const auto a = Config::from_string("x = 1\ny = 2\n");
  const auto b = Config::from_string("y = 2\nx = 1\n");
  const auto c = Config::from_string("x = 1\ny = 3\n");
  CHECK(a.hash_hex() == b.hash_hex());
  CHECK(a.hash_hex() != c.hash_hex());
  CHECK(a.hash_hex().size() == 16);
}

TEST_CASE("config rejects malformed lines") {
  CHECK_THROWS(Config::from_string("just a line without equals\n"));
  CHECK_THROWS(Config::from_string("= value\n"));
  CHECK_THROWS(Config::from_string("include /nonexistent/nowhere.cfg\n"));
}
