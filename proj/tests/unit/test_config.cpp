#include <doctest.h>

#include <charconv>
#include <cstring>

#include "config.hpp"
#include "qmkdv/error.hpp"
#include "qmkdv/random.hpp"
#include "report.hpp"

using namespace qmkdv::studies;
using qmkdv::Error;

TEST_CASE("sections, comments and typed lookups") {
  const auto cfg = Config::parse(
      "study.kind = decay   # trailing comment\n"
      "\n"
      "[grid]\n"
      "n = 256\n"
      "L = 40.5\n"
      "[probe]\n"
      "xi = 0.9, 1.0 ,1.1\n"
      "flag = yes\n");
  CHECK(cfg.get_string("study.kind", "") == "decay");
  CHECK(cfg.get_long("grid.n", 0) == 256);
  CHECK(cfg.get_double("grid.L", 0.0) == 40.5);
  CHECK(cfg.get_list("probe.xi", {}) == std::vector<double>{0.9, 1.0, 1.1});
  CHECK(cfg.get_bool("probe.flag", false));
  CHECK(cfg.get_double("absent", 7.0) == 7.0);
  CHECK(cfg.unused_keys().empty());
}

TEST_CASE("unread keys are reported") {
  const auto cfg = Config::parse("a = 1\nb = 2\n");
  (void)cfg.get_long("a", 0);
  CHECK(cfg.unused_keys() == std::vector<std::string>{"b"});
}

TEST_CASE("malformed input is a config error") {
  CHECK_THROWS_AS(Config::parse("a = 1\na = 2\n"), Error);
  CHECK_THROWS_AS(Config::parse("just text\n"), Error);
  CHECK_THROWS_AS(Config::parse("[open\n"), Error);
  const auto cfg = Config::parse("n = 12x\nb = maybe\n");
  CHECK_THROWS_AS(cfg.get_long("n", 0), Error);
  CHECK_THROWS_AS(cfg.get_double("n", 0.0), Error);
  CHECK_THROWS_AS(cfg.get_bool("b", false), Error);
  CHECK_THROWS_AS(Config::load("/nonexistent/qmkdv.cfg"), Error);
  try {
    Config::load("/nonexistent/qmkdv.cfg");
  } catch (const Error& e) {
    CHECK(e.kind() == qmkdv::ErrorKind::ConfigError);
  }
}

TEST_CASE("property: report numbers round-trip exactly") {
  qmkdv::SplitMix64 rng(77);
  for (int i = 0; i < 10000; ++i) {
    const std::uint64_t bits = rng.next();
    double v;
    std::memcpy(&v, &bits, sizeof v);
    if (!std::isfinite(v)) continue;
    const std::string s = fmt(v);
    double back = 0.0;
    std::from_chars(s.data(), s.data() + s.size(), back);
    CHECK(std::memcmp(&back, &v, sizeof v) == 0);
  }
}
