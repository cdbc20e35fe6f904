#include <doctest.h>

#include <nlohmann/json.hpp>

#include <cmath>
#include <sstream>

#include "vrjp/config.hpp"
#include "vrjp/errors.hpp"
#include "vrjp/report.hpp"
#include "vrjp/rng.hpp"

using namespace vrjp;

TEST_CASE("config text round trip") {
  ExperimentConfig cfg("survival");
  cfg.set("c", 0.1);
  cfg.set("b", 2);
  cfg.set("seed", std::uint64_t{18446744073709551615ull});
  cfg.set("nu", std::string("0:0.25,2:0.75"));
  cfg.set("out", std::string("/tmp/x"));
  const ExperimentConfig back = ExperimentConfig::parse(cfg.to_text());
  CHECK(back == cfg);
  CHECK(back.command() == "survival");
  CHECK(back.get_double("c", 0) == 0.1);
  CHECK(back.get_int("b", 0) == 2);
  CHECK(back.seed() == 18446744073709551615ull);
  CHECK(back.output_path() == "/tmp/x");
}

TEST_CASE("format_double round-trips random doubles") {
  RngStream rng(1);
  for (int i = 0; i < 20000; ++i) {
    const double x = std::ldexp(rng.uniform() - 0.5, static_cast<int>(rng() % 200) - 100);
    const std::string s = format_double(x);
    CHECK(std::strtod(s.c_str(), nullptr) == x);
  }
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(2.0) == "2");
}

TEST_CASE("config parsing: comments, whitespace and errors") {
  const auto cfg = ExperimentConfig::parse("# header\ncommand = mu\n  c_min=0.5 # trailing\n\nsteps = 3\n");
  CHECK(cfg.command() == "mu");
  CHECK(cfg.get_double("c_min", 0) == 0.5);
  CHECK(cfg.get_count("steps", 1) == 3);
  CHECK(cfg.get_double("missing", 7.5) == 7.5);

  CHECK_THROWS_AS(ExperimentConfig::parse("no equals sign\n"), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::parse("bad key = 1\n"), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::parse("a = 1\na = 2\n"), ConfigError);

  ExperimentConfig bad("x");
  bad.set("c", std::string("abc"));
  bad.set("n", std::string("-3"));
  bad.set("list", std::string("1, 2,x"));
  CHECK_THROWS_AS(bad.get_double("c", 0), ConfigError);
  CHECK_THROWS_AS(bad.get_count("n", 1), ConfigError);
  CHECK_THROWS_AS(bad.get_uint64("n", 1), ConfigError);
  CHECK_THROWS_AS(bad.get_doubles("list", {}), ConfigError);
  CHECK_THROWS_AS(bad.set("k", std::string("a#b")), ConfigError);

  ExperimentConfig good("x");
  good.set("list", std::string("1, 2.5,3"));
  CHECK(good.get_doubles("list", {}) == std::vector<double>{1, 2.5, 3});
}

TEST_CASE("config hash ignores the output path only") {
  ExperimentConfig a("mu");
  a.set("c_min", 0.1);
  ExperimentConfig b = a;
  b.set("out", std::string("/elsewhere"));
  CHECK(a.hash() == b.hash());
  CHECK(a.hash_hex().size() == 16);
  b.set("c_min", 0.2);
  CHECK(a.hash() != b.hash());
}

TEST_CASE("csv escaping and header line") {
  CHECK(csv_escape("plain") == "plain");
  CHECK(csv_escape("a,b") == "\"a,b\"");
  CHECK(csv_escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(csv_escape("two\nlines") == "\"two\nlines\"");

  ExperimentConfig cfg("mu");
  cfg.set("seed", 9);
  Table t{{"x", "label"}, {}};
  t.add_row({"1", "a,b"});
  CHECK_THROWS_AS(t.add_row({"1"}), StructuralError);
  std::ostringstream out;
  write_csv(out, t, cfg);
  CHECK(out.str() == "# seed=9 config_hash=" + cfg.hash_hex() + "\nx,label\n1,\"a,b\"\n");
}

TEST_CASE("summary json") {
  RunSummary s;
  s.config = ExperimentConfig("survival");
  s.config.set("seed", 3);
  s.add_metric("p_hat", 0.75, 0.01, 400);
  s.add_metric("mu", 0.9);
  s.add_label("phase", "transient");
  s.warnings.push_back("cap hit");
  s.files.push_back("survival.csv");
  s.wall_seconds = 1.5;
  s.timestamp = "2020-01-01T00:00:00Z";
  const std::string text = to_json(s);
  REQUIRE(text.back() == '\n');
  const auto j = nlohmann::json::parse(text);
  CHECK(j["command"] == "survival");
  CHECK(j["seed"] == 3);
  CHECK(j["config_hash"] == s.config.hash_hex());
  CHECK(j["version"] == tool_version());
  CHECK(j["timing"]["wall_seconds"] == 1.5);
  CHECK(j["labels"]["phase"] == "transient");
  CHECK(j["metrics"].size() == 2);
  CHECK(j["warnings"][0] == "cap hit");
  CHECK(j["files"][0] == "survival.csv");

  // Keys appear in sorted order.
  std::string prev;
  for (auto it = j.begin(); it != j.end(); ++it) {
    CHECK(prev < it.key());
    prev = it.key();
  }
  RunSummary later = s;
  later.wall_seconds = 99;
  auto a = nlohmann::json::parse(to_json(s));
  auto b = nlohmann::json::parse(to_json(later));
  a.erase("timing");
  b.erase("timing");
  CHECK(a == b);
}
