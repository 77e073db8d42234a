#include "doctest.h"

#include <sstream>

#include "gkdv/config.hpp"
#include "gkdv/error.hpp"
#include "gkdv/report.hpp"
#include "json.hpp"

using namespace gkdv;

namespace {
std::vector<std::string> violations(const std::string& text) {
  try {
    parse_config_text(text);
  } catch (const ConfigError& e) {
    return e.violations();
  }
  return {};
}
bool any_contains(const std::vector<std::string>& v, const std::string& needle) {
  for (const auto& s : v) {
    if (s.find(needle) != std::string::npos) return true;
  }
  return false;
}
}  // namespace

TEST_CASE("minimal config") {
  const auto cfg = parse_config_text("experiment: soliton_benchmark\ncoefficients:\n  alpha: \"1\"\n");
  CHECK(cfg.spec.kind == ExperimentKind::soliton_benchmark);
  REQUIRE(cfg.spec.coefficients);
  CHECK(cfg.spec.coefficients->alpha.eval(0, 0) == 1.0);
  CHECK(cfg.run_id.size() == 12);
  CHECK(cfg.config_hash.size() == 16);
}

TEST_CASE("unknown key gets a suggestion") {
  const auto v = violations("experiment: soliton_benchmark\ncoefficients:\n  alpa: \"1\"\n");
  REQUIRE(v.size() == 1);
  CHECK(any_contains(v, "alpa"));
  CHECK(any_contains(v, "did you mean 'alpha'"));
}

TEST_CASE("expression errors carry a column") {
  const auto v = violations("experiment: soliton_benchmark\ncoefficients:\n  alpha: \"2+tanh(\"\n");
  REQUIRE(v.size() == 1);
  CHECK(any_contains(v, "coefficients.alpha"));
  CHECK(any_contains(v, "column 7"));
}

TEST_CASE("every violation is listed") {
  const auto v = violations(
      "experiment:\n  kind: wavepacket\n  sed: 3\ngrid:\n  num_points: 100\nsolver:\n  dt: -1\n"
      "coefficients:\n  beta: \"x +\"\n");
  CHECK(v.size() == 4);
  CHECK(any_contains(v, "experiment.sed"));
  CHECK(any_contains(v, "did you mean 'seed'"));
  CHECK(any_contains(v, "grid.num_points"));
  CHECK(any_contains(v, "solver.dt"));
  CHECK(any_contains(v, "coefficients.beta"));
  CHECK(any_contains(violations("experiment: nope\n"), "unknown kind"));
}

TEST_CASE("config values reach the spec") {
  const auto cfg = parse_config_text(
      "experiment:\n  kind: bona_smith\n  seed: 42\n  n_values: [8, 16]\n  params: {amplitude: 0.25}\n"
      "grid:\n  half_width: 2*pi\n  num_points: 256\n"
      "split:\n  kind: softplus\n  kappa: 5\n"
      "solver:\n  t_final: 0.1\n  dt: 1e-4\n");
  CHECK(cfg.spec.seed == 42);
  CHECK(cfg.spec.n_values == std::vector<std::size_t>{8, 16});
  CHECK(cfg.spec.param("amplitude", 0) == 0.25);
  CHECK(cfg.spec.half_width == doctest::Approx(2 * 3.141592653589793));
  CHECK(cfg.spec.num_points == 256);
  CHECK(*cfg.spec.dt == 1e-4);
  REQUIRE(cfg.spec.coefficients);
}

TEST_CASE("run id follows content and seed") {
  const std::string text = "experiment: wavepacket\n";
  auto a = parse_config_text(text), b = parse_config_text(text);
  CHECK(a.run_id == b.run_id);
  set_seed(b, 7);
  CHECK(a.run_id != b.run_id);
  CHECK(a.config_hash == b.config_hash);
  CHECK(parse_config_text(text + "# comment\n").config_hash != a.config_hash);
}

TEST_CASE("edit distance") {
  CHECK(edit_distance("alpa", "alpha") == 1);
  CHECK(edit_distance("", "abc") == 3);
  CHECK(edit_distance("kitten", "sitting") == 3);
}

TEST_CASE("FNV-1a reference vectors") {
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
  CHECK(fnv1a_hex("foobar") == "85944171f73967e8");
}

TEST_CASE("CSV and JSON emission") {
  const RunMeta meta{"abc123", "feed", 5};
  Table t{"demo", {"n", "value"}, {{1, 0.5}, {2, 0.25}}};
  std::ostringstream os;
  write_table_csv(os, t, meta, true);
  CHECK(os.str() ==
        "# demo\n# run_id abc123\n# config_hash feed\n# seed 5\n"
        "n,value,hypothesis_violation\n1,0.5,1\n2,0.25,1\n");

  ExperimentReport rep;
  rep.kind = ExperimentKind::wavepacket;
  rep.tables.push_back(t);
  rep.verdicts.push_back({"v", false, 3.0, 2.0, "<=", "note"});
  rep.scalars["x"] = 1.5;
  const auto j = nlohmann::json::parse(summary_json(rep, meta));
  CHECK(j["run_id"] == "abc123");
  CHECK(j["passed"] == false);
  CHECK(j["verdicts"][0]["threshold"] == 2.0);
  CHECK(j["scalars"]["x"] == 1.5);
  CHECK(j["tables"][0] == "demo.csv");
}
