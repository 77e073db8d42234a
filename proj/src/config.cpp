#include "gkdv/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "gkdv/error.hpp"
#include "gkdv/report.hpp"

namespace gkdv {

namespace {

const std::vector<std::string> top_keys = {"experiment", "grid", "coefficients", "split",
                                           "solver"};
const std::vector<std::string> experiment_keys = {
    "kind",        "seed",       "draws",          "n_values",
    "reference_n", "xi0_values", "perturbation_sizes", "u0",
    "params",      "hypothesis_violation"};
const std::vector<std::string> grid_keys = {"half_width", "num_points"};
const std::vector<std::string> coefficient_keys = {"alpha", "beta",    "gamma",
                                                   "delta", "epsilon", "alpha0"};
const std::vector<std::string> split_keys = {"kind", "beta1", "kappa"};
const std::vector<std::string> solver_keys = {"t_final", "dt", "s"};

class Reader {
public:
  std::vector<std::string> errors;

  void check_keys(const YAML::Node& node, const std::string& path,
                  const std::vector<std::string>& allowed) {
    if (!node.IsMap()) {
      errors.push_back(path + ": expected a mapping");
      return;
    }
    for (const auto& kv : node) {
      const auto key = kv.first.as<std::string>();
      if (std::find(allowed.begin(), allowed.end(), key) != allowed.end()) continue;
      std::string msg = (path.empty() ? key : path + "." + key) + ": unknown key";
      std::string best;
      std::size_t best_d = 3;
      for (const auto& a : allowed) {
        const auto d = edit_distance(key, a);
        if (d < best_d) {
          best_d = d;
          best = a;
        }
      }
      if (!best.empty()) msg += " (did you mean '" + best + "'?)";
      errors.push_back(msg);
    }
  }

  std::optional<double> number(const YAML::Node& node, const std::string& path) {
    if (!node.IsScalar()) {
      errors.push_back(path + ": expected a number");
      return std::nullopt;
    }
    const auto text = node.as<std::string>();
    try {
      const auto e = CoefficientExpr::parse(text);
      if (!e.is_constant()) {
        errors.push_back(path + ": expected a constant, got '" + text + "'");
        return std::nullopt;
      }
      return e.eval(0.0, 0.0);
    } catch (const ParseError& err) {
      errors.push_back(path + ": " + err.what());
    }
    return std::nullopt;
  }

  std::optional<long> integer(const YAML::Node& node, const std::string& path, long min) {
    const auto v = number(node, path);
    if (!v) return std::nullopt;
    if (*v != std::floor(*v) || *v < static_cast<double>(min)) {
      errors.push_back(path + ": expected an integer >= " + std::to_string(min));
      return std::nullopt;
    }
    return static_cast<long>(*v);
  }

  std::optional<CoefficientExpr> expr(const YAML::Node& node, const std::string& path) {
    if (!node.IsScalar()) {
      errors.push_back(path + ": expected an expression string");
      return std::nullopt;
    }
    try {
      return CoefficientExpr::parse(node.as<std::string>());
    } catch (const ParseError& err) {
      errors.push_back(path + ": " + err.what());
    }
    return std::nullopt;
  }

  template <class T, class F>
  std::vector<T> list(const YAML::Node& node, const std::string& path, F item) {
    std::vector<T> out;
    if (!node.IsSequence()) {
      errors.push_back(path + ": expected a list");
      return out;
    }
    for (std::size_t i = 0; i < node.size(); ++i) {
      if (auto v = item(node[i], path + "[" + std::to_string(i) + "]")) out.push_back(*v);
    }
    return out;
  }
};

bool power_of_two(long n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace

std::size_t edit_distance(const std::string& a, const std::string& b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] != b[j - 1])});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

RunConfig parse_config_text(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError({std::string("yaml: ") + e.what()});
  }
  Reader r;
  RunConfig cfg;
  if (!root.IsMap()) throw ConfigError({"top level: expected a mapping"});
  r.check_keys(root, "", top_keys);

  const auto exp = root["experiment"];
  if (!exp) throw ConfigError(
      [&] { auto e = r.errors; e.push_back("experiment: missing section"); return e; }());
  std::optional<ExperimentKind> kind;
  if (exp.IsScalar()) {
    kind = parse_experiment_kind(exp.as<std::string>());
    if (!kind) r.errors.push_back("experiment: unknown kind '" + exp.as<std::string>() + "'");
  } else {
    r.check_keys(exp, "experiment", experiment_keys);
    if (exp.IsMap()) {
      if (!exp["kind"]) {
        r.errors.push_back("experiment.kind: missing");
      } else {
        kind = parse_experiment_kind(exp["kind"].as<std::string>());
        if (!kind) {
          r.errors.push_back("experiment.kind: unknown kind '" + exp["kind"].as<std::string>() +
                             "'");
        }
      }
    }
  }
  if (!kind) throw ConfigError(r.errors);
  auto& spec = cfg.spec;
  spec = default_spec(*kind);

  if (exp.IsMap()) {
    if (exp["seed"]) {
      if (auto v = r.integer(exp["seed"], "experiment.seed", 0)) spec.seed = *v;
    }
    if (exp["draws"]) {
      if (auto v = r.integer(exp["draws"], "experiment.draws", 1)) spec.draws = *v;
    }
    if (exp["reference_n"]) {
      if (auto v = r.integer(exp["reference_n"], "experiment.reference_n", 1)) {
        spec.reference_n = *v;
      }
    }
    if (exp["n_values"]) {
      spec.n_values = r.list<std::size_t>(
          exp["n_values"], "experiment.n_values",
          [&](const YAML::Node& n, const std::string& p) -> std::optional<std::size_t> {
            if (auto v = r.integer(n, p, 1)) return static_cast<std::size_t>(*v);
            return std::nullopt;
          });
    }
    auto reals = [&](const char* key, std::vector<double>& out) {
      if (!exp[key]) return;
      out = r.list<double>(exp[key], std::string("experiment.") + key,
                           [&](const YAML::Node& n, const std::string& p) { return r.number(n, p); });
    };
    reals("xi0_values", spec.xi0_values);
    reals("perturbation_sizes", spec.perturbation_sizes);
    if (exp["u0"]) spec.u0 = r.expr(exp["u0"], "experiment.u0");
    if (exp["params"]) {
      if (!exp["params"].IsMap()) {
        r.errors.push_back("experiment.params: expected a mapping");
      } else {
        for (const auto& kv : exp["params"]) {
          const auto key = kv.first.as<std::string>();
          if (auto v = r.number(kv.second, "experiment.params." + key)) spec.params[key] = *v;
        }
      }
    }
    if (exp["hypothesis_violation"]) {
      try {
        spec.hypothesis_violation = exp["hypothesis_violation"].as<bool>();
      } catch (const YAML::Exception&) {
        r.errors.push_back("experiment.hypothesis_violation: expected true or false");
      }
    }
  }

  if (const auto grid = root["grid"]) {
    r.check_keys(grid, "grid", grid_keys);
    if (grid.IsMap()) {
      if (grid["half_width"]) {
        if (auto v = r.number(grid["half_width"], "grid.half_width")) {
          if (*v > 0) spec.half_width = *v;
          else r.errors.push_back("grid.half_width: must be positive");
        }
      }
      if (grid["num_points"]) {
        if (auto v = r.integer(grid["num_points"], "grid.num_points", 8)) {
          if (power_of_two(*v)) spec.num_points = *v;
          else r.errors.push_back("grid.num_points: must be a power of two");
        }
      }
    }
  }

  std::optional<CoefficientSet> set;
  if (const auto co = root["coefficients"]) {
    r.check_keys(co, "coefficients", coefficient_keys);
    if (co.IsMap()) {
      set.emplace();
      auto field = [&](const char* key, CoefficientExpr& out) {
        if (!co[key]) return;
        if (auto e = r.expr(co[key], std::string("coefficients.") + key)) out = *e;
      };
      field("alpha", set->alpha);
      field("beta", set->beta);
      field("gamma", set->gamma);
      field("delta", set->delta);
      field("epsilon", set->epsilon);
      if (co["alpha0"]) {
        if (auto v = r.number(co["alpha0"], "coefficients.alpha0")) {
          if (*v > 0 && *v <= 1) set->alpha0 = *v;
          else r.errors.push_back("coefficients.alpha0: must lie in (0, 1]");
        }
      }
    }
  }
  SplitStrategy strategy;
  const auto split = root["split"];
  if (split) {
    r.check_keys(split, "split", split_keys);
    if (split.IsMap()) {
      if (split["kind"]) {
        const auto k = split["kind"].as<std::string>();
        if (k == "user_provided") strategy.kind = SplitKind::user_provided;
        else if (k == "softplus") strategy.kind = SplitKind::softplus;
        else r.errors.push_back("split.kind: expected user_provided or softplus, got '" + k + "'");
      }
      if (split["beta1"]) strategy.beta1 = r.expr(split["beta1"], "split.beta1");
      if (split["kappa"]) {
        if (auto v = r.number(split["kappa"], "split.kappa")) strategy.kappa = *v;
      }
    }
  }
  if (split && !set) set = default_coefficients(*kind);
  if (set) {
    apply_split(*set, strategy);
    spec.coefficients = *set;
  }

  if (const auto so = root["solver"]) {
    r.check_keys(so, "solver", solver_keys);
    if (so.IsMap()) {
      if (so["t_final"]) {
        if (auto v = r.number(so["t_final"], "solver.t_final")) {
          if (*v > 0) spec.t_final = *v;
          else r.errors.push_back("solver.t_final: must be positive");
        }
      }
      if (so["dt"]) {
        if (auto v = r.number(so["dt"], "solver.dt")) {
          if (*v > 0) spec.dt = *v;
          else r.errors.push_back("solver.dt: must be positive");
        }
      }
      if (so["s"]) {
        if (auto v = r.number(so["s"], "solver.s")) spec.s = *v;
      }
    }
  }

  if (!r.errors.empty()) throw ConfigError(r.errors);
  cfg.config_hash = fnv1a_hex(text);
  set_seed(cfg, spec.seed);
  return cfg;
}

void set_seed(RunConfig& config, std::uint64_t seed) {
  config.spec.seed = seed;
  config.run_id = fnv1a_hex(config.config_hash + ":" + std::to_string(seed)).substr(0, 12);
}

RunConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError({path.string() + ": cannot read file"});
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

}  // namespace gkdv
