#include "gkdv/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "gkdv/error.hpp"
#include "json.hpp"

namespace gkdv {

std::string fnv1a_hex(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_header(std::ostream& os, const RunMeta& meta, const std::string& what) {
  os << "# " << what << "\n";
  os << "# run_id " << meta.run_id << "\n";
  os << "# config_hash " << meta.config_hash << "\n";
  os << "# seed " << meta.seed << "\n";
}

void write_table_csv(std::ostream& os, const Table& table, const RunMeta& meta,
                     bool hypothesis_violation) {
  write_header(os, meta, table.name);
  for (std::size_t i = 0; i < table.columns.size(); ++i) os << table.columns[i] << ',';
  os << "hypothesis_violation\n";
  for (const auto& row : table.rows) {
    for (double v : row) os << format_number(v) << ',';
    os << (hypothesis_violation ? 1 : 0) << '\n';
  }
}

void write_norms_csv(std::ostream& os, const Trajectory& tr, const RunMeta& meta,
                     bool hypothesis_violation) {
  write_header(os, meta, "norms");
  os << "t,hs_norm,cumulative_seminorm,sup_norm,l2_norm,mass,hypothesis_violation\n";
  for (const auto& r : tr.norms) {
    os << format_number(r.t) << ',' << format_number(r.hs_norm) << ','
       << format_number(r.cumulative_seminorm) << ',' << format_number(r.sup_norm) << ','
       << format_number(r.l2_norm) << ',' << format_number(r.mass) << ','
       << (hypothesis_violation ? 1 : 0) << '\n';
  }
}

void write_trajectory_csv(std::ostream& os, const Trajectory& tr, const RunMeta& meta,
                          bool hypothesis_violation) {
  write_header(os, meta, "trajectory");
  os << "t,x,u,hypothesis_violation\n";
  const auto xs = tr.grid.nodes();
  for (std::size_t k = 0; k < tr.size(); ++k) {
    const auto u = tr.states[k].samples();
    for (std::size_t j = 0; j < xs.size(); ++j) {
      os << format_number(tr.times[k]) << ',' << format_number(xs[j]) << ','
         << format_number(u[j]) << ',' << (hypothesis_violation ? 1 : 0) << '\n';
    }
  }
}

namespace {

// JSON has no inf/nan; those go out as strings.
nlohmann::json number(double v) {
  if (std::isfinite(v)) return v;
  return format_number(v);
}

}  // namespace

std::string summary_json(const ExperimentReport& report, const RunMeta& meta) {
  nlohmann::ordered_json j;
  j["run_id"] = meta.run_id;
  j["config_hash"] = meta.config_hash;
  j["seed"] = meta.seed;
  j["experiment"] = to_string(report.kind);
  j["passed"] = report.passed();
  j["hypothesis_violation"] = report.hypothesis_violation;
  j["verdicts"] = nlohmann::json::array();
  for (const auto& v : report.verdicts) {
    nlohmann::ordered_json e;
    e["name"] = v.name;
    e["passed"] = v.passed;
    e["value"] = number(v.value);
    e["comparison"] = v.comparison;
    e["threshold"] = number(v.threshold);
    if (!v.note.empty()) e["note"] = v.note;
    j["verdicts"].push_back(e);
  }
  nlohmann::ordered_json scalars = nlohmann::ordered_json::object();
  for (const auto& [k, v] : report.scalars) scalars[k] = number(v);
  j["scalars"] = scalars;
  j["tables"] = nlohmann::json::array();
  for (const auto& t : report.tables) j["tables"].push_back(t.name + ".csv");
  j["notes"] = report.notes;
  return j.dump(2) + "\n";
}

void write_report(const std::filesystem::path& dir, const ExperimentReport& report,
                  const RunMeta& meta) {
  std::filesystem::create_directories(dir);
  auto open = [&](const std::string& name) {
    std::ofstream os(dir / name, std::ios::binary);
    if (!os) throw Error("cannot write " + (dir / name).string());
    return os;
  };
  for (const auto& t : report.tables) {
    auto os = open(t.name + ".csv");
    write_table_csv(os, t, meta, report.hypothesis_violation);
  }
  {
    auto os = open("hypotheses.txt");
    write_header(os, meta, "hypotheses");
    os << report.hypothesis_text;
  }
  auto os = open("summary.json");
  os << summary_json(report, meta);
}

}  // namespace gkdv
