#pragma once

// CSV and JSON emission. Every file opens with '#' comment lines carrying the
// run id and config hash; CSV rows carry a hypothesis_violation column.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "gkdv/experiments.hpp"
#include "gkdv/trajectory.hpp"

namespace gkdv {

struct RunMeta {
  std::string run_id;
  std::string config_hash;
  std::uint64_t seed = 0;
};

/// 64-bit FNV-1a, lowercase hex.
std::string fnv1a_hex(std::string_view text);

/// Shortest-roundtrip-ish decimal formatting used in every output file.
std::string format_number(double v);

void write_header(std::ostream& os, const RunMeta& meta, const std::string& what);
void write_table_csv(std::ostream& os, const Table& table, const RunMeta& meta,
                     bool hypothesis_violation);
/// Columns t, hs_norm, cumulative_seminorm, sup_norm, l2_norm, mass.
void write_norms_csv(std::ostream& os, const Trajectory& trajectory, const RunMeta& meta,
                     bool hypothesis_violation);
/// Long format: t, x, u for every stored state.
void write_trajectory_csv(std::ostream& os, const Trajectory& trajectory, const RunMeta& meta,
                          bool hypothesis_violation);
std::string summary_json(const ExperimentReport& report, const RunMeta& meta);

/// <dir>/<table>.csv for each table, summary.json, hypotheses.txt.
void write_report(const std::filesystem::path& dir, const ExperimentReport& report,
                  const RunMeta& meta);

}  // namespace gkdv
