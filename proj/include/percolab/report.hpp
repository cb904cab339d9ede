#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "percolab/bypass.hpp"
#include "percolab/experiments.hpp"

namespace percolab {

/// Deterministic numeric formatting shared by every CSV writer: shortest
/// round-trip representation so identical runs yield byte-identical bodies.
std::string format_double(double v);

/// Tidy CSV writers, one observation per row. Column schemas are documented
/// in the README.
void write_estimate_csv(const EstimateRecord& rec, const std::string& path);
void write_lipschitz_csv(const LipschitzReport& report, const std::string& path);
void write_decay_csv(const DecayReport& report, const std::string& path);
void write_tail_csv(const std::vector<TailRow>& rows, const std::string& path);
void write_budget_csv(const BudgetReport& report, const std::string& path);
void write_constructive_csv(const std::vector<ConstructiveSample>& samples,
                            const std::string& path);
void write_general_scan_csv(const GeneralScanReport& report, const std::string& path);

/// Re-reads a CSV body (no quoting; plain comma separation).
std::vector<std::vector<std::string>> read_csv(const std::string& path);

/// Git-style content hash of a blob: sha1("blob <len>\0" + content), hex.
std::string git_blob_sha1(const std::string& content);

/// Run manifest written atomically at run end: config echo, config hash,
/// timestamps, produced files, verdict lines.
struct RunManifest {
  std::string config_json;
  std::string config_hash;
  std::string started_at;
  std::string finished_at;
  std::string version = "percolab 0.1.0";
  std::vector<std::string> outputs;
  std::vector<std::pair<std::string, std::string>> verdicts;
};

void write_manifest(const RunManifest& manifest, const std::string& path);

}  // namespace percolab
