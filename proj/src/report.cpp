#include "percolab/report.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace percolab {

std::string format_double(double v) {
  char buf[64];
  // Shortest representation that round-trips; stable across runs.
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    double back = 0.0;
    std::sscanf(buf, "%lf", &back);
    if (back == v) return buf;
  }
  return buf;
}

namespace {

struct CsvFile {
  FILE* fp;
  explicit CsvFile(const std::string& path) : fp(std::fopen(path.c_str(), "w")) {
    require(fp != nullptr, "unwritable output path: " + path);
  }
  ~CsvFile() {
    if (fp) std::fclose(fp);
  }
  void row(const std::vector<std::string>& cells) {
    for (size_t i = 0; i < cells.size(); ++i)
      std::fprintf(fp, "%s%s", i ? "," : "", cells[i].c_str());
    std::fprintf(fp, "\n");
  }
};

std::string point_str(const Point& p) {
  std::string s;
  for (int i = 0; i < p.dim(); ++i) s += (i ? " " : "") + std::to_string(p[i]);
  return s;
}

}  // namespace

void write_estimate_csv(const EstimateRecord& rec, const std::string& path) {
  CsvFile csv(path);
  csv.row({"trial", "seed", "p", "n", "x", "discarded", "distance", "ratio"});
  for (const TrialValue& v : rec.values)
    csv.row({std::to_string(v.trial), std::to_string(v.seed), format_double(rec.p),
             std::to_string(rec.n), point_str(rec.x), v.discarded ? "1" : "0",
             std::to_string(v.distance), format_double(v.ratio)});
}

void write_lipschitz_csv(const LipschitzReport& report, const std::string& path) {
  CsvFile csv(path);
  csv.row({"kind", "p", "n", "trial", "distance", "ratio", "mean_ratio", "half_width", "slope",
           "kappa_hat"});
  for (size_t i = 0; i < report.grid.size(); ++i) {
    const EstimateRecord& rec = report.records[i];
    for (const TrialValue& v : rec.values)
      csv.row({"obs", format_double(rec.p), std::to_string(rec.n), std::to_string(v.trial),
               std::to_string(v.distance), format_double(v.ratio), "", "", "", ""});
    csv.row({"level", format_double(rec.p), std::to_string(rec.n), "", "", "",
             format_double(rec.mean_ratio), format_double(rec.half_width),
             i ? format_double(report.slopes[i - 1]) : "", ""});
  }
  csv.row({"summary", "", "", "", "", "", "", "", "", format_double(report.kappa_hat)});
}

void write_decay_csv(const DecayReport& report, const std::string& path) {
  CsvFile csv(path);
  csv.row({"N", "trials", "bad", "p_hat", "half_width", "one_sided", "upper_bound", "log_slope"});
  for (const DecayRow& row : report.rows)
    csv.row({std::to_string(row.n_box), std::to_string(row.trials), std::to_string(row.bad),
             format_double(row.p_hat), format_double(row.half_width), row.one_sided ? "1" : "0",
             format_double(row.upper_bound),
             report.slope_valid ? format_double(report.log_slope) : ""});
}

void write_tail_csv(const std::vector<TailRow>& rows, const std::string& path) {
  CsvFile csv(path);
  csv.row({"beta", "trials", "hits", "frequency", "half_width"});
  for (const TailRow& row : rows)
    csv.row({format_double(row.beta), std::to_string(row.trials), std::to_string(row.hits),
             format_double(row.frequency), format_double(row.half_width)});
}

void write_budget_csv(const BudgetReport& report, const std::string& path) {
  CsvFile csv(path);
  csv.row({"trial", "discarded", "M", "horizon_exceeded", "gamma_length", "weighted_sum",
           "sum_arm", "horizon_arm", "bad_event"});
  for (const BudgetSample& s : report.samples)
    csv.row({std::to_string(s.trial), s.discarded ? "1" : "0", std::to_string(s.M),
             s.horizon_exceeded ? "1" : "0", std::to_string(s.gamma_length),
             format_double(static_cast<double>(s.weighted_sum)), s.sum_arm ? "1" : "0",
             s.horizon_arm ? "1" : "0", s.bad_event ? "1" : "0"});
}

void write_constructive_csv(const std::vector<ConstructiveSample>& samples,
                            const std::string& path) {
  CsvFile csv(path);
  csv.row({"seed", "discarded", "discard_reason", "d_q", "d_p", "gamma_length", "trimmed",
           "closed_on_trimmed", "bypassed", "components", "sum_shell", "added", "removed",
           "stitch", "stitch_fallback", "M", "shells_built", "shells_dropped",
           "shells_inapplicable", "inequality_ok"});
  for (const ConstructiveSample& s : samples)
    csv.row({std::to_string(s.seed), s.discarded ? "1" : "0", s.discard_reason,
             std::to_string(s.d_q), std::to_string(s.d_p), std::to_string(s.gamma_length),
             std::to_string(s.trimmed_count), std::to_string(s.closed_on_trimmed),
             std::to_string(s.bypassed), std::to_string(s.components),
             format_double(static_cast<double>(s.sum_shell_sizes)), std::to_string(s.added),
             std::to_string(s.removed), std::to_string(s.stitch), s.stitch_fallback ? "1" : "0",
             std::to_string(s.M), std::to_string(s.shells_built),
             std::to_string(s.shells_dropped), std::to_string(s.shells_inapplicable),
             s.inequality_ok ? "1" : "0"});
}

void write_general_scan_csv(const GeneralScanReport& report, const std::string& path) {
  CsvFile csv(path);
  csv.row({"trial", "discarded", "t_f", "t_g", "len_f", "len_g", "sup_gap", "bound_ok"});
  for (const GeneralScanSample& s : report.samples)
    csv.row({std::to_string(s.trial), s.discarded ? "1" : "0", format_double(s.t_f),
             format_double(s.t_g), std::to_string(s.len_f), std::to_string(s.len_g),
             format_double(report.sup_gap), s.bound_ok ? "1" : "0"});
}

std::vector<std::vector<std::string>> read_csv(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), "cannot open CSV: " + path);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.push_back("");
    rows.push_back(cells);
  }
  return rows;
}

namespace {

// Compact SHA-1, standard rounds; enough for content addressing.
struct Sha1 {
  uint32_t h[5] = {0x67452301u, 0xEFCDAB89u, 0x98BADCFEu, 0x10325476u, 0xC3D2E1F0u};
  uint64_t total = 0;
  unsigned char block[64];
  size_t fill = 0;

  static uint32_t rol(uint32_t v, int s) { return (v << s) | (v >> (32 - s)); }

  void process(const unsigned char* p) {
    uint32_t w[80];
    for (int i = 0; i < 16; ++i)
      w[i] = (uint32_t(p[4 * i]) << 24) | (uint32_t(p[4 * i + 1]) << 16) |
             (uint32_t(p[4 * i + 2]) << 8) | uint32_t(p[4 * i + 3]);
    for (int i = 16; i < 80; ++i) w[i] = rol(w[i - 3] ^ w[i - 8] ^ w[i - 14] ^ w[i - 16], 1);
    uint32_t a = h[0], b = h[1], c = h[2], d = h[3], e = h[4];
    for (int i = 0; i < 80; ++i) {
      uint32_t f, k;
      if (i < 20) {
        f = (b & c) | (~b & d);
        k = 0x5A827999u;
      } else if (i < 40) {
        f = b ^ c ^ d;
        k = 0x6ED9EBA1u;
      } else if (i < 60) {
        f = (b & c) | (b & d) | (c & d);
        k = 0x8F1BBCDCu;
      } else {
        f = b ^ c ^ d;
        k = 0xCA62C1D6u;
      }
      uint32_t t = rol(a, 5) + f + e + k + w[i];
      e = d;
      d = c;
      c = rol(b, 30);
      b = a;
      a = t;
    }
    h[0] += a;
    h[1] += b;
    h[2] += c;
    h[3] += d;
    h[4] += e;
  }

  void update(const void* data, size_t len) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    total += len;
    while (len > 0) {
      size_t take = std::min(len, sizeof(block) - fill);
      std::memcpy(block + fill, p, take);
      fill += take;
      p += take;
      len -= take;
      if (fill == 64) {
        process(block);
        fill = 0;
      }
    }
  }

  std::string hex() {
    uint64_t bits = total * 8;
    unsigned char pad = 0x80;
    update(&pad, 1);
    unsigned char zero = 0;
    while (fill != 56) update(&zero, 1);
    unsigned char lenbuf[8];
    for (int i = 0; i < 8; ++i) lenbuf[i] = static_cast<unsigned char>(bits >> (56 - 8 * i));
    update(lenbuf, 8);
    char out[41];
    for (int i = 0; i < 5; ++i) std::snprintf(out + 8 * i, 9, "%08x", h[i]);
    return std::string(out, 40);
  }
};

}  // namespace

std::string git_blob_sha1(const std::string& content) {
  Sha1 sha;
  std::string header = "blob " + std::to_string(content.size());
  sha.update(header.data(), header.size() + 1);  // includes the NUL
  sha.update(content.data(), content.size());
  return sha.hex();
}

void write_manifest(const RunManifest& manifest, const std::string& path) {
  nlohmann::json j;
  j["version"] = manifest.version;
  j["config"] = nlohmann::json::parse(manifest.config_json.empty() ? "{}" : manifest.config_json);
  j["config_hash"] = manifest.config_hash;
  j["started_at"] = manifest.started_at;
  j["finished_at"] = manifest.finished_at;
  j["outputs"] = manifest.outputs;
  nlohmann::json verdicts = nlohmann::json::object();
  for (const auto& [k, v] : manifest.verdicts) verdicts[k] = v;
  j["verdicts"] = verdicts;
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp);
    require(out.good(), "unwritable manifest path: " + path);
    out << j.dump(1) << "\n";
  }
  require(std::rename(tmp.c_str(), path.c_str()) == 0, "manifest rename failed: " + path);
}

}  // namespace percolab
