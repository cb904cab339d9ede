#include "percolab/window.hpp"

#include <cstdio>
#include <cstring>

#include "percolab/rng.hpp"

namespace percolab {

Window::Window(int d, int64_t half_width) : d_(d), L_(half_width) {
  require(d >= 2 && d <= kMaxDim, "window dimension must satisfy 2 <= d <= 8");
  require(half_width >= 1, "window half-width must be >= 1");
  uint64_t count = 1;
  for (int i = 0; i < d; ++i) {
    require(count <= (uint64_t(1) << 31) / static_cast<uint64_t>(side()),
            "window too large for 32-bit vertex indexing");
    count *= static_cast<uint64_t>(side());
  }
  vertex_count_ = count;
  stride_.assign(d, 1);
  for (int i = d - 2; i >= 0; --i) stride_[i] = stride_[i + 1] * static_cast<uint64_t>(side());
  // Each axis contributes side^(d-1) * (side-1) edges.
  edge_count_ = 0;
  for (int i = 0; i < d; ++i) {
    uint64_t per_axis = static_cast<uint64_t>(side()) - 1;
    for (int j = 0; j < d; ++j)
      if (j != i) per_axis *= static_cast<uint64_t>(side());
    edge_count_ += per_axis;
  }
}

EdgeField sample_uniform_field(const Window& window, uint64_t seed) {
  EdgeField f;
  f.window = &window;
  f.seed = seed;
  f.kind = FieldKind::kUniform;
  f.values.assign(window.slot_count(), 0.0);
  uint64_t stream = derive_stream(seed, kStreamField);
  for (uint64_t s = 0; s < f.values.size(); ++s)
    if (window.slot_valid(s)) f.values[s] = uniform01(stream, s);
  return f;
}

namespace {
constexpr char kMagic[4] = {'P', 'C', 'L', 'B'};
constexpr uint32_t kVersion = 1;
}  // namespace

void write_field_snapshot(const EdgeField& field, const std::string& path) {
  FILE* fp = std::fopen(path.c_str(), "wb");
  require(fp != nullptr, "cannot open snapshot for writing: " + path);
  const Window& w = *field.window;
  uint32_t d = static_cast<uint32_t>(w.dim());
  int64_t L = w.half_width();
  uint64_t seed = field.seed;
  uint32_t kind = static_cast<uint32_t>(field.kind);
  uint64_t count = w.edge_count();
  std::fwrite(kMagic, 1, 4, fp);
  std::fwrite(&kVersion, sizeof kVersion, 1, fp);
  std::fwrite(&d, sizeof d, 1, fp);
  std::fwrite(&L, sizeof L, 1, fp);
  std::fwrite(&seed, sizeof seed, 1, fp);
  std::fwrite(&kind, sizeof kind, 1, fp);
  std::fwrite(&count, sizeof count, 1, fp);
  w.for_each_edge_canonical(
      [&](uint64_t slot) { std::fwrite(&field.values[slot], sizeof(double), 1, fp); });
  std::fclose(fp);
}

EdgeField read_field_snapshot(const Window& window, const std::string& path) {
  FILE* fp = std::fopen(path.c_str(), "rb");
  require(fp != nullptr, "cannot open snapshot: " + path);
  char magic[4];
  uint32_t version = 0, d = 0, kind = 0;
  int64_t L = 0;
  uint64_t seed = 0, count = 0;
  bool ok = std::fread(magic, 1, 4, fp) == 4 && std::memcmp(magic, kMagic, 4) == 0;
  ok = ok && std::fread(&version, sizeof version, 1, fp) == 1 && version == kVersion;
  ok = ok && std::fread(&d, sizeof d, 1, fp) == 1;
  ok = ok && std::fread(&L, sizeof L, 1, fp) == 1;
  ok = ok && std::fread(&seed, sizeof seed, 1, fp) == 1;
  ok = ok && std::fread(&kind, sizeof kind, 1, fp) == 1;
  ok = ok && std::fread(&count, sizeof count, 1, fp) == 1;
  if (!ok) {
    std::fclose(fp);
    throw ConfigError("malformed field snapshot: " + path);
  }
  if (d != static_cast<uint32_t>(window.dim()) || L != window.half_width() ||
      count != window.edge_count()) {
    std::fclose(fp);
    throw ConfigError("snapshot geometry does not match window: " + path);
  }
  EdgeField f;
  f.window = &window;
  f.seed = seed;
  f.kind = static_cast<FieldKind>(kind);
  f.values.assign(window.slot_count(), 0.0);
  bool read_ok = true;
  window.for_each_edge_canonical([&](uint64_t slot) {
    double v;
    if (std::fread(&v, sizeof v, 1, fp) != 1)
      read_ok = false;
    else
      f.values[slot] = v;
  });
  std::fclose(fp);
  require(read_ok, "truncated field snapshot: " + path);
  return f;
}

}  // namespace percolab
