#include "renalparse/phantom.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "renalparse/nifti.hpp"
#include "renalparse/rng.hpp"

namespace renalparse {

namespace fs = std::filesystem;

void PhantomSpec::validate() const {
  for (int i = 0; i < 3; ++i)
    if (shape[i] < 16)
      throw std::invalid_argument("phantom: shape must be at least 16^3");
  for (int i = 0; i < 3; ++i)
    if (!(spacing[i] > 0.0))
      throw std::invalid_argument("phantom: spacing must be positive");
  if (noise_sigma < 0.0)
    throw std::invalid_argument("phantom: noise_sigma must be >= 0");
  for (int a = 0; a < 5; ++a)
    for (int b = a + 1; b < 5; ++b)
      if (class_mean_hu[a] == class_mean_hu[b])
        throw std::invalid_argument(
            "phantom: class mean intensities must be pairwise distinct");
}

namespace {

struct Vec3 {
  double x, y, z;
};

// paint all voxels within `radius` (voxel units) of segment [a,b]
void paint_tube(LabelMap& m, Vec3 a, Vec3 b, double radius, std::uint8_t cls) {
  const int x0 = std::max(0, int(std::floor(std::min(a.x, b.x) - radius)));
  const int x1 = std::min(m.shape[0] - 1, int(std::ceil(std::max(a.x, b.x) + radius)));
  const int y0 = std::max(0, int(std::floor(std::min(a.y, b.y) - radius)));
  const int y1 = std::min(m.shape[1] - 1, int(std::ceil(std::max(a.y, b.y) + radius)));
  const int z0 = std::max(0, int(std::floor(std::min(a.z, b.z) - radius)));
  const int z1 = std::min(m.shape[2] - 1, int(std::ceil(std::max(a.z, b.z) + radius)));
  const Vec3 d{b.x - a.x, b.y - a.y, b.z - a.z};
  const double len2 = d.x * d.x + d.y * d.y + d.z * d.z;
  const double r2 = radius * radius;
  for (int z = z0; z <= z1; ++z)
    for (int y = y0; y <= y1; ++y)
      for (int x = x0; x <= x1; ++x) {
        const Vec3 p{double(x) - a.x, double(y) - a.y, double(z) - a.z};
        double t = len2 > 0 ? (p.x * d.x + p.y * d.y + p.z * d.z) / len2 : 0.0;
        t = std::clamp(t, 0.0, 1.0);
        const double dx = p.x - t * d.x, dy = p.y - t * d.y, dz = p.z - t * d.z;
        if (dx * dx + dy * dy + dz * dz <= r2)
          m.at(x, y, z) = cls;
      }
}

void paint_ellipsoid(LabelMap& m, Vec3 c, Vec3 r, std::uint8_t cls) {
  const int x0 = std::max(0, int(std::floor(c.x - r.x)));
  const int x1 = std::min(m.shape[0] - 1, int(std::ceil(c.x + r.x)));
  const int y0 = std::max(0, int(std::floor(c.y - r.y)));
  const int y1 = std::min(m.shape[1] - 1, int(std::ceil(c.y + r.y)));
  const int z0 = std::max(0, int(std::floor(c.z - r.z)));
  const int z1 = std::min(m.shape[2] - 1, int(std::ceil(c.z + r.z)));
  for (int z = z0; z <= z1; ++z)
    for (int y = y0; y <= y1; ++y)
      for (int x = x0; x <= x1; ++x) {
        const double u = (x - c.x) / r.x, v = (y - c.y) / r.y,
                     w = (z - c.z) / r.z;
        if (u * u + v * v + w * w <= 1.0) m.at(x, y, z) = cls;
      }
}

bool try_geometry(LabelMap& m, Rng& rng) {
  std::fill(m.data.begin(), m.data.end(), std::uint8_t(0));
  const double nx = m.shape[0], ny = m.shape[1], nz = m.shape[2];

  // kidney ellipsoid; the low-x side stays clear for the vessels
  Vec3 kr{rng.uniform(0.16, 0.22) * nx, rng.uniform(0.16, 0.22) * ny,
          rng.uniform(0.16, 0.22) * nz};
  Vec3 kc{rng.uniform(0.50, 0.65) * nx, rng.uniform(0.40, 0.60) * ny,
          rng.uniform(0.40, 0.60) * nz};
  kc.x = std::clamp(kc.x, kr.x + 2.0, nx - kr.x - 3.0);
  kc.y = std::clamp(kc.y, kr.y + 2.0, ny - kr.y - 3.0);
  kc.z = std::clamp(kc.z, kr.z + 2.0, nz - kr.z - 3.0);
  paint_ellipsoid(m, kc, kr, std::uint8_t(ClassId::kidney));

  // vein and artery run from inside the kidney to the low-x face, in
  // disjoint y bands so they never erase each other
  const double vein_r = std::max(1.6, rng.uniform(0.030, 0.045) * ny);
  const double art_r = std::max(1.4, rng.uniform(0.025, 0.040) * ny);
  const Vec3 vein_a{kc.x - 0.55 * kr.x, kc.y - rng.uniform(0.25, 0.45) * kr.y,
                    kc.z + rng.uniform(-0.25, 0.25) * kr.z};
  const Vec3 vein_b{1.0, vein_a.y + rng.uniform(-2.0, 2.0),
                    vein_a.z + rng.uniform(-2.0, 2.0)};
  const Vec3 art_a{kc.x - 0.55 * kr.x, kc.y + rng.uniform(0.25, 0.45) * kr.y,
                   kc.z + rng.uniform(-0.25, 0.25) * kr.z};
  const Vec3 art_b{1.0, art_a.y + rng.uniform(-2.0, 2.0),
                   art_a.z + rng.uniform(-2.0, 2.0)};
  paint_tube(m, vein_a, vein_b, vein_r, std::uint8_t(ClassId::vein));
  paint_tube(m, art_a, art_b, art_r, std::uint8_t(ClassId::artery));

  // tumor sphere straddling the kidney boundary, painted last so it wins
  // overlaps; biased to the lateral half so it stays clear of the vessels
  const double az = rng.uniform(-1.0, 1.0);
  const double phi = rng.uniform(-1.2, 1.2);  // lateral (+x) hemisphere
  const double rxy = std::sqrt(std::max(0.0, 1.0 - az * az));
  const Vec3 dir{rxy * std::cos(phi), rxy * std::sin(phi), az};
  const double pull = rng.uniform(0.85, 1.0);
  Vec3 tc{kc.x + pull * kr.x * dir.x, kc.y + pull * kr.y * dir.y,
          kc.z + pull * kr.z * dir.z};
  const double tr = rng.uniform(0.35, 0.55) * std::min({kr.x, kr.y, kr.z});
  tc.x = std::clamp(tc.x, tr + 1.0, nx - tr - 2.0);
  tc.y = std::clamp(tc.y, tr + 1.0, ny - tr - 2.0);
  tc.z = std::clamp(tc.z, tr + 1.0, nz - tr - 2.0);
  paint_ellipsoid(m, tc, Vec3{tr, tr, tr}, std::uint8_t(ClassId::tumor));

  std::array<std::size_t, kNumClasses> count{};
  for (const auto v : m.data) ++count[v];
  for (const ClassId c : kForegroundClasses)
    if (count[std::size_t(c)] == 0) return false;
  return true;
}

}  // namespace

std::pair<Volume, LabelMap> generate_phantom(const PhantomSpec& spec) {
  spec.validate();
  Rng rng = Rng::substream(spec.seed, 0x9a11);

  LabelMap labels(spec.shape, spec.spacing);
  bool placed = false;
  for (int attempt = 0; attempt < 100 && !placed; ++attempt)
    placed = try_geometry(labels, rng);
  if (!placed)
    throw std::runtime_error(
        "phantom: shape too small to place all structures");

  Volume image(spec.shape, spec.spacing);
  const std::size_t n = image.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double mean = spec.class_mean_hu[labels.data[i]];
    const double noise =
        spec.noise_sigma > 0.0 ? spec.noise_sigma * rng.normal() : 0.0;
    image.data[i] = float(mean + noise);
  }
  return {std::move(image), std::move(labels)};
}

std::array<int, 3> split_sizes(int n, SplitFractions split) {
  const double test_frac = 1.0 - split.train - split.val;
  if (split.train < 0 || split.val < 0 || test_frac < -1e-12)
    throw std::invalid_argument("split fractions must be non-negative");
  const int n_train = int(std::llround(split.train * n));
  const int n_test = int(std::llround(std::max(0.0, test_frac) * n));
  const int n_val = n - n_train - n_test;
  if (n_train < 0 || n_test < 0 || n_val < 0)
    throw std::invalid_argument("split fractions inconsistent with n");
  return {n_train, n_val, n_test};
}

std::vector<CaseEntry> generate_dataset(int n_cases, std::uint64_t base_seed,
                                        const PhantomSpec& spec,
                                        const std::string& out_dir,
                                        SplitFractions split, int workers) {
  if (n_cases < 1)
    throw std::invalid_argument("generate_dataset: n_cases must be >= 1");
  spec.validate();
  fs::create_directories(out_dir);

  const auto sizes = split_sizes(n_cases, split);
  std::vector<CaseEntry> entries(n_cases);
  for (int i = 0; i < n_cases; ++i) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "case_%04d", i);
    entries[i].case_id = buf;
    entries[i].seed = base_seed + std::uint64_t(i);
    entries[i].split =
        i < sizes[0] ? "train" : (i < sizes[0] + sizes[1] ? "val" : "test");
  }

  const auto run_case = [&](int i) {
    PhantomSpec s = spec;
    s.seed = entries[i].seed;
    auto [image, labels] = generate_phantom(s);
    const fs::path dir = fs::path(out_dir) / entries[i].case_id;
    fs::create_directories(dir);
    save_volume(image, (dir / "image.nii.gz").string());
    save_labelmap(labels, (dir / "label.nii.gz").string());
  };

  workers = std::max(1, workers);
  if (workers == 1) {
    for (int i = 0; i < n_cases; ++i) run_case(i);
  } else {
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (int i = next.fetch_add(1); i < n_cases; i = next.fetch_add(1))
          run_case(i);
      });
    for (auto& t : pool) t.join();
  }

  std::ofstream manifest(fs::path(out_dir) / "manifest.csv");
  if (!manifest)
    throw std::runtime_error("generate_dataset: cannot write manifest.csv");
  manifest << "case_id,split,seed\n";
  for (const auto& e : entries)
    manifest << e.case_id << "," << e.split << "," << e.seed << "\n";
  return entries;
}

std::vector<CaseEntry> read_manifest(const std::string& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in)
    throw std::runtime_error("cannot open manifest: " + manifest_path);
  std::vector<CaseEntry> entries;
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    CaseEntry e;
    std::string seed;
    std::getline(ss, e.case_id, ',');
    std::getline(ss, e.split, ',');
    std::getline(ss, seed, ',');
    e.seed = std::stoull(seed);
    entries.push_back(std::move(e));
  }
  return entries;
}

}  // namespace renalparse
