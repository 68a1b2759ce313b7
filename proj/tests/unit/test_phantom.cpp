#include <doctest.h>

#include <filesystem>
#include <set>

#include "renalparse/nifti.hpp"
#include "renalparse/phantom.hpp"

using namespace renalparse;
namespace fs = std::filesystem;

TEST_CASE("same spec twice gives bit-identical output") {
  PhantomSpec spec;
  spec.seed = 1234;
  const auto [v1, m1] = generate_phantom(spec);
  const auto [v2, m2] = generate_phantom(spec);
  CHECK(v1.data == v2.data);
  CHECK(m1.data == m2.data);
}

TEST_CASE("zero noise gives exactly five distinct intensities") {
  PhantomSpec spec;
  spec.seed = 9;
  spec.noise_sigma = 0.0;
  const auto [v, m] = generate_phantom(spec);
  std::set<float> values(v.data.begin(), v.data.end());
  CHECK(values.size() == 5);
}

TEST_CASE("default 64^3 spec: kidney fraction and all classes present") {
  for (std::uint64_t seed : {0ull, 1ull, 2ull, 17ull, 99ull}) {
    PhantomSpec spec;
    spec.seed = seed;
    const auto [v, m] = generate_phantom(spec);
    m.validate();
    std::array<std::size_t, 5> count{};
    for (const auto x : m.data) ++count[x];
    for (int c = 1; c < 5; ++c) CHECK(count[c] > 0);
    const double frac = double(count[1]) / double(m.size());
    CHECK(frac >= 0.01);
    CHECK(frac <= 0.15);
  }
}

TEST_CASE("kidney centroid varies with seed on every axis") {
  double sx = 0, sy = 0, sz = 0, sxx = 0, syy = 0, szz = 0;
  const int n_seeds = 20;
  for (int s = 0; s < n_seeds; ++s) {
    PhantomSpec spec;
    spec.shape = {32, 32, 32};
    spec.seed = 1000 + std::uint64_t(s);
    const auto [v, m] = generate_phantom(spec);
    double cx = 0, cy = 0, cz = 0, n = 0;
    for (int z = 0; z < 32; ++z)
      for (int y = 0; y < 32; ++y)
        for (int x = 0; x < 32; ++x)
          if (m.at(x, y, z) == std::uint8_t(ClassId::kidney)) {
            cx += x;
            cy += y;
            cz += z;
            n += 1;
          }
    cx /= n;
    cy /= n;
    cz /= n;
    sx += cx;
    sy += cy;
    sz += cz;
    sxx += cx * cx;
    syy += cy * cy;
    szz += cz * cz;
  }
  CHECK(sxx / n_seeds - (sx / n_seeds) * (sx / n_seeds) > 1e-6);
  CHECK(syy / n_seeds - (sy / n_seeds) * (sy / n_seeds) > 1e-6);
  CHECK(szz / n_seeds - (sz / n_seeds) * (sz / n_seeds) > 1e-6);
}

TEST_CASE("split sizes follow the rounding rule") {
  CHECK(split_sizes(130, {}) == std::array<int, 3>{91, 19, 20});
  CHECK(split_sizes(10, {}) == std::array<int, 3>{7, 1, 2});
  CHECK(split_sizes(10, {0.8, 0.0}) == std::array<int, 3>{8, 0, 2});
  CHECK(split_sizes(1, {}) == std::array<int, 3>{1, 0, 0});
}

TEST_CASE("generate_dataset writes cases, manifest, disjoint label maps") {
  const auto dir = fs::temp_directory_path() / "renalparse_dataset_test";
  fs::remove_all(dir);
  PhantomSpec spec;
  spec.shape = {24, 24, 24};
  const auto entries = generate_dataset(10, 500, spec, dir.string());
  CHECK(entries.size() == 10);

  const auto manifest = read_manifest((dir / "manifest.csv").string());
  REQUIRE(manifest.size() == 10);
  int n_train = 0, n_val = 0, n_test = 0;
  for (const auto& e : manifest) {
    if (e.split == "train") ++n_train;
    if (e.split == "val") ++n_val;
    if (e.split == "test") ++n_test;
  }
  CHECK(n_train + n_val + n_test == 10);
  CHECK(n_train == 7);
  CHECK(n_val == 1);
  CHECK(n_test == 2);
  CHECK(manifest[3].seed == 503);

  // disjoint seeds -> no two identical label maps
  std::set<std::vector<std::uint8_t>> seen;
  for (const auto& e : manifest) {
    const auto lab = load_labelmap((dir / e.case_id / "label.nii.gz").string());
    CHECK(seen.insert(lab.data).second);
  }

  // parallel generation agrees with serial generation
  const auto dir2 = fs::temp_directory_path() / "renalparse_dataset_test_par";
  fs::remove_all(dir2);
  generate_dataset(10, 500, spec, dir2.string(), {}, 4);
  for (const auto& e : manifest) {
    const auto a = load_labelmap((dir / e.case_id / "label.nii.gz").string());
    const auto b = load_labelmap((dir2 / e.case_id / "label.nii.gz").string());
    CHECK(a.data == b.data);
  }
}

TEST_CASE("tiny shapes that cannot host all structures raise") {
  PhantomSpec spec;
  spec.shape = {15, 64, 64};
  CHECK_THROWS(generate_phantom(spec));
}
