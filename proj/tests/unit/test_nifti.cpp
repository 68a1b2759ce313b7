#include <doctest.h>
#include <zlib.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <vector>

#include "renalparse/nifti.hpp"
#include "renalparse/rng.hpp"

using namespace renalparse;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
  const auto dir = fs::temp_directory_path() / "renalparse_nifti_test";
  fs::create_directories(dir);
  return dir;
}

Volume random_volume(Shape3 s, Spacing3 sp, std::uint64_t seed) {
  Volume v(s, sp);
  Rng rng(seed);
  for (auto& x : v.data) x = float(rng.uniform(-100.0, 300.0));
  return v;
}

// independent header dump: reads fields straight from documented byte
// offsets, no shared code with the library reader
struct RawHeaderDump {
  std::int16_t dim[8];
  std::int16_t datatype;
  float pixdim[8];
};

RawHeaderDump dump_header(const std::string& path) {
  gzFile f = gzopen(path.c_str(), "rb");
  REQUIRE(f != nullptr);
  unsigned char raw[348];
  REQUIRE(gzread(f, raw, 348) == 348);
  gzclose(f);
  RawHeaderDump d{};
  std::memcpy(d.dim, raw + 40, 16);
  std::memcpy(&d.datatype, raw + 70, 2);
  std::memcpy(d.pixdim, raw + 76, 32);
  return d;
}

}  // namespace

TEST_CASE("volume save/load round-trip is bit-identical") {
  const auto dir = temp_dir();
  for (const char* name : {"vol.nii", "vol.nii.gz"}) {
    const Volume v = random_volume({7, 5, 9}, {0.5, 0.6, 0.75}, 3);
    const std::string path = (dir / name).string();
    save_volume(v, path);
    const Volume r = load_volume(path);
    CHECK(r.shape == v.shape);
    CHECK(r.data == v.data);
    for (int i = 0; i < 3; ++i)
      CHECK(r.spacing[i] == doctest::Approx(v.spacing[i]).epsilon(1e-6));
  }
}

TEST_CASE("labelmap round-trip and invariant enforcement") {
  const auto dir = temp_dir();
  LabelMap m({6, 6, 6}, {1, 1, 2});
  Rng rng(5);
  for (auto& x : m.data) x = std::uint8_t(rng.uniform_int(5));
  const std::string path = (dir / "lab.nii.gz").string();
  save_labelmap(m, path);
  const LabelMap r = load_labelmap(path);
  CHECK(r.data == m.data);

  m.data[0] = 7;  // invariant violation must be caught before writing
  CHECK_THROWS_AS(save_labelmap(m, (dir / "bad.nii.gz").string()),
                  std::invalid_argument);
  CHECK(!fs::exists(dir / "bad.nii.gz"));
}

TEST_CASE("spacing read back via an independent header dump") {
  const auto dir = temp_dir();
  const Volume v = random_volume({20, 18, 16}, {0.5, 0.5, 0.75}, 11);
  const std::string path = (dir / "spacing.nii.gz").string();
  save_volume(v, path);

  const RawHeaderDump d = dump_header(path);
  CHECK(d.dim[0] == 3);
  CHECK(d.dim[1] == 20);
  CHECK(d.dim[2] == 18);
  CHECK(d.dim[3] == 16);
  CHECK(d.datatype == 16);  // float32
  CHECK(d.pixdim[1] == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(d.pixdim[2] == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(d.pixdim[3] == doctest::Approx(0.75).epsilon(1e-6));

  const Volume r = load_volume(path);
  for (int i = 0; i < 3; ++i)
    CHECK(r.spacing[i] == doctest::Approx(double(d.pixdim[i + 1])).epsilon(1e-6));
}

TEST_CASE("file voxel payload for the crop geometry") {
  // 150x150x200 uint8 map -> 4,500,000 voxels on disk
  const auto dir = temp_dir();
  LabelMap m({150, 150, 200}, {0.5, 0.5, 0.75});
  const std::string path = (dir / "big.nii").string();
  save_labelmap(m, path);
  CHECK(m.size() == 4500000u);
  CHECK(fs::file_size(path) == 352 + 4500000u);
}

TEST_CASE("loader errors are distinct") {
  const auto dir = temp_dir();

  CHECK_THROWS_WITH_AS(load_volume((dir / "nope.nii").string()),
                       doctest::Contains("missing file"), NiftiError);
  try {
    load_volume((dir / "nope.nii").string());
  } catch (const NiftiError& e) {
    CHECK(e.code == NiftiStatus::missing_file);
  }

  // garbage header
  {
    std::ofstream out(dir / "garbage.nii", std::ios::binary);
    std::vector<char> junk(400, 0x5a);
    out.write(junk.data(), std::streamsize(junk.size()));
  }
  try {
    load_volume((dir / "garbage.nii").string());
    FAIL("expected malformed header");
  } catch (const NiftiError& e) {
    CHECK(e.code == NiftiStatus::malformed_header);
  }

  // structurally valid header but 4D shape
  {
    const Volume v = random_volume({4, 4, 4}, {1, 1, 1}, 1);
    save_volume(v, (dir / "fourd.nii").string());
    std::fstream f(dir / "fourd.nii",
                   std::ios::binary | std::ios::in | std::ios::out);
    std::int16_t dims[5] = {4, 4, 4, 4, 2};
    f.seekp(40);
    f.write(reinterpret_cast<const char*>(dims), sizeof(dims));
  }
  try {
    load_volume((dir / "fourd.nii").string());
    FAIL("expected non-3D error");
  } catch (const NiftiError& e) {
    CHECK(e.code == NiftiStatus::non_3d);
    CHECK(std::string(e.what()).find("non-3D") != std::string::npos);
  }

  // unwritable destination
  CHECK_THROWS_AS(
      save_volume(random_volume({4, 4, 4}, {1, 1, 1}, 2),
                  (dir / "no_such_dir" / "x.nii").string()),
      NiftiError);
}
