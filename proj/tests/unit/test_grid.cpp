#include <doctest.h>

#include <cmath>

#include "renalparse/grid.hpp"

using namespace renalparse;

namespace {

Volume ramp_volume(Shape3 s) {
  Volume v(s, {1, 1, 1});
  for (int z = 0; z < s[2]; ++z)
    for (int y = 0; y < s[1]; ++y)
      for (int x = 0; x < s[0]; ++x)
        v.at(x, y, z) = float(x + 100 * y + 10000 * z);
  return v;
}

}  // namespace

TEST_CASE("class ids match the fixed anatomy order") {
  CHECK(int(ClassId::background) == 0);
  CHECK(int(ClassId::kidney) == 1);
  CHECK(int(ClassId::tumor) == 2);
  CHECK(int(ClassId::vein) == 3);
  CHECK(int(ClassId::artery) == 4);
  CHECK(class_from_name("artery") == ClassId::artery);
  CHECK_THROWS(class_from_name("spleen"));
}

TEST_CASE("validate rejects bad grids") {
  Volume v({4, 4, 4}, {1, 1, 1});
  v.validate();
  v.at(1, 2, 3) = std::nanf("");
  CHECK_THROWS_AS(v.validate(), std::invalid_argument);

  Volume w({4, 4, 4}, {1, -1, 1});
  CHECK_THROWS_AS(w.validate(), std::invalid_argument);

  LabelMap m({2, 2, 2}, {1, 1, 1});
  m.validate();
  m.at(0, 0, 0) = 7;
  CHECK_THROWS_AS(m.validate(), std::invalid_argument);
}

TEST_CASE("crop_or_pad identity") {
  const Volume v = ramp_volume({4, 5, 6});
  const Volume out = crop_or_pad(v, {4, 5, 6}, 0.0f);
  CHECK(out.data == v.data);
}

TEST_CASE("crop_or_pad symmetric padding puts slabs on both sides") {
  Volume v({4, 4, 4}, {1, 1, 1});
  std::fill(v.data.begin(), v.data.end(), 1.0f);
  const Volume out = crop_or_pad(v, {6, 4, 4}, 0.0f);
  for (int z = 0; z < 4; ++z)
    for (int y = 0; y < 4; ++y) {
      CHECK(out.at(0, y, z) == 0.0f);
      CHECK(out.at(5, y, z) == 0.0f);
      for (int x = 1; x <= 4; ++x) CHECK(out.at(x, y, z) == 1.0f);
    }
}

TEST_CASE("crop_or_pad odd padding puts the extra voxel on the high side") {
  Volume v({4, 4, 4}, {1, 1, 1});
  std::fill(v.data.begin(), v.data.end(), 1.0f);
  const Volume out = crop_or_pad(v, {7, 4, 4}, 0.0f);
  // pad low = 1, pad high = 2
  CHECK(out.at(0, 0, 0) == 0.0f);
  CHECK(out.at(1, 0, 0) == 1.0f);
  CHECK(out.at(4, 0, 0) == 1.0f);
  CHECK(out.at(5, 0, 0) == 0.0f);
  CHECK(out.at(6, 0, 0) == 0.0f);
}

TEST_CASE("crop_or_pad center crop matches index arithmetic") {
  const Volume v = ramp_volume({8, 8, 8});
  const Volume out = crop_or_pad(v, {4, 4, 4}, 0.0f);
  for (int z = 0; z < 4; ++z)
    for (int y = 0; y < 4; ++y)
      for (int x = 0; x < 4; ++x)
        CHECK(out.at(x, y, z) == v.at(x + 2, y + 2, z + 2));
}

TEST_CASE("crop_or_pad idempotent at fixed target, pad-then-crop inverse") {
  const Volume v = ramp_volume({5, 6, 7});
  const Volume once = crop_or_pad(v, {9, 6, 3}, -1.0f);
  const Volume twice = crop_or_pad(once, {9, 6, 3}, -1.0f);
  CHECK(once.data == twice.data);

  const Volume padded = crop_or_pad(v, {9, 8, 11}, 0.0f);
  const Volume back = crop_or_pad(padded, {5, 6, 7}, 0.0f);
  CHECK(back.data == v.data);
}

TEST_CASE("crop_or_pad default fills: volume min, label background") {
  Volume v({4, 4, 4}, {1, 1, 1});
  std::fill(v.data.begin(), v.data.end(), 5.0f);
  v.at(0, 0, 0) = -7.0f;
  const Volume out = crop_or_pad(v, {6, 6, 6});
  CHECK(out.at(0, 0, 0) == -7.0f);
  CHECK(out.at(5, 5, 5) == -7.0f);  // fill = min

  LabelMap m({4, 4, 4}, {1, 1, 1});
  std::fill(m.data.begin(), m.data.end(), std::uint8_t(2));
  const LabelMap mo = crop_or_pad(m, {6, 6, 6});
  CHECK(mo.at(0, 0, 0) == 0);
  CHECK(mo.at(2, 2, 2) == 2);
}
