#include "renalparse/nifti.hpp"

#include <zlib.h>

#include <cstring>
#include <filesystem>
#include <vector>

namespace renalparse {

namespace {

// nifti1.h layout, 348 bytes
struct NiftiHeader {
  std::int32_t sizeof_hdr;  // must be 348
  char data_type[10];
  char db_name[18];
  std::int32_t extents;
  std::int16_t session_error;
  char regular;
  char dim_info;
  std::int16_t dim[8];
  float intent_p1, intent_p2, intent_p3;
  std::int16_t intent_code;
  std::int16_t datatype;
  std::int16_t bitpix;
  std::int16_t slice_start;
  float pixdim[8];
  float vox_offset;
  float scl_slope;
  float scl_inter;
  std::int16_t slice_end;
  char slice_code;
  char xyzt_units;
  float cal_max, cal_min;
  float slice_duration;
  float toffset;
  std::int32_t glmax, glmin;
  char descrip[80];
  char aux_file[24];
  std::int16_t qform_code;
  std::int16_t sform_code;
  float quatern_b, quatern_c, quatern_d;
  float qoffset_x, qoffset_y, qoffset_z;
  float srow_x[4];
  float srow_y[4];
  float srow_z[4];
  char intent_name[16];
  char magic[4];
};
static_assert(sizeof(NiftiHeader) == 348, "NIfTI-1 header must be 348 bytes");

constexpr std::int16_t kDtUint8 = 2;
constexpr std::int16_t kDtInt16 = 4;
constexpr std::int16_t kDtFloat32 = 16;
constexpr std::int16_t kDtFloat64 = 64;

struct GzFile {
  gzFile f = nullptr;
  explicit GzFile(gzFile h) : f(h) {}
  ~GzFile() {
    if (f) gzclose(f);
  }
  GzFile(const GzFile&) = delete;
  GzFile& operator=(const GzFile&) = delete;
};

bool ends_with_gz(const std::string& path) {
  return path.size() >= 3 && path.compare(path.size() - 3, 3, ".gz") == 0;
}

void read_exact(gzFile f, void* dst, std::size_t n, const std::string& path) {
  if (gzread(f, dst, unsigned(n)) != int(n))
    throw NiftiError(NiftiStatus::malformed_header,
                     "nifti: truncated file: " + path);
}

NiftiHeader read_header(gzFile f, const std::string& path) {
  NiftiHeader h{};
  read_exact(f, &h, sizeof(h), path);
  if (h.sizeof_hdr != 348) {
    std::int32_t swapped;
    std::memcpy(&swapped, &h.sizeof_hdr, 4);
    swapped = std::int32_t(__builtin_bswap32(std::uint32_t(swapped)));
    if (swapped == 348)
      throw NiftiError(NiftiStatus::malformed_header,
                       "nifti: byte-swapped files not supported: " + path);
    throw NiftiError(NiftiStatus::malformed_header,
                     "nifti: malformed header (sizeof_hdr): " + path);
  }
  if (std::strncmp(h.magic, "n+1", 3) != 0 &&
      std::strncmp(h.magic, "ni1", 3) != 0)
    throw NiftiError(NiftiStatus::malformed_header,
                     "nifti: malformed header (magic): " + path);
  if (h.dim[0] != 3)
    throw NiftiError(NiftiStatus::non_3d,
                     "nifti: non-3D image (dim[0]=" +
                         std::to_string(h.dim[0]) + "): " + path);
  for (int i = 1; i <= 3; ++i)
    if (h.dim[i] <= 0)
      throw NiftiError(NiftiStatus::malformed_header,
                       "nifti: malformed header (dim): " + path);
  return h;
}

gzFile open_read(const std::string& path) {
  if (!std::filesystem::exists(path))
    throw NiftiError(NiftiStatus::missing_file, "nifti: missing file: " + path);
  gzFile f = gzopen(path.c_str(), "rb");
  if (!f)
    throw NiftiError(NiftiStatus::io_error, "nifti: cannot open: " + path);
  return f;
}

void skip_to_data(gzFile f, const NiftiHeader& h, const std::string& path) {
  const long off = long(h.vox_offset);
  if (off < 348)
    throw NiftiError(NiftiStatus::malformed_header,
                     "nifti: bad vox_offset: " + path);
  std::vector<char> pad(std::size_t(off) - sizeof(NiftiHeader));
  if (!pad.empty()) read_exact(f, pad.data(), pad.size(), path);
}

NiftiHeader make_header(const Shape3& shape, const Spacing3& spacing,
                        std::int16_t datatype, std::int16_t bitpix) {
  NiftiHeader h{};
  h.sizeof_hdr = 348;
  h.regular = 'r';
  h.dim[0] = 3;
  h.dim[1] = std::int16_t(shape[0]);
  h.dim[2] = std::int16_t(shape[1]);
  h.dim[3] = std::int16_t(shape[2]);
  for (int i = 4; i < 8; ++i) h.dim[i] = 1;
  h.datatype = datatype;
  h.bitpix = bitpix;
  h.pixdim[0] = 1.0f;
  h.pixdim[1] = float(spacing[0]);
  h.pixdim[2] = float(spacing[1]);
  h.pixdim[3] = float(spacing[2]);
  h.vox_offset = 352.0f;
  h.scl_slope = 1.0f;
  h.scl_inter = 0.0f;
  h.xyzt_units = 2;  // millimetres
  std::strncpy(h.descrip, "renalparse", sizeof(h.descrip) - 1);
  h.sform_code = 1;
  h.srow_x[0] = float(spacing[0]);
  h.srow_y[1] = float(spacing[1]);
  h.srow_z[2] = float(spacing[2]);
  std::memcpy(h.magic, "n+1", 4);
  return h;
}

void write_file(const std::string& path, const NiftiHeader& h,
                const void* data, std::size_t nbytes) {
  // 'T' writes transparently (no gzip container) for plain .nii
  const char* mode = ends_with_gz(path) ? "wb6" : "wbT";
  gzFile f = gzopen(path.c_str(), mode);
  if (!f)
    throw NiftiError(NiftiStatus::io_error,
                     "nifti: cannot open for writing: " + path);
  GzFile guard(f);
  const char ext[4] = {0, 0, 0, 0};  // no header extensions
  if (gzwrite(f, &h, sizeof(h)) != int(sizeof(h)) ||
      gzwrite(f, ext, 4) != 4 ||
      gzwrite(f, data, unsigned(nbytes)) != int(nbytes))
    throw NiftiError(NiftiStatus::io_error, "nifti: write failed: " + path);
}

}  // namespace

Volume load_volume(const std::string& path) {
  GzFile guard(open_read(path));
  const NiftiHeader h = read_header(guard.f, path);
  skip_to_data(guard.f, h, path);

  Volume v;
  v.shape = {h.dim[1], h.dim[2], h.dim[3]};
  v.spacing = {double(h.pixdim[1]), double(h.pixdim[2]), double(h.pixdim[3])};
  const std::size_t n = v.size();
  v.data.resize(n);

  switch (h.datatype) {
    case kDtFloat32:
      read_exact(guard.f, v.data.data(), n * 4, path);
      break;
    case kDtFloat64: {
      std::vector<double> buf(n);
      read_exact(guard.f, buf.data(), n * 8, path);
      for (std::size_t i = 0; i < n; ++i) v.data[i] = float(buf[i]);
      break;
    }
    case kDtInt16: {
      std::vector<std::int16_t> buf(n);
      read_exact(guard.f, buf.data(), n * 2, path);
      for (std::size_t i = 0; i < n; ++i) v.data[i] = float(buf[i]);
      break;
    }
    case kDtUint8: {
      std::vector<std::uint8_t> buf(n);
      read_exact(guard.f, buf.data(), n, path);
      for (std::size_t i = 0; i < n; ++i) v.data[i] = float(buf[i]);
      break;
    }
    default:
      throw NiftiError(NiftiStatus::bad_datatype,
                       "nifti: unsupported datatype " +
                           std::to_string(h.datatype) + ": " + path);
  }

  if (h.scl_slope != 0.0f && !(h.scl_slope == 1.0f && h.scl_inter == 0.0f))
    for (float& x : v.data) x = x * h.scl_slope + h.scl_inter;

  v.validate();
  return v;
}

LabelMap load_labelmap(const std::string& path) {
  GzFile guard(open_read(path));
  const NiftiHeader h = read_header(guard.f, path);
  if (h.datatype != kDtUint8)
    throw NiftiError(NiftiStatus::bad_datatype,
                     "nifti: label map must be uint8, got datatype " +
                         std::to_string(h.datatype) + ": " + path);
  skip_to_data(guard.f, h, path);

  LabelMap m;
  m.shape = {h.dim[1], h.dim[2], h.dim[3]};
  m.spacing = {double(h.pixdim[1]), double(h.pixdim[2]), double(h.pixdim[3])};
  m.data.resize(m.size());
  read_exact(guard.f, m.data.data(), m.size(), path);

  try {
    m.validate();
  } catch (const std::invalid_argument& e) {
    throw NiftiError(NiftiStatus::bad_label_value,
                     std::string(e.what()) + ": " + path);
  }
  return m;
}

void save_volume(const Volume& v, const std::string& path) {
  v.validate();
  const NiftiHeader h = make_header(v.shape, v.spacing, kDtFloat32, 32);
  write_file(path, h, v.data.data(), v.data.size() * 4);
}

void save_labelmap(const LabelMap& m, const std::string& path) {
  m.validate();
  const NiftiHeader h = make_header(m.shape, m.spacing, kDtUint8, 8);
  write_file(path, h, m.data.data(), m.data.size());
}

}  // namespace renalparse
