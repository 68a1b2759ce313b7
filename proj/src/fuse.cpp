#include "renalparse/fuse.hpp"

#include <algorithm>
#include <cmath>

namespace renalparse {

LabelMap argmax_decode(const Tensor<float>& logits, Spacing3 spacing) {
  if (logits.n != 1)
    throw std::invalid_argument("argmax_decode: expects a single-case tensor");
  for (const float v : logits.v)
    if (!std::isfinite(v))
      throw std::invalid_argument("argmax_decode: non-finite logit");
  LabelMap out({logits.x, logits.y, logits.z}, spacing);
  const std::size_t m = logits.spatial();
  std::vector<const float*> ch(logits.c);
  for (int c = 0; c < logits.c; ++c) ch[c] = logits.chan(0, c);
  for (std::size_t i = 0; i < m; ++i) {
    int best = 0;
    float bv = ch[0][i];
    for (int c = 1; c < logits.c; ++c)
      if (ch[c][i] > bv) {  // strict: ties stay at the lower index
        bv = ch[c][i];
        best = c;
      }
    out.data[i] = std::uint8_t(best);
  }
  return out;
}

Mask3 class_mask(const LabelMap& m, ClassId cls) {
  Mask3 out(m.shape);
  for (std::size_t i = 0; i < m.data.size(); ++i)
    out.v[i] = m.data[i] == std::uint8_t(cls) ? 1 : 0;
  return out;
}

namespace {

struct NeighborTable {
  int offsets[26][3];
  int count;
};

NeighborTable neighbors(int connectivity) {
  NeighborTable t{};
  t.count = 0;
  for (int dz = -1; dz <= 1; ++dz)
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx) {
        if (dx == 0 && dy == 0 && dz == 0) continue;
        const int manhattan = std::abs(dx) + std::abs(dy) + std::abs(dz);
        if (connectivity == 6 && manhattan != 1) continue;
        t.offsets[t.count][0] = dx;
        t.offsets[t.count][1] = dy;
        t.offsets[t.count][2] = dz;
        ++t.count;
      }
  return t;
}

}  // namespace

Mask3 largest_component(const Mask3& mask, int connectivity) {
  if (connectivity != 6 && connectivity != 26)
    throw std::invalid_argument(
        "largest_component: connectivity must be 6 or 26");
  const int nx = mask.shape[0], ny = mask.shape[1], nz = mask.shape[2];
  Mask3 out(mask.shape);
  const NeighborTable nbr = neighbors(connectivity);

  std::vector<std::int32_t> label(mask.size(), -1);
  struct Component {
    std::size_t size = 0;
    std::array<int, 3> min_voxel{0, 0, 0};  // lexicographic (x,y,z) minimum
  };
  std::vector<Component> comps;
  std::vector<std::size_t> stack;

  for (int z0 = 0; z0 < nz; ++z0)
    for (int y0 = 0; y0 < ny; ++y0)
      for (int x0 = 0; x0 < nx; ++x0) {
        const std::size_t i0 = mask.index(x0, y0, z0);
        if (!mask.v[i0] || label[i0] >= 0) continue;
        const std::int32_t id = std::int32_t(comps.size());
        comps.push_back({0, {x0, y0, z0}});
        auto& comp = comps.back();
        label[i0] = id;
        stack.assign(1, i0);
        while (!stack.empty()) {
          const std::size_t i = stack.back();
          stack.pop_back();
          ++comp.size;
          const int z = int(i / (std::size_t(nx) * ny));
          const int rem = int(i % (std::size_t(nx) * ny));
          const int y = rem / nx, x = rem % nx;
          const std::array<int, 3> vox{x, y, z};
          if (vox < comp.min_voxel) comp.min_voxel = vox;
          for (int k = 0; k < nbr.count; ++k) {
            const int xx = x + nbr.offsets[k][0];
            const int yy = y + nbr.offsets[k][1];
            const int zz = z + nbr.offsets[k][2];
            if (xx < 0 || yy < 0 || zz < 0 || xx >= nx || yy >= ny || zz >= nz)
              continue;
            const std::size_t ii = mask.index(xx, yy, zz);
            if (mask.v[ii] && label[ii] < 0) {
              label[ii] = id;
              stack.push_back(ii);
            }
          }
        }
      }

  if (comps.empty()) return out;
  std::int32_t best = 0;
  for (std::int32_t id = 1; id < std::int32_t(comps.size()); ++id) {
    if (comps[id].size > comps[best].size ||
        (comps[id].size == comps[best].size &&
         comps[id].min_voxel < comps[best].min_voxel))
      best = id;
  }
  for (std::size_t i = 0; i < mask.size(); ++i)
    out.v[i] = label[i] == best ? 1 : 0;
  return out;
}

LabelMap postprocess(const LabelMap& m, const PostprocessSpec& spec) {
  spec.validate();
  LabelMap out = m;
  for (const ClassId cls : spec.classes_to_filter) {
    const Mask3 mask = class_mask(m, cls);
    const Mask3 kept = largest_component(mask, spec.connectivity);
    for (std::size_t i = 0; i < out.data.size(); ++i)
      if (mask.v[i] && !kept.v[i]) out.data[i] = 0;
  }
  return out;
}

LabelMap ensemble_merge(const LabelMap& pred_a, const LabelMap& pred_b,
                        const EnsembleSpec& spec) {
  if (pred_a.shape != pred_b.shape)
    throw std::invalid_argument("ensemble: shape mismatch");
  LabelMap out(pred_a.shape, pred_a.spacing);
  for (const EnsembleSource src : {EnsembleSource::A, EnsembleSource::B}) {
    const LabelMap& pred = src == EnsembleSource::A ? pred_a : pred_b;
    for (const ClassId cls : kForegroundClasses) {
      if (spec.source_for(cls) != src) continue;
      const std::uint8_t c = std::uint8_t(cls);
      for (std::size_t i = 0; i < out.data.size(); ++i)
        if (pred.data[i] == c) out.data[i] = c;
    }
  }
  return out;
}

LabelMap predict_labelmap(Network<float>& net, const Volume& image) {
  const int div = 1 << net.config().depth;
  Shape3 padded_shape = image.shape;
  for (int a = 0; a < 3; ++a)
    padded_shape[a] = (padded_shape[a] + div - 1) / div * div;

  const bool needs_pad = padded_shape != image.shape;
  Volume padded;
  if (needs_pad) padded = crop_or_pad(image, padded_shape);
  const Volume& src = needs_pad ? padded : image;

  Tensor<float> x(1, 1, src.shape[0], src.shape[1], src.shape[2]);
  std::copy(src.data.begin(), src.data.end(), x.v.begin());
  const Tensor<float> logits = net.forward(x);
  LabelMap pred = argmax_decode(logits, image.spacing);
  pred.spacing = image.spacing;
  if (needs_pad) pred = crop_or_pad(pred, image.shape);
  return pred;
}

}  // namespace renalparse
