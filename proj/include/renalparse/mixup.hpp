#pragma once
// Manifold mixup: one (lambda, k, pairing) draw per batch; the batch is
// interpolated at mixing point k and passed forward from there, and the
// loss is the lambda-weighted sum of the losses against both label sets.

#include <set>
#include <vector>

#include "renalparse/loss.hpp"
#include "renalparse/nets.hpp"

namespace renalparse {

struct MixupConfig {
  double alpha = 0.1;
  std::set<int> eligible_points{0, 1, 2};
  bool enabled = true;

  void validate(int num_mix_points) const {
    if (!(alpha > 0.0)) throw std::invalid_argument("mixup: alpha must be > 0");
    if (eligible_points.empty())
      throw std::invalid_argument("mixup: eligible_points empty");
    for (const int k : eligible_points)
      if (k < 0 || k >= num_mix_points)
        throw std::invalid_argument("mixup: point " + std::to_string(k) +
                                    " not a mixing point of this network");
  }
};

struct MixupDraw {
  double lambda = 1.0;
  int k = 0;
  std::vector<int> pairing;
};

// lambda ~ Beta(alpha, alpha); k uniform over eligible points; pairing is
// the batch reversal for B == 2 and a uniform shuffle otherwise.
inline MixupDraw draw_mixup(const MixupConfig& cfg, int batch_size, Rng& rng) {
  if (!cfg.enabled) throw std::logic_error("draw_mixup: mixup disabled");
  MixupDraw d;
  d.lambda = rng.beta(cfg.alpha, cfg.alpha);
  const std::vector<int> pts(cfg.eligible_points.begin(),
                             cfg.eligible_points.end());
  d.k = pts[std::size_t(rng.uniform_int(int(pts.size())))];
  d.pairing.resize(batch_size);
  if (batch_size == 2) {
    d.pairing = {1, 0};
  } else {
    for (int i = 0; i < batch_size; ++i) d.pairing[i] = i;
    for (int i = batch_size - 1; i > 0; --i)
      std::swap(d.pairing[i], d.pairing[rng.uniform_int(i + 1)]);
  }
  return d;
}

template <class T>
struct MixupStepResult {
  LossTerms mixed;          // lambda-weighted combination
  Tensor<T> logits;
  Tensor<T> dlogits;        // populated when with_grad
};

// Forward with mixing at draw.k, loss = lambda * L(logits, y) +
// (1-lambda) * L(logits, y[pairing]). With with_grad, dL/dlogits is formed
// and (unless do_backward is cleared, e.g. to first fold in auxiliary-branch
// gradients) backpropagated through the network.
template <class T>
MixupStepResult<T> mixup_step(Network<T>& net, const Tensor<T>& images,
                              const LabelTensor& labels, const MixupDraw& draw,
                              bool with_grad = true, Rng* rng = nullptr,
                              bool do_backward = true) {
  if (images.n < 2)
    throw std::invalid_argument("mixup: cannot pair a batch of size " +
                                std::to_string(images.n));
  if (int(draw.pairing.size()) != images.n)
    throw std::invalid_argument("mixup: pairing size != batch size");

  const T lambda = T(draw.lambda);
  Tensor<T> h = net.forward_to(images, draw.k);
  Tensor<T> h_mix = mix_batch(h, lambda, draw.pairing);
  net.set_mix(draw.k, lambda, draw.pairing);

  MixupStepResult<T> res;
  res.logits = net.forward_from(h_mix, draw.k, rng);

  LabelTensor permuted(labels.n, labels.x, labels.y, labels.z);
  const std::size_t m = labels.spatial();
  for (int i = 0; i < labels.n; ++i)
    std::copy(labels.v.begin() + std::size_t(draw.pairing[i]) * m,
              labels.v.begin() + std::size_t(draw.pairing[i] + 1) * m,
              permuted.v.begin() + std::size_t(i) * m);

  Tensor<T> g1, g2;
  const LossTerms l1 =
      dice_ce_loss_grad(res.logits, labels, with_grad ? &g1 : nullptr);
  const LossTerms l2 =
      dice_ce_loss_grad(res.logits, permuted, with_grad ? &g2 : nullptr);
  const double lam = draw.lambda;
  res.mixed.ce = lam * l1.ce + (1.0 - lam) * l2.ce;
  res.mixed.dice = lam * l1.dice + (1.0 - lam) * l2.dice;
  res.mixed.total = lam * l1.total + (1.0 - lam) * l2.total;

  if (with_grad) {
    res.dlogits = Tensor<T>(g1.n, g1.c, g1.x, g1.y, g1.z);
    kernels::lerp(res.dlogits.data(), g1.data(), g2.data(), lambda,
                  res.dlogits.size());
    net.backward(res.dlogits);
  }
  return res;
}

}  // namespace renalparse
