#pragma once
// Combined Dice + cross-entropy segmentation loss with its analytic
// gradient. CE is the voxel mean of -log softmax at the target class; the
// Dice term is 1 minus the mean over all classes of the smoothed overlap
// (2*sum p*g + eps) / (sum p + sum g + eps) with sums over batch and space.
// Both terms enter with weight 1.

#include <cmath>
#include <vector>

#include "renalparse/tensor.hpp"

namespace renalparse {

inline constexpr double kDiceEps = 1e-5;

struct LossTerms {
  double total = 0.0;
  double ce = 0.0;
  double dice = 0.0;  // 1 - mean dice coefficient
};

// loss and, when grad != nullptr, dL/dlogits (overwritten, same shape)
template <class T>
LossTerms dice_ce_loss_grad(const Tensor<T>& logits, const LabelTensor& target,
                            Tensor<T>* grad) {
  const int C = logits.c;
  if (C < 2 || C > 16) throw std::invalid_argument("loss: bad class count");
  if (logits.n != target.n || logits.x != target.x || logits.y != target.y ||
      logits.z != target.z)
    throw std::invalid_argument("loss: logits/target shape mismatch");
  const std::size_t m = logits.spatial();
  const std::size_t total_vox = std::size_t(logits.n) * m;

  // softmax probabilities, kept for the gradient pass
  Tensor<T> probs(logits.n, C, logits.x, logits.y, logits.z);
  double ce_acc = 0.0;
  std::vector<double> inter(C, 0.0), psum(C, 0.0), gsum(C, 0.0);

  for (int n = 0; n < logits.n; ++n) {
    std::vector<const T*> lg(C);
    std::vector<T*> pr(C);
    for (int c = 0; c < C; ++c) {
      lg[c] = logits.chan(n, c);
      pr[c] = probs.chan(n, c);
    }
    const std::uint8_t* tgt = target.v.data() + std::size_t(n) * m;
    for (std::size_t i = 0; i < m; ++i) {
      const int t = tgt[i];
      if (t >= C)
        throw std::invalid_argument("loss: target class out of range");
      double mx = double(lg[0][i]);
      for (int c = 1; c < C; ++c) mx = std::max(mx, double(lg[c][i]));
      double denom = 0.0;
      for (int c = 0; c < C; ++c) denom += std::exp(double(lg[c][i]) - mx);
      const double log_denom = std::log(denom);
      for (int c = 0; c < C; ++c) {
        const double p = std::exp(double(lg[c][i]) - mx) / denom;
        pr[c][i] = T(p);
        psum[c] += p;
      }
      ce_acc -= (double(lg[t][i]) - mx) - log_denom;
      inter[t] += double(pr[t][i]);
      gsum[t] += 1.0;
    }
  }

  LossTerms terms;
  terms.ce = ce_acc / double(total_vox);
  double dice_sum = 0.0;
  std::vector<double> numer(C), denom(C);
  for (int c = 0; c < C; ++c) {
    numer[c] = 2.0 * inter[c] + kDiceEps;
    denom[c] = psum[c] + gsum[c] + kDiceEps;
    dice_sum += numer[c] / denom[c];
  }
  terms.dice = 1.0 - dice_sum / double(C);
  terms.total = terms.ce + terms.dice;

  if (!grad) return terms;
  *grad = Tensor<T>(logits.n, C, logits.x, logits.y, logits.z);

  // dice term: dL/dp_c(v) = -(2 g_c(v) denom_c - numer_c) / (C denom_c^2);
  // only g changes per voxel, so precompute the g=1 / g=0 values
  std::vector<double> dice_fg(C), dice_bg(C);
  for (int c = 0; c < C; ++c) {
    const double d2 = double(C) * denom[c] * denom[c];
    dice_fg[c] = -(2.0 * denom[c] - numer[c]) / d2;
    dice_bg[c] = numer[c] / d2;
  }
  const double inv_vox = 1.0 / double(total_vox);

  for (int n = 0; n < logits.n; ++n) {
    std::vector<const T*> pr(C);
    std::vector<T*> gr(C);
    for (int c = 0; c < C; ++c) {
      pr[c] = probs.chan(n, c);
      gr[c] = grad->chan(n, c);
    }
    const std::uint8_t* tgt = target.v.data() + std::size_t(n) * m;
    double dLdp[16];
    for (std::size_t i = 0; i < m; ++i) {
      const int t = tgt[i];
      double dot = 0.0;
      for (int c = 0; c < C; ++c) {
        dLdp[c] = (c == t) ? dice_fg[c] : dice_bg[c];
        dot += dLdp[c] * double(pr[c][i]);
      }
      for (int c = 0; c < C; ++c) {
        // CE gradient in logit space plus the dice term chained through
        // the softmax jacobian
        const double ce_part =
            (double(pr[c][i]) - (c == t ? 1.0 : 0.0)) * inv_vox;
        const double dice_part = double(pr[c][i]) * (dLdp[c] - dot);
        gr[c][i] = T(ce_part + dice_part);
      }
    }
  }
  return terms;
}

// loss value only
template <class T>
LossTerms dice_ce_loss(const Tensor<T>& logits, const LabelTensor& target) {
  return dice_ce_loss_grad<T>(logits, target, nullptr);
}

}  // namespace renalparse
