#pragma once
// The two encoder-decoder architectures. Both expose an ordered list of
// mixing points (0 = input, j = output of encoder stage j) and a two-phase
// forward (forward_to / forward_from) so a batch can be interpolated at any
// of those points. Mixing at point k also interpolates the cached skip
// tensors below k with the same (lambda, pairing); otherwise the decoder
// would consume unmixed activations and the lambda=0 endpoint would not
// reduce to the permuted batch.
//
// unet3d layer list for depth d, base b (documented for the parameter
// count oracle; ch_s = b*2^(s-1)):
//   enc stage s:  conv3(in->ch_s) + IN + relu, conv3(ch_s->ch_s) + IN + relu,
//                 maxpool 2x          (in = in_channels for s=1, else ch_{s-1})
//   bottleneck:   conv3(ch_d->2*ch_d) + IN + relu, conv3 same + IN + relu
//   dec stage s:  nearest-up 2x, concat skip_s,
//                 conv3(up_ch+ch_s->ch_s) + IN + relu, conv3(ch_s->ch_s)+IN+relu
//   head:         conv1(ch_1 -> n_classes)
//
// segresnet: stem conv3(in->b); per stage s a pre-activation residual block
// at ch_s followed by maxpool + conv1(ch_s->2*ch_s); residual bottleneck at
// b*2^d; decoder mirrors with conv1 channel-reduce + nearest-up + additive
// skip + residual block; conv1 head. Optional fully-convolutional VAE
// branch from the bottleneck: IN+relu+conv1 to (mu, logvar), reparameterized
// sample, conv1 + three up/conv-block stages back to one reconstruction
// channel. Its losses are mean squared reconstruction error plus the mean
// per-element KL to a unit Gaussian.

#include <json.hpp>
#include <memory>

#include "renalparse/layers.hpp"

namespace renalparse {

enum class Arch { unet3d, segresnet };

inline const char* arch_name(Arch a) {
  return a == Arch::unet3d ? "unet3d" : "segresnet";
}
inline Arch arch_from_name(const std::string& s) {
  if (s == "unet3d") return Arch::unet3d;
  if (s == "segresnet") return Arch::segresnet;
  throw std::invalid_argument("unknown arch: " + s);
}

struct NetConfig {
  Arch arch = Arch::unet3d;
  int in_channels = 1;
  int n_classes = 5;
  int base_channels = 8;
  int depth = 3;
  bool vae_branch = true;  // segresnet only
  double vae_weight = 0.1;
  int vae_latent_channels = 8;

  void validate() const {
    if (in_channels < 1) throw std::invalid_argument("net: in_channels >= 1");
    if (n_classes < 2) throw std::invalid_argument("net: n_classes >= 2");
    if (base_channels < 2)
      throw std::invalid_argument("net: base_channels >= 2");
    if (depth < 1) throw std::invalid_argument("net: depth >= 1");
    if (vae_latent_channels < 1)
      throw std::invalid_argument("net: vae_latent_channels >= 1");
  }
};

void to_json(nlohmann::json& j, const NetConfig& c);
void from_json(const nlohmann::json& j, NetConfig& c);

struct VaeLossTerms {
  double recon = 0.0;
  double kl = 0.0;
};

// Gradients at an encoder stage s arrive in two domains when a mix is
// active: the trunk/pool consumed the mixed tensor only at s == k, while
// the decoder consumed mixed tensors for every s <= k. Fold both into the
// plain (pre-mix) domain before continuing into the stage backward.
template <class T>
Tensor<T> combine_skip_grads(int s, const Tensor<T>& gpool,
                             const Tensor<T>& gdec, bool mix_active, int mix_k,
                             T lambda, const std::vector<int>& pairing) {
  Tensor<T> out(gpool.n, gpool.c, gpool.x, gpool.y, gpool.z);
  if (mix_active && s == mix_k) {
    kernels::add(out.data(), gpool.data(), gdec.data(), out.size());
    return unmix_grad(out, lambda, pairing);
  }
  if (mix_active && s < mix_k) {
    Tensor<T> gd = unmix_grad(gdec, lambda, pairing);
    kernels::add(out.data(), gpool.data(), gd.data(), out.size());
    return out;
  }
  kernels::add(out.data(), gpool.data(), gdec.data(), out.size());
  return out;
}

template <class T>
class Network {
 public:
  virtual ~Network() = default;
  virtual const NetConfig& config() const = 0;

  // mixing points: 0 = input, 1..depth = encoder stage outputs
  int num_mix_points() const { return config().depth + 1; }

  virtual Tensor<T> forward(const Tensor<T>& x, Rng* rng = nullptr) = 0;
  virtual Tensor<T> forward_to(const Tensor<T>& x, int k) = 0;
  virtual Tensor<T> forward_from(const Tensor<T>& h, int k,
                                 Rng* rng = nullptr) = 0;

  // interpolate the cached skips below point k; call between forward_to and
  // forward_from, passing the same pairing used to mix the point tensor
  virtual void set_mix(int k, T lambda, const std::vector<int>& pairing) = 0;

  virtual void backward(const Tensor<T>& dlogits) = 0;
  virtual void zero_grad() = 0;
  virtual std::vector<ParamRef<T>> params() = 0;

  // segresnet auxiliary branch; other architectures return zero terms
  virtual bool has_vae() const { return false; }
  virtual const Tensor<T>& reconstruction() const {
    throw std::logic_error("network has no reconstruction branch");
  }
  virtual VaeLossTerms vae_prepare_backward(const Tensor<T>& /*target*/,
                                            double /*weight*/) {
    return {};
  }

  std::size_t param_count() {
    std::size_t n = 0;
    for (const auto& p : params()) n += p.value->size();
    return n;
  }

 protected:
  void check_input(const Tensor<T>& x) const {
    const auto& cfg = config();
    if (x.c != cfg.in_channels)
      throw std::invalid_argument("forward: expected " +
                                  std::to_string(cfg.in_channels) +
                                  " input channels, got " + std::to_string(x.c));
    if (x.n < 1) throw std::invalid_argument("forward: empty batch");
    const int div = 1 << cfg.depth;
    const int dims[3] = {x.x, x.y, x.z};
    for (int a = 0; a < 3; ++a)
      if (dims[a] % div != 0)
        throw std::invalid_argument(
            "forward: axis " + std::to_string(a) + " not divisible by " +
            std::to_string(div) + " (got " + std::to_string(dims[a]) + ")");
  }
};

template <class T>
class UNet3d final : public Network<T> {
 public:
  UNet3d(const NetConfig& cfg, std::uint64_t seed) : cfg_(cfg) {
    cfg_.validate();
    Rng rng = Rng::substream(seed, 1);
    const int d = cfg_.depth;
    int in_ch = cfg_.in_channels;
    for (int s = 1; s <= d; ++s) {
      const int ch = cfg_.base_channels << (s - 1);
      enc_a_.emplace_back(in_ch, ch, rng);
      enc_b_.emplace_back(ch, ch, rng);
      in_ch = ch;
    }
    const int bott_ch = cfg_.base_channels << d;
    bott_a_ = ConvBlock<T>(in_ch, bott_ch, rng);
    bott_b_ = ConvBlock<T>(bott_ch, bott_ch, rng);
    for (int s = d; s >= 1; --s) {
      const int ch = cfg_.base_channels << (s - 1);
      const int up_ch = s == d ? bott_ch : cfg_.base_channels << s;
      dec_a_.emplace_back(up_ch + ch, ch, rng);  // index d-s
      dec_b_.emplace_back(ch, ch, rng);
    }
    head_ = Conv3d<T>(cfg_.base_channels, cfg_.n_classes, 1, rng);
    pool_.resize(d);
    up_.resize(d);
    dec_src_.resize(d);
    gskip_.resize(d);
  }

  const NetConfig& config() const override { return cfg_; }

  Tensor<T> forward(const Tensor<T>& x, Rng* rng = nullptr) override {
    this->check_input(x);
    forward_to(x, 0);
    return forward_from(x, 0, rng);
  }

  Tensor<T> forward_to(const Tensor<T>& x, int k) override {
    this->check_input(x);
    check_point(k);
    mix_active_ = false;
    mix_k_ = -1;
    fwd_to_k_ = k;
    Tensor<T> cur = x;
    for (int s = 1; s <= k; ++s) {
      dec_src_[s - 1] = enc_b_[s - 1].forward(enc_a_[s - 1].forward(cur));
      if (s < k) cur = pool_[s - 1].forward(dec_src_[s - 1]);
    }
    return k == 0 ? x : dec_src_[k - 1];
  }

  void set_mix(int k, T lambda, const std::vector<int>& pairing) override {
    check_point(k);
    if (fwd_to_k_ != k)
      throw std::logic_error("set_mix: forward_to(x, k) must run first");
    for (int s = 1; s < k; ++s)
      dec_src_[s - 1] = mix_batch(dec_src_[s - 1], lambda, pairing);
    mix_active_ = true;
    mix_k_ = k;
    mix_lambda_ = lambda;
    mix_pairing_ = pairing;
  }

  Tensor<T> forward_from(const Tensor<T>& h, int k, Rng* = nullptr) override {
    check_point(k);
    const int d = cfg_.depth;
    Tensor<T> cur;
    if (k == 0) {
      this->check_input(h);
      cur = h;
    } else {
      dec_src_[k - 1] = h;
      cur = pool_[k - 1].forward(dec_src_[k - 1]);
    }
    for (int s = k + 1; s <= d; ++s) {
      dec_src_[s - 1] = enc_b_[s - 1].forward(enc_a_[s - 1].forward(cur));
      cur = pool_[s - 1].forward(dec_src_[s - 1]);
    }
    cur = bott_b_.forward(bott_a_.forward(cur));
    for (int s = d; s >= 1; --s) {
      const int i = d - s;
      Tensor<T> upped = up_[s - 1].forward(cur);
      cur = dec_b_[i].forward(
          dec_a_[i].forward(concat_channels(upped, dec_src_[s - 1])));
    }
    return head_.forward(cur);
  }

  void backward(const Tensor<T>& dlogits) override {
    const int d = cfg_.depth;
    Tensor<T> g = head_.backward(dlogits);
    for (int s = 1; s <= d; ++s) {
      const int i = d - s;
      g = dec_a_[i].backward(dec_b_[i].backward(g));
      Tensor<T> g_up;
      split_channels(g, g.c - dec_src_[s - 1].c, g_up, gskip_[s - 1]);
      g = up_[s - 1].backward(g_up);
    }
    g = bott_a_.backward(bott_b_.backward(g));
    for (int s = d; s >= 1; --s) {
      Tensor<T> gpool = pool_[s - 1].backward(g);
      Tensor<T> gplain =
          combine_skip_grads(s, gpool, gskip_[s - 1], mix_active_, mix_k_,
                             mix_lambda_, mix_pairing_);
      g = enc_a_[s - 1].backward(enc_b_[s - 1].backward(gplain));
    }
  }

  void zero_grad() override {
    for (auto& p : params())
      std::fill(p.grad->begin(), p.grad->end(), T(0));
  }

  std::vector<ParamRef<T>> params() override {
    std::vector<ParamRef<T>> out;
    const int d = cfg_.depth;
    for (int s = 1; s <= d; ++s) {
      enc_a_[s - 1].collect_params("enc" + std::to_string(s) + "a", out);
      enc_b_[s - 1].collect_params("enc" + std::to_string(s) + "b", out);
    }
    bott_a_.collect_params("bott_a", out);
    bott_b_.collect_params("bott_b", out);
    for (int s = d; s >= 1; --s) {
      dec_a_[d - s].collect_params("dec" + std::to_string(s) + "a", out);
      dec_b_[d - s].collect_params("dec" + std::to_string(s) + "b", out);
    }
    head_.collect_params("head", out);
    return out;
  }

 private:
  void check_point(int k) const {
    if (k < 0 || k > cfg_.depth)
      throw std::invalid_argument("mixing point " + std::to_string(k) +
                                  " out of range [0," +
                                  std::to_string(cfg_.depth) + "]");
  }

  NetConfig cfg_;
  std::vector<ConvBlock<T>> enc_a_, enc_b_;
  ConvBlock<T> bott_a_, bott_b_;
  std::vector<ConvBlock<T>> dec_a_, dec_b_;  // index d-s
  Conv3d<T> head_;
  std::vector<MaxPool3d<T>> pool_;
  std::vector<NearestUpsample3d<T>> up_;

  std::vector<Tensor<T>> dec_src_;  // what pool/decoder consumed per stage
  std::vector<Tensor<T>> gskip_;
  bool mix_active_ = false;
  int mix_k_ = -1;
  int fwd_to_k_ = -1;
  T mix_lambda_ = T(1);
  std::vector<int> mix_pairing_;
};

template <class T>
class SegResNet final : public Network<T> {
 public:
  SegResNet(const NetConfig& cfg, std::uint64_t seed) : cfg_(cfg) {
    cfg_.validate();
    Rng rng = Rng::substream(seed, 1);  // trunk stream
    const int d = cfg_.depth;
    stem_ = Conv3d<T>(cfg_.in_channels, cfg_.base_channels, 3, rng);
    for (int s = 1; s <= d; ++s) {
      const int ch = cfg_.base_channels << (s - 1);
      rb_enc_.emplace_back(ch, rng);
      down_.emplace_back(ch, ch * 2, 1, rng);
    }
    const int bott_ch = cfg_.base_channels << d;
    rb_bott_ = ResBlock<T>(bott_ch, rng);
    for (int s = d; s >= 1; --s) {
      const int ch = cfg_.base_channels << (s - 1);
      reduce_.emplace_back(ch * 2, ch, 1, rng);  // index d-s
      rb_dec_.emplace_back(ch, rng);
    }
    head_ = Conv3d<T>(cfg_.base_channels, cfg_.n_classes, 1, rng);
    pool_.resize(d);
    up_.resize(d);
    dec_src_.resize(d);
    gskip_.resize(d);

    if (cfg_.arch == Arch::segresnet && cfg_.vae_branch) {
      Rng vrng = Rng::substream(seed, 2);  // separate stream: trunk params
                                           // match a no-vae build bit for bit
      const int zch = cfg_.vae_latent_channels;
      vae_norm_ = InstanceNorm3d<T>(bott_ch);
      vae_head_ = Conv3d<T>(bott_ch, 2 * zch, 1, vrng);
      vae_proj_ = Conv3d<T>(zch, bott_ch / 2, 1, vrng);
      int ch = bott_ch / 2;
      for (int s = d; s >= 1; --s) {
        const int next = s > 1 ? ch / 2 : ch;
        vae_blocks_.emplace_back(ch, next, vrng);
        ch = next;
      }
      vae_out_ = Conv3d<T>(ch, cfg_.in_channels, 1, vrng);
      vae_up_.resize(d);
      has_vae_ = true;
    }
  }

  const NetConfig& config() const override { return cfg_; }
  bool has_vae() const override { return has_vae_; }
  const Tensor<T>& reconstruction() const override {
    if (!has_vae_) throw std::logic_error("segresnet built without vae branch");
    return recon_;
  }

  Tensor<T> forward(const Tensor<T>& x, Rng* rng = nullptr) override {
    this->check_input(x);
    forward_to(x, 0);
    return forward_from(x, 0, rng);
  }

  Tensor<T> forward_to(const Tensor<T>& x, int k) override {
    this->check_input(x);
    check_point(k);
    mix_active_ = false;
    mix_k_ = -1;
    fwd_to_k_ = k;
    vae_pending_ = false;
    if (k == 0) return x;
    Tensor<T> cur = stem_.forward(x);
    for (int s = 1; s <= k; ++s) {
      dec_src_[s - 1] = rb_enc_[s - 1].forward(cur);
      if (s < k)
        cur = down_[s - 1].forward(pool_[s - 1].forward(dec_src_[s - 1]));
    }
    return dec_src_[k - 1];
  }

  void set_mix(int k, T lambda, const std::vector<int>& pairing) override {
    check_point(k);
    if (fwd_to_k_ != k)
      throw std::logic_error("set_mix: forward_to(x, k) must run first");
    for (int s = 1; s < k; ++s)
      dec_src_[s - 1] = mix_batch(dec_src_[s - 1], lambda, pairing);
    mix_active_ = true;
    mix_k_ = k;
    mix_lambda_ = lambda;
    mix_pairing_ = pairing;
  }

  Tensor<T> forward_from(const Tensor<T>& h, int k, Rng* rng = nullptr) override {
    check_point(k);
    const int d = cfg_.depth;
    Tensor<T> cur;
    if (k == 0) {
      this->check_input(h);
      cur = stem_.forward(h);
    } else {
      dec_src_[k - 1] = h;
      cur = down_[k - 1].forward(pool_[k - 1].forward(dec_src_[k - 1]));
    }
    for (int s = k + 1; s <= d; ++s) {
      dec_src_[s - 1] = rb_enc_[s - 1].forward(cur);
      cur = down_[s - 1].forward(pool_[s - 1].forward(dec_src_[s - 1]));
    }
    cur = rb_bott_.forward(cur);
    if (has_vae_) forward_vae(cur, rng);
    for (int s = d; s >= 1; --s) {
      const int i = d - s;
      Tensor<T> upped = up_[s - 1].forward(reduce_[i].forward(cur));
      Tensor<T> merged(upped.n, upped.c, upped.x, upped.y, upped.z);
      kernels::add(merged.data(), upped.data(), dec_src_[s - 1].data(),
                   merged.size());
      cur = rb_dec_[i].forward(merged);
    }
    return head_.forward(cur);
  }

  VaeLossTerms vae_prepare_backward(const Tensor<T>& target,
                                    double weight) override {
    if (!has_vae_) return {};
    if (!target.same_shape(recon_))
      throw std::invalid_argument("vae: target shape " + target.shape_str() +
                                  " != reconstruction " + recon_.shape_str());
    VaeLossTerms terms;
    const std::size_t m = recon_.size();
    Tensor<T> drecon(recon_.n, recon_.c, recon_.x, recon_.y, recon_.z);
    double acc = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double diff = double(recon_.v[i]) - double(target.v[i]);
      acc += diff * diff;
      drecon.v[i] = T(weight * 2.0 * diff / double(m));
    }
    terms.recon = acc / double(m);

    const std::size_t L = mu_.size();
    double kl = 0.0;
    Tensor<T> dmu(mu_.n, mu_.c, mu_.x, mu_.y, mu_.z);
    Tensor<T> dlv(lv_.n, lv_.c, lv_.x, lv_.y, lv_.z);
    for (std::size_t i = 0; i < L; ++i) {
      const double mu = double(mu_.v[i]), lv = double(lv_.v[i]);
      kl += 0.5 * (mu * mu + std::exp(lv) - 1.0 - lv);
      dmu.v[i] = T(weight * mu / double(L));
      dlv.v[i] = T(weight * 0.5 * (std::exp(lv) - 1.0) / double(L));
    }
    terms.kl = kl / double(L);

    // backprop the decode chain into dz, then through the sampler
    Tensor<T> g = vae_out_.backward(drecon);
    for (int i = int(vae_blocks_.size()) - 1; i >= 0; --i) {
      g = vae_blocks_[i].backward(g);
      g = vae_up_[i].backward(g);
    }
    Tensor<T> dz = vae_proj_.backward(g);
    for (std::size_t i = 0; i < L; ++i) {
      dmu.v[i] += dz.v[i];
      dlv.v[i] += T(double(dz.v[i]) * double(eps_.v[i]) * 0.5 *
                    std::exp(0.5 * double(lv_.v[i])));
    }
    Tensor<T> dstats = concat_channels(dmu, dlv);
    vae_tap_grad_ =
        vae_norm_.backward(vae_act_.backward(vae_head_.backward(dstats)));
    vae_pending_ = true;
    return terms;
  }

  void backward(const Tensor<T>& dlogits) override {
    const int d = cfg_.depth;
    Tensor<T> g = head_.backward(dlogits);
    for (int s = 1; s <= d; ++s) {
      const int i = d - s;
      g = rb_dec_[i].backward(g);
      gskip_[s - 1] = g;  // additive skip: same grad flows both ways
      g = reduce_[i].backward(up_[s - 1].backward(g));
    }
    if (vae_pending_) {
      kernels::add(g.data(), g.data(), vae_tap_grad_.data(), g.size());
      vae_pending_ = false;
    }
    g = rb_bott_.backward(g);
    for (int s = d; s >= 1; --s) {
      Tensor<T> gpool = pool_[s - 1].backward(down_[s - 1].backward(g));
      Tensor<T> gplain =
          combine_skip_grads(s, gpool, gskip_[s - 1], mix_active_, mix_k_,
                             mix_lambda_, mix_pairing_);
      g = rb_enc_[s - 1].backward(gplain);
    }
    stem_.backward(g);
  }

  void zero_grad() override {
    for (auto& p : params())
      std::fill(p.grad->begin(), p.grad->end(), T(0));
  }

  std::vector<ParamRef<T>> params() override {
    std::vector<ParamRef<T>> out;
    const int d = cfg_.depth;
    stem_.collect_params("stem", out);
    for (int s = 1; s <= d; ++s) {
      rb_enc_[s - 1].collect_params("enc" + std::to_string(s), out);
      down_[s - 1].collect_params("down" + std::to_string(s), out);
    }
    rb_bott_.collect_params("bott", out);
    for (int s = d; s >= 1; --s) {
      reduce_[d - s].collect_params("reduce" + std::to_string(s), out);
      rb_dec_[d - s].collect_params("dec" + std::to_string(s), out);
    }
    head_.collect_params("head", out);
    if (has_vae_) {
      vae_norm_.collect_params("vae.norm", out);
      vae_head_.collect_params("vae.head", out);
      vae_proj_.collect_params("vae.proj", out);
      for (std::size_t i = 0; i < vae_blocks_.size(); ++i)
        vae_blocks_[i].collect_params("vae.block" + std::to_string(i), out);
      vae_out_.collect_params("vae.out", out);
    }
    return out;
  }

 private:
  void check_point(int k) const {
    if (k < 0 || k > cfg_.depth)
      throw std::invalid_argument("mixing point " + std::to_string(k) +
                                  " out of range [0," +
                                  std::to_string(cfg_.depth) + "]");
  }

  void forward_vae(const Tensor<T>& bott_out, Rng* rng) {
    Tensor<T> stats =
        vae_head_.forward(vae_act_.forward(vae_norm_.forward(bott_out)));
    split_channels(stats, stats.c / 2, mu_, lv_);
    eps_ = Tensor<T>(mu_.n, mu_.c, mu_.x, mu_.y, mu_.z);
    if (rng)
      for (auto& e : eps_.v) e = T(rng->normal());
    Tensor<T> z(mu_.n, mu_.c, mu_.x, mu_.y, mu_.z);
    for (std::size_t i = 0; i < z.size(); ++i)
      z.v[i] = mu_.v[i] + T(double(eps_.v[i]) * std::exp(0.5 * double(lv_.v[i])));
    Tensor<T> cur = vae_proj_.forward(z);
    for (std::size_t i = 0; i < vae_blocks_.size(); ++i) {
      cur = vae_up_[i].forward(cur);
      cur = vae_blocks_[i].forward(cur);
    }
    recon_ = vae_out_.forward(cur);
  }

  NetConfig cfg_;
  Conv3d<T> stem_;
  std::vector<ResBlock<T>> rb_enc_;
  std::vector<Conv3d<T>> down_;  // 1x1 channel-doubling after pool
  ResBlock<T> rb_bott_;
  std::vector<Conv3d<T>> reduce_;  // index d-s
  std::vector<ResBlock<T>> rb_dec_;
  Conv3d<T> head_;
  std::vector<MaxPool3d<T>> pool_;
  std::vector<NearestUpsample3d<T>> up_;

  bool has_vae_ = false;
  InstanceNorm3d<T> vae_norm_;
  ReLU<T> vae_act_;
  Conv3d<T> vae_head_, vae_proj_, vae_out_;
  std::vector<ConvBlock<T>> vae_blocks_;
  std::vector<NearestUpsample3d<T>> vae_up_;
  Tensor<T> mu_, lv_, eps_, recon_, vae_tap_grad_;
  bool vae_pending_ = false;

  std::vector<Tensor<T>> dec_src_, gskip_;
  bool mix_active_ = false;
  int mix_k_ = -1;
  int fwd_to_k_ = -1;
  T mix_lambda_ = T(1);
  std::vector<int> mix_pairing_;
};

// build per config; identical seed => identical initial parameters
template <class T>
std::unique_ptr<Network<T>> build_network(const NetConfig& cfg,
                                          std::uint64_t seed) {
  cfg.validate();
  if (cfg.arch == Arch::unet3d)
    return std::make_unique<UNet3d<T>>(cfg, seed);
  return std::make_unique<SegResNet<T>>(cfg, seed);
}

// ------------------------------------------------------------ checkpoints --

struct Checkpoint {
  NetConfig config;
  nlohmann::json metadata;  // free-form training info
  std::unique_ptr<Network<float>> net;
};

// format: magic "RNPCKPT1", uint32 json header length, json header
// (config + metadata + parameter manifest), raw float32 parameter data
void save_checkpoint(Network<float>& net, const nlohmann::json& metadata,
                     const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace renalparse
