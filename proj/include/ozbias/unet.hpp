#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "ozbias/grid.hpp"
#include "ozbias/layers.hpp"

namespace ozbias {

// Small encoder-decoder regressor. Each level halves the spatial size with
// 2x2 max pooling; the decoder mirrors with 2x2 transposed convolutions and
// skip concatenation. Inputs are reflect-padded up to a multiple of 2^depth
// and the output is cropped back, so spatial shape is preserved for any
// H, W >= 2^depth. The Double Convolution block is conv -> dropout -> relu
// applied twice.
struct UNetConfig {
  int in_channels = 16;
  int base_width = 32;
  int depth = 2;
  double dropout_rate = 0.1;
  double lr = 1e-2;
  double weight_decay = 1e-3;
  bool decoupled_weight_decay = false;
  int epochs = 200;
  std::uint64_t seed = 0;

  int width(int level) const { return base_width << level; }

  void validate() const {
    if (in_channels < 1) throw DataError("in_channels must be >= 1");
    if (base_width < 1) throw DataError("base_width must be >= 1");
    if (depth < 1) throw DataError("depth must be >= 1");
    if (dropout_rate < 0.0 || dropout_rate >= 1.0) {
      throw DataError("dropout_rate must be in [0,1)");
    }
    if (!(lr > 0.0)) throw DataError("lr must be positive");
    if (epochs < 0) throw DataError("epochs must be >= 0");
    if (weight_decay < 0.0) throw DataError("weight_decay must be >= 0");
  }
};

template <class T>
struct DoubleConvParams {
  Tens<T> w1, b1, w2, b2;
};

template <class T>
struct DoubleConvCtx {
  Tens<T> x;   // block input
  Tens<T> d1;  // dropout-1 output (relu-1 input)
  Tens<T> r1;  // relu-1 output (conv-2 input)
  Tens<T> d2;  // dropout-2 output (relu-2 input)
  DropoutMask m1, m2;
};

template <class T>
Tens<T> double_conv_forward(const Tens<T>& x, const DoubleConvParams<T>& p,
                            double rate, bool training, std::mt19937& rng,
                            DoubleConvCtx<T>* ctx) {
  DropoutMask m1, m2;
  Tens<T> c1 = conv2d_forward(x, p.w1, p.b1);
  Tens<T> d1 = dropout_forward(c1, rate, rng, training, m1);
  Tens<T> r1 = relu_forward(d1);
  Tens<T> c2 = conv2d_forward(r1, p.w2, p.b2);
  Tens<T> d2 = dropout_forward(c2, rate, rng, training, m2);
  Tens<T> r2 = relu_forward(d2);
  if (ctx) {
    ctx->x = x;
    ctx->d1 = std::move(d1);
    ctx->r1 = std::move(r1);
    ctx->d2 = std::move(d2);
    ctx->m1 = std::move(m1);
    ctx->m2 = std::move(m2);
  }
  return r2;
}

template <class T>
struct DoubleConvGrads {
  Tens<T> dx;
  DoubleConvParams<T> p;
};

template <class T>
DoubleConvGrads<T> double_conv_backward(const Tens<T>& dy,
                                        const DoubleConvCtx<T>& ctx,
                                        const DoubleConvParams<T>& p) {
  DoubleConvGrads<T> g;
  Tens<T> dd2 = relu_backward(ctx.d2, dy);
  Tens<T> dc2 = dropout_backward(dd2, ctx.m2);
  ConvGrads<T> c2g = conv2d_backward(ctx.r1, p.w2, dc2);
  Tens<T> dd1 = relu_backward(ctx.d1, c2g.dx);
  Tens<T> dc1 = dropout_backward(dd1, ctx.m1);
  ConvGrads<T> c1g = conv2d_backward(ctx.x, p.w1, dc1);
  g.dx = std::move(c1g.dx);
  g.p.w1 = std::move(c1g.dw);
  g.p.b1 = std::move(c1g.db);
  g.p.w2 = std::move(c2g.dw);
  g.p.b2 = std::move(c2g.db);
  return g;
}

template <class T>
struct UNetParams {
  std::vector<DoubleConvParams<T>> enc;  // depth blocks
  DoubleConvParams<T> bottom;
  std::vector<Tens<T>> up;               // up[i]: [width(i+1), width(i), 2, 2]
  std::vector<DoubleConvParams<T>> dec;  // dec[i]: 2*width(i) -> width(i)
  Tens<T> out_w, out_b;                  // 1x1 conv to a single channel

  // Fixed traversal order; serialization, Adam state and gradients all
  // follow it.
  template <class Self, class Fn>
  static void for_each_impl(Self& self, Fn&& fn) {
    for (std::size_t i = 0; i < self.enc.size(); ++i) {
      std::string tag = "enc" + std::to_string(i);
      fn(tag + ".w1", self.enc[i].w1);
      fn(tag + ".b1", self.enc[i].b1);
      fn(tag + ".w2", self.enc[i].w2);
      fn(tag + ".b2", self.enc[i].b2);
    }
    fn("bottom.w1", self.bottom.w1);
    fn("bottom.b1", self.bottom.b1);
    fn("bottom.w2", self.bottom.w2);
    fn("bottom.b2", self.bottom.b2);
    for (std::size_t i = self.up.size(); i-- > 0;) {
      std::string tag = std::to_string(i);
      fn("up" + tag, self.up[i]);
      fn("dec" + tag + ".w1", self.dec[i].w1);
      fn("dec" + tag + ".b1", self.dec[i].b1);
      fn("dec" + tag + ".w2", self.dec[i].w2);
      fn("dec" + tag + ".b2", self.dec[i].b2);
    }
    fn("out.w", self.out_w);
    fn("out.b", self.out_b);
  }
  template <class Fn>
  void for_each(Fn&& fn) {
    for_each_impl(*this, fn);
  }
  template <class Fn>
  void for_each(Fn&& fn) const {
    for_each_impl(*this, fn);
  }

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for_each([&](const std::string&, const Tens<T>& t) { n += t.size(); });
    return n;
  }

  static DoubleConvParams<T> make_block(int cin, int cout) {
    DoubleConvParams<T> p;
    p.w1 = Tens<T>::zeros({cout, cin, 3, 3});
    p.b1 = Tens<T>::zeros({cout});
    p.w2 = Tens<T>::zeros({cout, cout, 3, 3});
    p.b2 = Tens<T>::zeros({cout});
    return p;
  }

  static UNetParams make(const UNetConfig& cfg) {
    cfg.validate();
    UNetParams p;
    for (int i = 0; i < cfg.depth; ++i) {
      int cin = i == 0 ? cfg.in_channels : cfg.width(i - 1);
      p.enc.push_back(make_block(cin, cfg.width(i)));
    }
    p.bottom = make_block(cfg.width(cfg.depth - 1), cfg.width(cfg.depth));
    for (int i = 0; i < cfg.depth; ++i) {
      p.up.push_back(Tens<T>::zeros({cfg.width(i + 1), cfg.width(i), 2, 2}));
      p.dec.push_back(make_block(2 * cfg.width(i), cfg.width(i)));
    }
    p.out_w = Tens<T>::zeros({1, cfg.width(0), 1, 1});
    p.out_b = Tens<T>::zeros({1});
    return p;
  }

  // Kernels uniform in +/- sqrt(1 / fan_in), biases zero; draws happen in
  // for_each order so a seed pins every weight.
  static UNetParams init(const UNetConfig& cfg, std::mt19937& rng) {
    UNetParams p = make(cfg);
    p.for_each([&](const std::string& name, Tens<T>& t) {
      if (t.nd == 1) return;  // bias
      int fan_in = t.dim[1] * t.dim[2] * t.dim[3];
      if (name.rfind("up", 0) == 0) fan_in = t.dim[0] * t.dim[2] * t.dim[3];
      double bound = std::sqrt(1.0 / fan_in);
      for (auto& e : t.v) {
        e = static_cast<T>(uniform_range(rng, -bound, bound));
      }
    });
    return p;
  }
};

template <class T>
struct UNetCtx {
  int H = 0, W = 0;    // original spatial shape
  int Hp = 0, Wp = 0;  // padded shape
  std::vector<DoubleConvCtx<T>> enc_ctx;
  std::vector<std::vector<int>> pool_argmax;
  std::vector<std::array<int, 3>> pool_in_shape;
  DoubleConvCtx<T> bottom_ctx;
  std::vector<Tens<T>> up_in;  // upconv input per decoder level
  std::vector<DoubleConvCtx<T>> dec_ctx;
  Tens<T> out_in;  // input of the 1x1 output conv
};

// Forward pass over a normalized [C, H, W] tensor; returns an [H, W] map.
template <class T>
Tens<T> unet_forward(const Tens<T>& x, const UNetParams<T>& params,
                     const UNetConfig& cfg, bool training, std::mt19937& rng,
                     UNetCtx<T>* ctx = nullptr) {
  if (x.nd != 3 || x.dim[0] != cfg.in_channels) {
    throw ChannelMismatch("unet_forward expects " +
                          std::to_string(cfg.in_channels) + " channels, got " +
                          std::to_string(x.nd == 3 ? x.dim[0] : -1));
  }
  const int H = x.dim[1], W = x.dim[2];
  const int m = 1 << cfg.depth;
  const int Hp = (H + m - 1) / m * m;
  const int Wp = (W + m - 1) / m * m;

  if (ctx) {
    ctx->H = H;
    ctx->W = W;
    ctx->Hp = Hp;
    ctx->Wp = Wp;
    ctx->enc_ctx.resize(cfg.depth);
    ctx->pool_argmax.resize(cfg.depth);
    ctx->pool_in_shape.resize(cfg.depth);
    ctx->up_in.resize(cfg.depth);
    ctx->dec_ctx.resize(cfg.depth);
  }

  Tens<T> cur = pad_symmetric(x, Hp, Wp);
  std::vector<Tens<T>> enc_out(cfg.depth);
  for (int i = 0; i < cfg.depth; ++i) {
    enc_out[i] =
        double_conv_forward(cur, params.enc[i], cfg.dropout_rate, training,
                            rng, ctx ? &ctx->enc_ctx[i] : nullptr);
    PoolResult<T> pooled = maxpool2_forward(enc_out[i]);
    if (ctx) {
      ctx->pool_argmax[i] = std::move(pooled.argmax);
      ctx->pool_in_shape[i] = {enc_out[i].dim[0], enc_out[i].dim[1],
                               enc_out[i].dim[2]};
    }
    cur = std::move(pooled.y);
  }

  cur = double_conv_forward(cur, params.bottom, cfg.dropout_rate, training,
                            rng, ctx ? &ctx->bottom_ctx : nullptr);

  for (int i = cfg.depth - 1; i >= 0; --i) {
    if (ctx) ctx->up_in[i] = cur;
    Tens<T> u = upconv2_forward(cur, params.up[i]);
    Tens<T> cat = concat_channels(u, enc_out[i]);
    cur = double_conv_forward(cat, params.dec[i], cfg.dropout_rate, training,
                              rng, ctx ? &ctx->dec_ctx[i] : nullptr);
  }

  if (ctx) ctx->out_in = cur;
  Tens<T> out = conv2d_forward(cur, params.out_w, params.out_b);
  out = crop_top_left(out, H, W);

  Tens<T> field = Tens<T>::zeros({H, W});
  field.v = std::move(out.v);
  return field;
}

template <class T>
struct UNetGrads {
  UNetParams<T> p;
  Tens<T> dx;
};

template <class T>
UNetGrads<T> unet_backward(const Tens<T>& dfield, const UNetCtx<T>& ctx,
                           const UNetParams<T>& params, const UNetConfig& cfg) {
  UNetGrads<T> g;
  g.p = UNetParams<T>::make(cfg);

  Tens<T> dy = Tens<T>::zeros({1, ctx.H, ctx.W});
  dy.v = dfield.v;
  dy = crop_top_left_backward(dy, ctx.Hp, ctx.Wp);

  ConvGrads<T> outg = conv2d_backward(ctx.out_in, params.out_w, dy);
  g.p.out_w = std::move(outg.dw);
  g.p.out_b = std::move(outg.db);
  Tens<T> dcur = std::move(outg.dx);

  std::vector<Tens<T>> denc(cfg.depth);
  for (int i = 0; i < cfg.depth; ++i) {
    DoubleConvGrads<T> dg = double_conv_backward(dcur, ctx.dec_ctx[i],
                                                 params.dec[i]);
    g.p.dec[i] = std::move(dg.p);
    Tens<T> du, dskip;
    split_channels(dg.dx, cfg.width(i), du, dskip);
    denc[i] = std::move(dskip);
    UpconvGrads<T> ug = upconv2_backward(ctx.up_in[i], params.up[i], du);
    g.p.up[i] = std::move(ug.dw);
    dcur = std::move(ug.dx);
  }

  DoubleConvGrads<T> bg = double_conv_backward(dcur, ctx.bottom_ctx,
                                               params.bottom);
  g.p.bottom = std::move(bg.p);
  dcur = std::move(bg.dx);

  for (int i = cfg.depth - 1; i >= 0; --i) {
    const auto& shape = ctx.pool_in_shape[i];
    Tens<T> dout = maxpool2_backward(dcur, ctx.pool_argmax[i], shape[0],
                                     shape[1], shape[2]);
    for (std::size_t j = 0; j < dout.v.size(); ++j) dout.v[j] += denc[i].v[j];
    DoubleConvGrads<T> eg = double_conv_backward(dout, ctx.enc_ctx[i],
                                                 params.enc[i]);
    g.p.enc[i] = std::move(eg.p);
    dcur = std::move(eg.dx);
  }

  g.dx = pad_symmetric_backward(dcur, ctx.H, ctx.W);
  return g;
}

// Mean squared error over valid cells only; gradient is exactly zero at
// masked cells.
template <class T>
struct MaskedMse {
  double loss = 0.0;
  Tens<T> dpred;
};

template <class T>
MaskedMse<T> masked_mse(const Tens<T>& pred, const MaskedField& target) {
  if (pred.nd != 2 || pred.dim[0] != target.spec.rows() ||
      pred.dim[1] != target.spec.cols()) {
    throw ShapeMismatch("prediction shape does not match target grid");
  }
  std::size_t n_valid = target.valid_count();
  if (n_valid == 0) throw AllMasked("target has no valid cells");
  MaskedMse<T> res;
  res.dpred = Tens<T>::zeros_like(pred);
  double sum = 0.0;
  double inv = 1.0 / static_cast<double>(n_valid);
  for (std::size_t i = 0; i < pred.v.size(); ++i) {
    if (target.mask[i]) {
      double r = static_cast<double>(pred.v[i]) - target.values[i];
      sum += r * r;
      res.dpred.v[i] = static_cast<T>(2.0 * r * inv);
    }
  }
  res.loss = sum * inv;
  return res;
}

}  // namespace ozbias
