#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "ozbias/errors.hpp"
#include "ozbias/rng.hpp"
#include "ozbias/tensor.hpp"
#include "ozbias/threading.hpp"

// Layer kernels with explicit backward passes. Every output element is
// produced by exactly one task with a fixed inner accumulation order, so
// results are bit-identical for any thread count.

namespace ozbias {

// ---- conv2d: odd kernel, stride 1, zero padding k/2 (same spatial size) ----

template <class T>
Tens<T> conv2d_forward(const Tens<T>& x, const Tens<T>& w, const Tens<T>& b) {
  if (x.nd != 3 || w.nd != 4 || b.nd != 1) {
    throw ShapeMismatch("conv2d expects x[C,H,W], w[Co,Ci,k,k], b[Co]");
  }
  const int Ci = x.dim[0], H = x.dim[1], W = x.dim[2];
  const int Co = w.dim[0], k = w.dim[2];
  if (w.dim[1] != Ci || w.dim[3] != k || k % 2 == 0 || b.dim[0] != Co) {
    throw ShapeMismatch("conv2d kernel/bias shape mismatch");
  }
  const int p = k / 2;
  Tens<T> y = Tens<T>::zeros({Co, H, W});
  parallel_for(Co, [&](int co_begin, int co_end) {
    for (int co = co_begin; co < co_end; ++co) {
      T* yp = y.plane(co);
      const T bias = b(co);
      for (int i = 0; i < H * W; ++i) yp[i] = bias;
      for (int ci = 0; ci < Ci; ++ci) {
        const T* xp = x.plane(ci);
        for (int kh = 0; kh < k; ++kh) {
          const int dh = kh - p;
          const int h0 = std::max(0, -dh), h1 = std::min(H, H - dh);
          for (int kw = 0; kw < k; ++kw) {
            const int dw = kw - p;
            const int w0 = std::max(0, -dw), w1 = std::min(W, W - dw);
            const T wv = w(co, ci, kh, kw);
            for (int h = h0; h < h1; ++h) {
              T* yrow = yp + static_cast<std::size_t>(h) * W;
              const T* xrow = xp + static_cast<std::size_t>(h + dh) * W + dw;
              for (int j = w0; j < w1; ++j) yrow[j] += wv * xrow[j];
            }
          }
        }
      }
    }
  });
  return y;
}

template <class T>
struct ConvGrads {
  Tens<T> dx, dw, db;
};

template <class T>
ConvGrads<T> conv2d_backward(const Tens<T>& x, const Tens<T>& w,
                             const Tens<T>& dy) {
  const int Ci = x.dim[0], H = x.dim[1], W = x.dim[2];
  const int Co = w.dim[0], k = w.dim[2];
  const int p = k / 2;
  if (dy.dim[0] != Co || dy.dim[1] != H || dy.dim[2] != W) {
    throw ShapeMismatch("conv2d_backward dy shape mismatch");
  }
  ConvGrads<T> g;
  g.dx = Tens<T>::zeros_like(x);
  g.dw = Tens<T>::zeros_like(w);
  g.db = Tens<T>::zeros({Co});

  parallel_for(Co, [&](int co_begin, int co_end) {
    for (int co = co_begin; co < co_end; ++co) {
      const T* dyp = dy.plane(co);
      T acc = T(0);
      for (int i = 0; i < H * W; ++i) acc += dyp[i];
      g.db(co) = acc;
      for (int ci = 0; ci < Ci; ++ci) {
        const T* xp = x.plane(ci);
        for (int kh = 0; kh < k; ++kh) {
          const int dh = kh - p;
          const int h0 = std::max(0, -dh), h1 = std::min(H, H - dh);
          for (int kw = 0; kw < k; ++kw) {
            const int dw = kw - p;
            const int w0 = std::max(0, -dw), w1 = std::min(W, W - dw);
            T sum = T(0);
            for (int h = h0; h < h1; ++h) {
              const T* dyrow = dyp + static_cast<std::size_t>(h) * W;
              const T* xrow = xp + static_cast<std::size_t>(h + dh) * W + dw;
              for (int j = w0; j < w1; ++j) sum += dyrow[j] * xrow[j];
            }
            g.dw(co, ci, kh, kw) = sum;
          }
        }
      }
    }
  });

  parallel_for(Ci, [&](int ci_begin, int ci_end) {
    for (int ci = ci_begin; ci < ci_end; ++ci) {
      T* dxp = g.dx.plane(ci);
      for (int co = 0; co < Co; ++co) {
        const T* dyp = dy.plane(co);
        for (int kh = 0; kh < k; ++kh) {
          const int dh = kh - p;
          const int a0 = std::max(0, dh), a1 = std::min(H, H + dh);
          for (int kw = 0; kw < k; ++kw) {
            const int dw = kw - p;
            const int b0 = std::max(0, dw), b1 = std::min(W, W + dw);
            const T wv = w(co, ci, kh, kw);
            for (int a = a0; a < a1; ++a) {
              T* dxrow = dxp + static_cast<std::size_t>(a) * W;
              const T* dyrow = dyp + static_cast<std::size_t>(a - dh) * W - dw;
              for (int j = b0; j < b1; ++j) dxrow[j] += wv * dyrow[j];
            }
          }
        }
      }
    }
  });
  return g;
}

// ---- relu ----

template <class T>
Tens<T> relu_forward(const Tens<T>& x) {
  Tens<T> y = x;
  for (auto& e : y.v) e = e > T(0) ? e : T(0);
  return y;
}

// Gradient passes where the forward input was > 0 (zero at x == 0).
template <class T>
Tens<T> relu_backward(const Tens<T>& x, const Tens<T>& dy) {
  Tens<T> dx = Tens<T>::zeros_like(x);
  for (std::size_t i = 0; i < x.v.size(); ++i) {
    dx.v[i] = x.v[i] > T(0) ? dy.v[i] : T(0);
  }
  return dx;
}

// ---- inverted dropout ----

struct DropoutMask {
  std::vector<std::uint8_t> keep;  // empty = identity (eval or rate 0)
  double rate = 0.0;
};

// Mask entries are drawn sequentially from the caller's engine, so the draw
// sequence is independent of thread count.
template <class T>
Tens<T> dropout_forward(const Tens<T>& x, double rate, std::mt19937& rng,
                        bool training, DropoutMask& mask) {
  if (rate < 0.0 || rate >= 1.0) throw DataError("dropout rate must be in [0,1)");
  mask.rate = rate;
  mask.keep.clear();
  if (!training || rate == 0.0) return x;
  mask.keep.resize(x.v.size());
  Tens<T> y = Tens<T>::zeros_like(x);
  const T scale = T(1.0 / (1.0 - rate));
  for (std::size_t i = 0; i < x.v.size(); ++i) {
    bool keep = uniform01(rng) >= rate;
    mask.keep[i] = keep;
    y.v[i] = keep ? x.v[i] * scale : T(0);
  }
  return y;
}

// Re-applies a stored mask (finite-difference probes need a frozen mask).
template <class T>
Tens<T> dropout_apply(const Tens<T>& x, const DropoutMask& mask) {
  if (mask.keep.empty()) return x;
  Tens<T> y = Tens<T>::zeros_like(x);
  const T scale = T(1.0 / (1.0 - mask.rate));
  for (std::size_t i = 0; i < x.v.size(); ++i) {
    y.v[i] = mask.keep[i] ? x.v[i] * scale : T(0);
  }
  return y;
}

template <class T>
Tens<T> dropout_backward(const Tens<T>& dy, const DropoutMask& mask) {
  return dropout_apply(dy, mask);
}

// ---- 2x2 max pooling, stride 2 ----

template <class T>
struct PoolResult {
  Tens<T> y;
  std::vector<int> argmax;  // input flat index per output element
};

template <class T>
PoolResult<T> maxpool2_forward(const Tens<T>& x) {
  const int C = x.dim[0], H = x.dim[1], W = x.dim[2];
  if (H % 2 != 0 || W % 2 != 0) {
    throw OddSpatialDims("maxpool2 needs even H and W, got " +
                         std::to_string(H) + "x" + std::to_string(W));
  }
  PoolResult<T> res;
  res.y = Tens<T>::zeros({C, H / 2, W / 2});
  res.argmax.resize(res.y.size());
  for (int c = 0; c < C; ++c) {
    const T* xp = x.plane(c);
    T* yp = res.y.plane(c);
    int* ap = res.argmax.data() +
              static_cast<std::size_t>(c) * (H / 2) * (W / 2);
    for (int h = 0; h < H / 2; ++h) {
      for (int w = 0; w < W / 2; ++w) {
        // Fixed scan order; strict > keeps the first index on ties.
        int base = 2 * h * W + 2 * w;
        int best_idx = base;
        T best = xp[base];
        const int offsets[3] = {1, W, W + 1};
        for (int o : offsets) {
          if (xp[base + o] > best) {
            best = xp[base + o];
            best_idx = base + o;
          }
        }
        yp[h * (W / 2) + w] = best;
        ap[h * (W / 2) + w] =
            static_cast<int>(c) * H * W + best_idx;
      }
    }
  }
  return res;
}

template <class T>
Tens<T> maxpool2_backward(const Tens<T>& dy, const std::vector<int>& argmax,
                          int C, int H, int W) {
  Tens<T> dx = Tens<T>::zeros({C, H, W});
  for (std::size_t i = 0; i < dy.v.size(); ++i) {
    dx.v[argmax[i]] += dy.v[i];
  }
  return dx;
}

// ---- transposed conv, 2x2 kernel, stride 2 (doubles H and W) ----
// Weight layout [Cin, Cout, 2, 2]; output windows never overlap.

template <class T>
Tens<T> upconv2_forward(const Tens<T>& x, const Tens<T>& w) {
  if (x.nd != 3 || w.nd != 4 || w.dim[0] != x.dim[0] || w.dim[2] != 2 ||
      w.dim[3] != 2) {
    throw ShapeMismatch("upconv2 expects x[Ci,H,W], w[Ci,Co,2,2]");
  }
  const int Ci = x.dim[0], H = x.dim[1], W = x.dim[2];
  const int Co = w.dim[1];
  Tens<T> y = Tens<T>::zeros({Co, 2 * H, 2 * W});
  parallel_for(Co, [&](int co_begin, int co_end) {
    for (int co = co_begin; co < co_end; ++co) {
      T* yp = y.plane(co);
      for (int ci = 0; ci < Ci; ++ci) {
        const T* xp = x.plane(ci);
        const T w00 = w(ci, co, 0, 0), w01 = w(ci, co, 0, 1);
        const T w10 = w(ci, co, 1, 0), w11 = w(ci, co, 1, 1);
        for (int h = 0; h < H; ++h) {
          const T* xrow = xp + static_cast<std::size_t>(h) * W;
          T* yrow0 = yp + static_cast<std::size_t>(2 * h) * 2 * W;
          T* yrow1 = yrow0 + 2 * W;
          for (int j = 0; j < W; ++j) {
            const T xv = xrow[j];
            yrow0[2 * j] += xv * w00;
            yrow0[2 * j + 1] += xv * w01;
            yrow1[2 * j] += xv * w10;
            yrow1[2 * j + 1] += xv * w11;
          }
        }
      }
    }
  });
  return y;
}

template <class T>
struct UpconvGrads {
  Tens<T> dx, dw;
};

template <class T>
UpconvGrads<T> upconv2_backward(const Tens<T>& x, const Tens<T>& w,
                                const Tens<T>& dy) {
  const int Ci = x.dim[0], H = x.dim[1], W = x.dim[2];
  const int Co = w.dim[1];
  if (dy.dim[0] != Co || dy.dim[1] != 2 * H || dy.dim[2] != 2 * W) {
    throw ShapeMismatch("upconv2_backward dy shape mismatch");
  }
  UpconvGrads<T> g;
  g.dx = Tens<T>::zeros_like(x);
  g.dw = Tens<T>::zeros_like(w);
  parallel_for(Ci, [&](int ci_begin, int ci_end) {
    for (int ci = ci_begin; ci < ci_end; ++ci) {
      const T* xp = x.plane(ci);
      T* dxp = g.dx.plane(ci);
      for (int co = 0; co < Co; ++co) {
        const T* dyp = dy.plane(co);
        T s00 = T(0), s01 = T(0), s10 = T(0), s11 = T(0);
        const T w00 = w(ci, co, 0, 0), w01 = w(ci, co, 0, 1);
        const T w10 = w(ci, co, 1, 0), w11 = w(ci, co, 1, 1);
        for (int h = 0; h < H; ++h) {
          const T* xrow = xp + static_cast<std::size_t>(h) * W;
          T* dxrow = dxp + static_cast<std::size_t>(h) * W;
          const T* dyrow0 = dyp + static_cast<std::size_t>(2 * h) * 2 * W;
          const T* dyrow1 = dyrow0 + 2 * W;
          for (int j = 0; j < W; ++j) {
            const T d00 = dyrow0[2 * j], d01 = dyrow0[2 * j + 1];
            const T d10 = dyrow1[2 * j], d11 = dyrow1[2 * j + 1];
            dxrow[j] += w00 * d00 + w01 * d01 + w10 * d10 + w11 * d11;
            const T xv = xrow[j];
            s00 += xv * d00;
            s01 += xv * d01;
            s10 += xv * d10;
            s11 += xv * d11;
          }
        }
        g.dw(ci, co, 0, 0) += s00;
        g.dw(ci, co, 0, 1) += s01;
        g.dw(ci, co, 1, 0) += s10;
        g.dw(ci, co, 1, 1) += s11;
      }
    }
  });
  return g;
}

// ---- symmetric padding (bottom/right) and crop-back ----

template <class T>
Tens<T> pad_symmetric(const Tens<T>& x, int target_h, int target_w) {
  const int C = x.dim[0], H = x.dim[1], W = x.dim[2];
  if (target_h - H > H || target_w - W > W || target_h < H || target_w < W) {
    throw ShapeMismatch("symmetric pad larger than the input");
  }
  Tens<T> y = Tens<T>::zeros({C, target_h, target_w});
  auto mirror = [](int i, int n) { return i < n ? i : 2 * n - 1 - i; };
  for (int c = 0; c < C; ++c) {
    const T* xp = x.plane(c);
    T* yp = y.plane(c);
    for (int h = 0; h < target_h; ++h) {
      const T* xrow = xp + static_cast<std::size_t>(mirror(h, H)) * W;
      T* yrow = yp + static_cast<std::size_t>(h) * target_w;
      for (int j = 0; j < target_w; ++j) yrow[j] = xrow[mirror(j, W)];
    }
  }
  return y;
}

template <class T>
Tens<T> pad_symmetric_backward(const Tens<T>& dy, int H, int W) {
  const int C = dy.dim[0], Hp = dy.dim[1], Wp = dy.dim[2];
  Tens<T> dx = Tens<T>::zeros({C, H, W});
  auto mirror = [](int i, int n) { return i < n ? i : 2 * n - 1 - i; };
  for (int c = 0; c < C; ++c) {
    const T* dyp = dy.plane(c);
    T* dxp = dx.plane(c);
    for (int h = 0; h < Hp; ++h) {
      const T* dyrow = dyp + static_cast<std::size_t>(h) * Wp;
      T* dxrow = dxp + static_cast<std::size_t>(mirror(h, H)) * W;
      for (int j = 0; j < Wp; ++j) dxrow[mirror(j, W)] += dyrow[j];
    }
  }
  return dx;
}

template <class T>
Tens<T> crop_top_left(const Tens<T>& x, int H, int W) {
  const int C = x.dim[0], Hp = x.dim[1], Wp = x.dim[2];
  Tens<T> y = Tens<T>::zeros({C, H, W});
  for (int c = 0; c < C; ++c) {
    const T* xp = x.plane(c);
    T* yp = y.plane(c);
    for (int h = 0; h < H; ++h) {
      std::copy(xp + static_cast<std::size_t>(h) * Wp,
                xp + static_cast<std::size_t>(h) * Wp + W,
                yp + static_cast<std::size_t>(h) * W);
    }
  }
  return y;
}

template <class T>
Tens<T> crop_top_left_backward(const Tens<T>& dy, int Hp, int Wp) {
  const int C = dy.dim[0], H = dy.dim[1], W = dy.dim[2];
  Tens<T> dx = Tens<T>::zeros({C, Hp, Wp});
  for (int c = 0; c < C; ++c) {
    const T* dyp = dy.plane(c);
    T* dxp = dx.plane(c);
    for (int h = 0; h < H; ++h) {
      std::copy(dyp + static_cast<std::size_t>(h) * W,
                dyp + static_cast<std::size_t>(h) * W + W,
                dxp + static_cast<std::size_t>(h) * Wp);
    }
  }
  return dx;
}

// ---- channel concatenation ----

template <class T>
Tens<T> concat_channels(const Tens<T>& a, const Tens<T>& b) {
  if (a.dim[1] != b.dim[1] || a.dim[2] != b.dim[2]) {
    throw ShapeMismatch("concat_channels spatial shapes differ");
  }
  Tens<T> y = Tens<T>::zeros({a.dim[0] + b.dim[0], a.dim[1], a.dim[2]});
  std::copy(a.v.begin(), a.v.end(), y.v.begin());
  std::copy(b.v.begin(), b.v.end(), y.v.begin() + a.v.size());
  return y;
}

template <class T>
void split_channels(const Tens<T>& dy, int ca, Tens<T>& da, Tens<T>& db) {
  da = Tens<T>::zeros({ca, dy.dim[1], dy.dim[2]});
  db = Tens<T>::zeros({dy.dim[0] - ca, dy.dim[1], dy.dim[2]});
  std::copy(dy.v.begin(), dy.v.begin() + da.v.size(), da.v.begin());
  std::copy(dy.v.begin() + da.v.size(), dy.v.end(), db.v.begin());
}

}  // namespace ozbias
