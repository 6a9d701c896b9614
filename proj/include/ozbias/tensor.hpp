#pragma once

#include <array>
#include <cassert>
#include <cstddef>
#include <initializer_list>
#include <vector>

namespace ozbias {

// Dense row-major tensor of up to 4 dims. Activations are [C, H, W],
// convolution kernels [Cout, Cin, k, k], biases [C]. Templated on the
// scalar so the gradient checks can run the whole network in f64.
template <class T>
struct Tens {
  int nd = 0;
  std::array<int, 4> dim{{0, 0, 0, 0}};
  std::vector<T> v;

  Tens() = default;

  static Tens zeros(std::initializer_list<int> shape) {
    Tens t;
    t.nd = static_cast<int>(shape.size());
    assert(t.nd >= 1 && t.nd <= 4);
    std::size_t n = 1;
    int i = 0;
    for (int d : shape) {
      t.dim[i++] = d;
      n *= static_cast<std::size_t>(d);
    }
    t.v.assign(n, T(0));
    return t;
  }

  static Tens zeros_like(const Tens& other) {
    Tens t;
    t.nd = other.nd;
    t.dim = other.dim;
    t.v.assign(other.v.size(), T(0));
    return t;
  }

  std::size_t size() const { return v.size(); }
  T* data() { return v.data(); }
  const T* data() const { return v.data(); }

  bool same_shape(const Tens& other) const {
    return nd == other.nd && dim == other.dim;
  }

  T& operator()(int a) { return v[a]; }
  T operator()(int a) const { return v[a]; }
  T& operator()(int a, int b) { return v[static_cast<std::size_t>(a) * dim[1] + b]; }
  T operator()(int a, int b) const {
    return v[static_cast<std::size_t>(a) * dim[1] + b];
  }
  T& operator()(int a, int b, int c) {
    return v[(static_cast<std::size_t>(a) * dim[1] + b) * dim[2] + c];
  }
  T operator()(int a, int b, int c) const {
    return v[(static_cast<std::size_t>(a) * dim[1] + b) * dim[2] + c];
  }
  T& operator()(int a, int b, int c, int d) {
    return v[((static_cast<std::size_t>(a) * dim[1] + b) * dim[2] + c) * dim[3] +
             d];
  }
  T operator()(int a, int b, int c, int d) const {
    return v[((static_cast<std::size_t>(a) * dim[1] + b) * dim[2] + c) * dim[3] +
             d];
  }

  // Plane pointer for [C, H, W] tensors.
  T* plane(int c) { return v.data() + static_cast<std::size_t>(c) * dim[1] * dim[2]; }
  const T* plane(int c) const {
    return v.data() + static_cast<std::size_t>(c) * dim[1] * dim[2];
  }

  template <class U>
  Tens<U> cast() const {
    Tens<U> t;
    t.nd = nd;
    t.dim = dim;
    t.v.assign(v.begin(), v.end());
    return t;
  }
};

using TensF = Tens<float>;
using TensD = Tens<double>;

}  // namespace ozbias
