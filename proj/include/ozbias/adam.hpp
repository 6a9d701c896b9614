#pragma once

#include <cmath>
#include <vector>

#include "ozbias/errors.hpp"
#include "ozbias/tensor.hpp"

namespace ozbias {

// Classical Adam with bias correction. Weight decay defaults to the coupled
// form (decay added to the gradient before the moment updates); the
// decoupled variant subtracts lr*wd*param directly. Internal arithmetic is
// f64 regardless of the parameter scalar type.
template <class T>
struct AdamState {
  std::vector<Tens<double>> m;
  std::vector<Tens<double>> v;
  long t = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  static AdamState for_params(const std::vector<Tens<T>*>& params) {
    AdamState s;
    for (const Tens<T>* p : params) {
      Tens<double> z;
      z.nd = p->nd;
      z.dim = p->dim;
      z.v.assign(p->size(), 0.0);
      s.m.push_back(z);
      s.v.push_back(std::move(z));
    }
    return s;
  }
};

template <class T>
void adam_step(const std::vector<Tens<T>*>& params,
               const std::vector<const Tens<T>*>& grads, AdamState<T>& state,
               double lr, double weight_decay, bool decoupled = false) {
  if (params.size() != grads.size() || params.size() != state.m.size()) {
    throw ShapeMismatch("adam_step parameter/gradient list mismatch");
  }
  state.t += 1;
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.t));
  for (std::size_t k = 0; k < params.size(); ++k) {
    Tens<T>& p = *params[k];
    const Tens<T>& g = *grads[k];
    if (!p.same_shape(g)) throw ShapeMismatch("adam_step grad shape mismatch");
    auto& m = state.m[k].v;
    auto& v = state.v[k].v;
    for (std::size_t i = 0; i < p.v.size(); ++i) {
      double param = static_cast<double>(p.v[i]);
      double grad = static_cast<double>(g.v[i]);
      if (!decoupled) grad += weight_decay * param;
      m[i] = state.beta1 * m[i] + (1.0 - state.beta1) * grad;
      v[i] = state.beta2 * v[i] + (1.0 - state.beta2) * grad * grad;
      double m_hat = m[i] / bc1;
      double v_hat = v[i] / bc2;
      double update = lr * m_hat / (std::sqrt(v_hat) + state.eps);
      if (decoupled) update += lr * weight_decay * param;
      p.v[i] = static_cast<T>(param - update);
    }
  }
}

}  // namespace ozbias
