/*
 * Copyright 2026 The depthcomp Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */


#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace depthcomp {

/// Dense (n, c, h, w) feature map, row-major.
template <class T>
struct Tensor4 {
  int n = 0;
  int c = 0;
  int h = 0;
  int w = 0;
  std::vector<T> data;

  Tensor4() = default;
  Tensor4(int n_, int c_, int h_, int w_, T fill = T(0))
      : n(n_), c(c_), h(h_), w(w_), data(static_cast<std::size_t>(n_) * c_ * h_ * w_, fill) {}

  std::size_t offset(int in, int ic, int y, int x) const {
    return ((static_cast<std::size_t>(in) * c + ic) * h + y) * w + x;
  }
  T& at(int in, int ic, int y, int x) { return data[offset(in, ic, y, x)]; }
  const T& at(int in, int ic, int y, int x) const { return data[offset(in, ic, y, x)]; }
};

/// (c_out, c_in / groups, k, k) kernel with optional per-output bias.
template <class T>
struct Kernel4 {
  int out_channels = 0;
  int in_per_group = 0;
  int size = 1;
  int groups = 1;
  std::vector<T> weights;
  std::optional<std::vector<T>> bias;

  Kernel4() = default;
  Kernel4(int out, int in_pg, int k, int g = 1)
      : out_channels(out), in_per_group(in_pg), size(k), groups(g),
        weights(static_cast<std::size_t>(out) * in_pg * k * k, T(0)) {}

  int in_channels() const { return in_per_group * groups; }

  std::size_t offset(int o, int i, int y, int x) const {
    return ((static_cast<std::size_t>(o) * in_per_group + i) * size + y) * size + x;
  }
  T& at(int o, int i, int y, int x) { return weights[offset(o, i, y, x)]; }
  const T& at(int o, int i, int y, int x) const { return weights[offset(o, i, y, x)]; }
};

template <class U, class T>
Kernel4<U> cast_kernel(const Kernel4<T>& k) {
  Kernel4<U> out(k.out_channels, k.in_per_group, k.size, k.groups);
  for (std::size_t n = 0; n < k.weights.size(); ++n) out.weights[n] = static_cast<U>(k.weights[n]);
  if (k.bias) out.bias = std::vector<U>(k.bias->begin(), k.bias->end());
  return out;
}

template <class U, class T>
Tensor4<U> cast_tensor(const Tensor4<T>& x) {
  Tensor4<U> out(x.n, x.c, x.h, x.w);
  for (std::size_t n = 0; n < x.data.size(); ++n) out.data[n] = static_cast<U>(x.data[n]);
  return out;
}

}  // namespace depthcomp
