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


#include "depthcomp/conv.hpp"

#include <cmath>
#include <string>

#include "depthcomp/error.hpp"

namespace depthcomp {

namespace {

template <class T>
void check_conv_args(const Tensor4<T>& x, const Kernel4<T>& k, int stride, int padding) {
  if (x.c != k.in_channels()) {
    throw Error(Errc::ShapeMismatch, "input has " + std::to_string(x.c) + " channels, kernel expects " +
                                         std::to_string(k.in_channels()));
  }
  if (k.groups < 1 || k.out_channels % k.groups != 0) throw Error(Errc::ShapeMismatch, "bad kernel grouping");
  if (stride < 1 || padding < 0) throw Error(Errc::InvalidArgument, "bad stride or padding");
  if (k.bias && static_cast<int>(k.bias->size()) != k.out_channels) {
    throw Error(Errc::ShapeMismatch, "bias length differs from out channels");
  }
}

// One output plane (in, o), used by both entry points.
template <class T>
void conv_plane(const Tensor4<T>& x, const Kernel4<T>& k, int stride, int padding, Tensor4<T>& y, int in, int o) {
  const int out_per_group = k.out_channels / k.groups;
  const int g = o / out_per_group;
  const int K = k.size;
  const double b = k.bias ? static_cast<double>((*k.bias)[static_cast<std::size_t>(o)]) : 0.0;
  for (int oy = 0; oy < y.h; ++oy) {
    for (int ox = 0; ox < y.w; ++ox) {
      double acc = b;
      for (int i = 0; i < k.in_per_group; ++i) {
        const int ic = g * k.in_per_group + i;
        for (int ky = 0; ky < K; ++ky) {
          const int iy = oy * stride + ky - padding;
          if (iy < 0 || iy >= x.h) continue;
          for (int kx = 0; kx < K; ++kx) {
            const int ix = ox * stride + kx - padding;
            if (ix < 0 || ix >= x.w) continue;
            acc += static_cast<double>(k.at(o, i, ky, kx)) * static_cast<double>(x.at(in, ic, iy, ix));
          }
        }
      }
      y.at(in, o, oy, ox) = static_cast<T>(acc);
    }
  }
}

template <class T>
Tensor4<T> make_output(const Tensor4<T>& x, const Kernel4<T>& k, int stride, int padding) {
  const int h = conv_output_size(x.h, k.size, stride, padding);
  const int w = conv_output_size(x.w, k.size, stride, padding);
  if (h <= 0 || w <= 0) throw Error(Errc::NonPositiveSpatialDim, "kernel larger than padded input");
  return Tensor4<T>(x.n, k.out_channels, h, w);
}

}  // namespace

template <class T>
Tensor4<T> forward_conv_reference(const Tensor4<T>& x, const Kernel4<T>& k, int stride, int padding) {
  check_conv_args(x, k, stride, padding);
  Tensor4<T> y = make_output(x, k, stride, padding);
  for (int in = 0; in < x.n; ++in) {
    for (int o = 0; o < k.out_channels; ++o) conv_plane(x, k, stride, padding, y, in, o);
  }
  return y;
}

template <class T>
Tensor4<T> forward_conv(const Tensor4<T>& x, const Kernel4<T>& k, int stride, int padding) {
  check_conv_args(x, k, stride, padding);
  Tensor4<T> y = make_output(x, k, stride, padding);
  const int planes = x.n * k.out_channels;
#pragma omp parallel for schedule(static)
  for (int p = 0; p < planes; ++p) conv_plane(x, k, stride, padding, y, p / k.out_channels, p % k.out_channels);
  return y;
}

template <class T>
void apply_batch_norm(Tensor4<T>& y, const BatchNormParams& bn) {
  validate_batch_norm(bn, y.c);
  for (int in = 0; in < y.n; ++in) {
    for (int c = 0; c < y.c; ++c) {
      const auto ch = static_cast<std::size_t>(c);
      const double inv = 1.0 / std::sqrt(bn.var[ch] + bn.eps);
      for (int yy = 0; yy < y.h; ++yy) {
        for (int xx = 0; xx < y.w; ++xx) {
          T& v = y.at(in, c, yy, xx);
          v = static_cast<T>(bn.gamma[ch] * ((static_cast<double>(v) - bn.mean[ch]) * inv) + bn.beta[ch]);
        }
      }
    }
  }
}

void validate_batch_norm(const BatchNormParams& bn, int channels) {
  const auto n = static_cast<std::size_t>(channels);
  if (bn.gamma.size() != n || bn.beta.size() != n || bn.mean.size() != n || bn.var.size() != n) {
    throw Error(Errc::ShapeMismatch, "BN vectors must have " + std::to_string(channels) + " entries");
  }
  if (!(bn.eps > 0.0)) throw Error(Errc::InvalidArgument, "BN eps must be positive");
  for (double v : bn.var) {
    if (!(v >= 0.0)) throw Error(Errc::InvalidArgument, "BN running_var must be >= 0");
  }
}

Kernel4<double> expand_depthwise(const Kernel4<double>& k) {
  if (k.groups == 1) return k;
  const int out_per_group = k.out_channels / k.groups;
  Kernel4<double> dense(k.out_channels, k.in_channels(), k.size, 1);
  for (int o = 0; o < k.out_channels; ++o) {
    const int g = o / out_per_group;
    for (int i = 0; i < k.in_per_group; ++i) {
      for (int y = 0; y < k.size; ++y) {
        for (int x = 0; x < k.size; ++x) dense.at(o, g * k.in_per_group + i, y, x) = k.at(o, i, y, x);
      }
    }
  }
  dense.bias = k.bias;
  return dense;
}

Kernel4<double> fold_bn(const Kernel4<double>& k, const BatchNormParams& bn) {
  validate_batch_norm(bn, k.out_channels);
  Kernel4<double> out = k;
  std::vector<double> bias(static_cast<std::size_t>(k.out_channels));
  const std::size_t per_out = static_cast<std::size_t>(k.in_per_group) * k.size * k.size;
  for (int o = 0; o < k.out_channels; ++o) {
    const auto ch = static_cast<std::size_t>(o);
    const double scale = bn.gamma[ch] / std::sqrt(bn.var[ch] + bn.eps);
    for (std::size_t n = 0; n < per_out; ++n) out.weights[ch * per_out + n] *= scale;
    const double b = k.bias ? (*k.bias)[ch] : 0.0;
    bias[ch] = bn.beta[ch] + scale * (b - bn.mean[ch]);
  }
  out.bias = std::move(bias);
  return out;
}

Kernel4<double> compose_kernels(const Kernel4<double>& k2, const Kernel4<double>& k1, int s1) {
  if (k1.groups != 1 || k2.groups != 1) throw Error(Errc::InvalidArgument, "compose_kernels needs dense kernels");
  if (k2.in_channels() != k1.out_channels) {
    throw Error(Errc::ChannelMismatch, std::to_string(k1.out_channels) + " -> " + std::to_string(k2.in_channels()));
  }
  if (s1 < 1) throw Error(Errc::InvalidArgument, "stride must be >= 1");
  const int K = k1.size + (k2.size - 1) * s1;
  const int C = k1.out_channels;
  Kernel4<double> m(k2.out_channels, k1.in_channels(), K, 1);
  for (int o = 0; o < k2.out_channels; ++o) {
    for (int c = 0; c < C; ++c) {
      for (int a = 0; a < k2.size; ++a) {
        for (int b = 0; b < k2.size; ++b) {
          const double w2 = k2.at(o, c, a, b);
          if (w2 == 0.0) continue;
          for (int i = 0; i < k1.in_channels(); ++i) {
            for (int p = 0; p < k1.size; ++p) {
              for (int q = 0; q < k1.size; ++q) m.at(o, i, s1 * a + p, s1 * b + q) += w2 * k1.at(c, i, p, q);
            }
          }
        }
      }
    }
  }
  if (k1.bias || k2.bias) {
    std::vector<double> bias(static_cast<std::size_t>(k2.out_channels), 0.0);
    for (int o = 0; o < k2.out_channels; ++o) {
      double v = k2.bias ? (*k2.bias)[static_cast<std::size_t>(o)] : 0.0;
      if (k1.bias) {
        for (int c = 0; c < C; ++c) {
          double mass = 0.0;
          for (int a = 0; a < k2.size; ++a) {
            for (int b = 0; b < k2.size; ++b) mass += k2.at(o, c, a, b);
          }
          v += (*k1.bias)[static_cast<std::size_t>(c)] * mass;
        }
      }
      bias[static_cast<std::size_t>(o)] = v;
    }
    m.bias = std::move(bias);
  }
  return m;
}

Kernel4<double> fuse_skip(const Kernel4<double>& k, int stride) {
  if (k.groups != 1) throw Error(Errc::NotFusable, "kernel is grouped");
  if (k.out_channels != k.in_channels()) {
    throw Error(Errc::NotFusable, std::to_string(k.in_channels()) + " -> " + std::to_string(k.out_channels) +
                                      " channels");
  }
  if (stride != 1) throw Error(Errc::NotFusable, "stride " + std::to_string(stride));
  if (k.size % 2 == 0) throw Error(Errc::NotFusable, "even kernel has no center");
  Kernel4<double> out = k;
  const int center = k.size / 2;
  for (int c = 0; c < k.out_channels; ++c) out.at(c, c, center, center) += 1.0;
  return out;
}

std::vector<int> reorder_padding(std::span<const ConvLayer> segment) {
  std::vector<int> out(segment.size(), 0);
  if (segment.empty()) return out;
  int total = 0;
  int stride = 1;
  for (const ConvLayer& layer : segment) {
    total += layer.padding * stride;
    stride *= layer.stride;
  }
  out[0] = total;
  return out;
}

template Tensor4<float> forward_conv_reference(const Tensor4<float>&, const Kernel4<float>&, int, int);
template Tensor4<double> forward_conv_reference(const Tensor4<double>&, const Kernel4<double>&, int, int);
template Tensor4<float> forward_conv(const Tensor4<float>&, const Kernel4<float>&, int, int);
template Tensor4<double> forward_conv(const Tensor4<double>&, const Kernel4<double>&, int, int);
template void apply_batch_norm(Tensor4<float>&, const BatchNormParams&);
template void apply_batch_norm(Tensor4<double>&, const BatchNormParams&);

}  // namespace depthcomp
