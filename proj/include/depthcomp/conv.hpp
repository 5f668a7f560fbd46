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

#include <span>
#include <vector>

#include "depthcomp/net_model.hpp"
#include "depthcomp/tensor.hpp"

namespace depthcomp {

struct BatchNormParams {
  std::vector<double> gamma;
  std::vector<double> beta;
  std::vector<double> mean;
  std::vector<double> var;
  double eps = 1e-5;
};

/// Naive cross-correlation with symmetric zero padding, single thread.
/// Accumulation is carried out in double for both element types.
template <class T>
Tensor4<T> forward_conv_reference(const Tensor4<T>& x, const Kernel4<T>& k, int stride, int padding);

/// Same loop nest as the reference, parallel over (batch, out channel).
/// Results are bitwise identical to forward_conv_reference.
template <class T>
Tensor4<T> forward_conv(const Tensor4<T>& x, const Kernel4<T>& k, int stride, int padding);

/// y = gamma * (y - mean) / sqrt(var + eps) + beta, per channel.
template <class T>
void apply_batch_norm(Tensor4<T>& y, const BatchNormParams& bn);

void validate_batch_norm(const BatchNormParams& bn, int channels);

Kernel4<double> expand_depthwise(const Kernel4<double>& k);
Kernel4<double> fold_bn(const Kernel4<double>& k, const BatchNormParams& bn);

/// theta_2 (*) theta_1 for dense kernels: one kernel of size K1 + (K2 - 1) s1
/// equal to running k1 with stride s1, then k2 with zero padding.
Kernel4<double> compose_kernels(const Kernel4<double>& k2, const Kernel4<double>& k1, int s1);

/// Adds the identity at the kernel center. Needs a dense square kernel with
/// equal channel counts and stride 1.
Kernel4<double> fuse_skip(const Kernel4<double>& k, int stride);

/// Padding moved to the first layer: P = sum p_l * prod_{m<l} s_m.
std::vector<int> reorder_padding(std::span<const ConvLayer> segment);

}  // namespace depthcomp
