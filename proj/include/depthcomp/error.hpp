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

#include <stdexcept>
#include <string>
#include <string_view>

namespace depthcomp {

enum class Errc {
  ChannelMismatch,
  CrossingSkips,
  NonOddKernel,
  SkipShapeMismatch,
  InvalidLayer,
  NonPositiveSpatialDim,
  ParseError,
  IndexOutOfRange,
  MaskViolation,
  NonFiniteValue,
  EmptyReferenceSet,
  Overflow,
  InvalidArgument,
  NoFeasiblePartition,
  InfeasibleBudget,
  InstanceTooLarge,
  ShapeMismatch,
  NotFusable,
  InfeasibleSegment,
  ActivationInside,
  InvalidPlan,
  Io,
};

std::string_view to_string(Errc code);

/// All library failures surface as this exception; `code()` identifies the
/// failure class and `what()` carries the offending index or pair.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& detail);

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace depthcomp
