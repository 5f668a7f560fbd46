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


#include "depthcomp/error.hpp"

namespace depthcomp {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::ChannelMismatch: return "ChannelMismatch";
    case Errc::CrossingSkips: return "CrossingSkips";
    case Errc::NonOddKernel: return "NonOddKernel";
    case Errc::SkipShapeMismatch: return "SkipShapeMismatch";
    case Errc::InvalidLayer: return "InvalidLayer";
    case Errc::NonPositiveSpatialDim: return "NonPositiveSpatialDim";
    case Errc::ParseError: return "ParseError";
    case Errc::IndexOutOfRange: return "IndexOutOfRange";
    case Errc::MaskViolation: return "MaskViolation";
    case Errc::NonFiniteValue: return "NonFiniteValue";
    case Errc::EmptyReferenceSet: return "EmptyReferenceSet";
    case Errc::Overflow: return "Overflow";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::NoFeasiblePartition: return "NoFeasiblePartition";
    case Errc::InfeasibleBudget: return "InfeasibleBudget";
    case Errc::InstanceTooLarge: return "InstanceTooLarge";
    case Errc::ShapeMismatch: return "ShapeMismatch";
    case Errc::NotFusable: return "NotFusable";
    case Errc::InfeasibleSegment: return "InfeasibleSegment";
    case Errc::ActivationInside: return "ActivationInside";
    case Errc::InvalidPlan: return "InvalidPlan";
    case Errc::Io: return "Io";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& detail)
    : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

}  // namespace depthcomp
