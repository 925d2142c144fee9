// Copyright 2026 The collapse-lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace clab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand dimensions disagree, or a dimension exceeds the configured cap.
class DimensionError : public Error {
 public:
  using Error::Error;

  static DimensionError mismatch(const std::string& what, std::size_t expected,
                                 std::size_t actual) {
    return DimensionError(what + ": expected dimension " +
                          std::to_string(expected) + ", got " +
                          std::to_string(actual));
  }
};

/// A state or weight vector fails to be normalized.
class NormalizationError : public Error {
 public:
  using Error::Error;
};

/// Input violates a structural requirement (hermiticity, positivity,
/// orthogonality, projection, unitarity).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// The pointer means coincide, so the coherence bound is undefined.
class DegeneratePointerError : public Error {
 public:
  using Error::Error;
};

/// A commutator ratio was requested for a zero-norm operand.
class UndefinedDeltaError : public Error {
 public:
  using Error::Error;
};

/// Projections that do not commute have no joint distribution.
class NonCommutingError : public Error {
 public:
  using Error::Error;
};

/// One or more hypotheses of a checked statement fail; each is listed.
class HypothesisError : public Error {
 public:
  explicit HypothesisError(std::vector<std::string> violations)
      : Error(join(violations)), violations_(std::move(violations)) {}

  const std::vector<std::string>& violations() const { return violations_; }

 private:
  static std::string join(const std::vector<std::string>& v) {
    std::string out = "hypotheses violated:";
    for (const auto& s : v) out += " [" + s + "]";
    return out;
  }

  std::vector<std::string> violations_;
};

}  // namespace clab
