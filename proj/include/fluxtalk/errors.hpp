// Copyright 2026 The fluxtalk developers
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

#include <stdexcept>
#include <string>

namespace fluxtalk {

/// Base class for all fluxtalk errors. Messages are prefixed with the
/// module-qualified error name, e.g. "device-model:DispersiveViolation: ...".
class Error : public std::runtime_error {
 public:
  Error(const std::string& name, const std::string& what)
      : std::runtime_error(name + ": " + what) {}
};

// Configuration / input validation (CLI exit code 2).
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what)
      : Error("config:ValidationError", what) {}
};

class DispersiveViolation : public Error {
 public:
  explicit DispersiveViolation(const std::string& what)
      : Error("device-model:DispersiveViolation", what) {}
};

class FrequencyOutOfRange : public Error {
 public:
  explicit FrequencyOutOfRange(const std::string& what)
      : Error("device-model:FrequencyOutOfRange", what) {}
};

class NoInteriorMinimum : public Error {
 public:
  explicit NoInteriorMinimum(const std::string& what)
      : Error("flux-dynamics:NoInteriorMinimum", what) {}
};

// Fit pipeline failures (CLI exit code 3).
class FitFailure : public Error {
 public:
  explicit FitFailure(const std::string& what)
      : Error("estimators:FitFailure", what) {}
 protected:
  FitFailure(const std::string& name, const std::string& what)
      : Error(name, what) {}
};

class DegenerateTraces : public FitFailure {
 public:
  explicit DegenerateTraces(const std::string& what)
      : FitFailure("estimators:DegenerateTraces", what) {}
};

class ZeroDenominator : public FitFailure {
 public:
  explicit ZeroDenominator(const std::string& what)
      : FitFailure("estimators:ZeroDenominator", what) {}
};

class InsufficientSpan : public FitFailure {
 public:
  explicit InsufficientSpan(const std::string& what)
      : FitFailure("estimators:InsufficientSpan", what) {}
};

class AmbiguousPhase : public FitFailure {
 public:
  explicit AmbiguousPhase(const std::string& what)
      : FitFailure("estimators:AmbiguousPhase", what) {}
};

class PairMismatch : public Error {
 public:
  explicit PairMismatch(const std::string& what)
      : Error("estimators:PairMismatch", what) {}
};

class ReconstructionIllConditioned : public Error {
 public:
  explicit ReconstructionIllConditioned(const std::string& what)
      : Error("gate-fidelity:ReconstructionIllConditioned", what) {}
};

}  // namespace fluxtalk
