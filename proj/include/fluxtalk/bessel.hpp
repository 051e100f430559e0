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

namespace fluxtalk {

// Bessel functions of the first kind, kept in-repo as a correctness anchor
// for the modulation math. Power series on the inner interval, Hankel
// asymptotic expansion beyond; absolute accuracy better than 1e-10 on the
// real line (validated against high-precision references in the tests).

double bessel_j0(double x);
double bessel_j1(double x);

}  // namespace fluxtalk
