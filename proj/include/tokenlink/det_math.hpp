// Copyright 2026 The tokenlink Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <span>

namespace tokenlink::detmath {

/// exp(x) built only from IEEE-754 basic operations, floor and ldexp, so the
/// result is bit-identical on every conforming platform (unlike libm exp).
/// Relative error is a few ulp on the range used by softmax (x <= 0).
double exp(double x);

/// Numerically stable softmax in place: subtracts the maximum, exponentiates
/// with detmath::exp, sums in ascending index order, divides.
void softmax(std::span<double> values);

}  // namespace tokenlink::detmath
