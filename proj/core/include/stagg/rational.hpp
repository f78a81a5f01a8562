// Copyright 2026 The Stagg Authors. All Rights Reserved.
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

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace stagg {

// All tensor arithmetic is exact.
using Rational = mpq_class;

// Accepts integers, "p/q" fractions and plain decimals such as "0.25".
Rational parse_rational(std::string_view text);

// "3", "-3/4": canonical form, no whitespace.
std::string format_rational(const Rational& value);

}  // namespace stagg
