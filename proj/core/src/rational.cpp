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

#include "stagg/rational.hpp"

#include <cctype>

#include "stagg/error.hpp"

namespace stagg {

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  std::string_view body = text;
  bool negative = false;
  if (!body.empty() && (body.front() == '-' || body.front() == '+')) {
    negative = body.front() == '-';
    body.remove_prefix(1);
  }
  Rational value;
  if (auto slash = body.find('/'); slash != std::string_view::npos) {
    auto num = body.substr(0, slash);
    auto den = body.substr(slash + 1);
    if (!all_digits(num) || !all_digits(den)) {
      throw Error(ErrorCode::kMalformedDescriptor,
                  "bad rational '" + std::string(text) + "'");
    }
    mpz_class d{std::string(den)};
    if (d == 0) {
      throw Error(ErrorCode::kMalformedDescriptor,
                  "zero denominator in '" + std::string(text) + "'");
    }
    value = Rational(mpz_class(std::string(num)), d);
  } else if (auto dot = body.find('.'); dot != std::string_view::npos) {
    auto whole = body.substr(0, dot);
    auto frac = body.substr(dot + 1);
    if ((!whole.empty() && !all_digits(whole)) ||
        (!frac.empty() && !all_digits(frac)) || (whole.empty() && frac.empty())) {
      throw Error(ErrorCode::kMalformedDescriptor,
                  "bad decimal '" + std::string(text) + "'");
    }
    mpz_class scale = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
    mpz_class digits(std::string(whole.empty() ? "0" : whole) +
                     std::string(frac));
    value = Rational(digits, scale);
  } else {
    if (!all_digits(body)) {
      throw Error(ErrorCode::kMalformedDescriptor,
                  "bad integer '" + std::string(text) + "'");
    }
    value = Rational(mpz_class(std::string(body)));
  }
  value.canonicalize();
  return negative ? Rational(-value) : value;
}

std::string format_rational(const Rational& value) {
  Rational v = value;
  v.canonicalize();
  return v.get_str();
}

}  // namespace stagg
