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

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "stagg/rational.hpp"

namespace stagg {

// Dense row-major tensor of exact rationals. Rank 0 holds one element.
class TensorValue {
 public:
  TensorValue() : data_(1) {}
  explicit TensorValue(std::vector<std::size_t> extents);
  TensorValue(std::vector<std::size_t> extents, std::vector<Rational> data);

  static TensorValue scalar(Rational value);

  std::size_t rank() const { return extents_.size(); }
  const std::vector<std::size_t>& extents() const { return extents_; }
  const std::vector<Rational>& data() const { return data_; }
  std::vector<Rational>& data() { return data_; }
  std::size_t size() const { return data_.size(); }

  const Rational& at(const std::vector<std::size_t>& index) const;
  Rational& at(const std::vector<std::size_t>& index);

  bool operator==(const TensorValue& other) const;

  // Nested-list text: "[[1,2],[3,4]]", scalars as "5".
  std::string to_string() const;

 private:
  std::size_t offset(const std::vector<std::size_t>& index) const;

  std::vector<std::size_t> extents_;
  std::vector<Rational> data_;
};

using Bindings = std::map<std::string, TensorValue>;

}  // namespace stagg
