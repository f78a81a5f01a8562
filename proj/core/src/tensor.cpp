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

#include "stagg/tensor.hpp"

#include <functional>
#include <numeric>

#include "stagg/error.hpp"

namespace stagg {

namespace {

std::size_t element_count(const std::vector<std::size_t>& extents) {
  return std::accumulate(extents.begin(), extents.end(), std::size_t{1},
                         std::multiplies<>());
}

}  // namespace

TensorValue::TensorValue(std::vector<std::size_t> extents)
    : extents_(std::move(extents)), data_(element_count(extents_)) {}

TensorValue::TensorValue(std::vector<std::size_t> extents,
                         std::vector<Rational> data)
    : extents_(std::move(extents)), data_(std::move(data)) {
  if (data_.size() != element_count(extents_)) {
    throw Error(ErrorCode::kInconsistentExtent,
                "tensor data length does not match extents");
  }
  for (std::size_t e : extents_) {
    if (e == 0) throw Error(ErrorCode::kInconsistentExtent, "zero extent");
  }
}

TensorValue TensorValue::scalar(Rational value) {
  return TensorValue({}, {std::move(value)});
}

std::size_t TensorValue::offset(const std::vector<std::size_t>& index) const {
  if (index.size() != extents_.size()) {
    throw Error(ErrorCode::kRankMismatch, "index rank differs from tensor rank");
  }
  std::size_t off = 0;
  for (std::size_t d = 0; d < index.size(); ++d) {
    if (index[d] >= extents_[d]) {
      throw Error(ErrorCode::kInconsistentExtent, "index out of range");
    }
    off = off * extents_[d] + index[d];
  }
  return off;
}

const Rational& TensorValue::at(const std::vector<std::size_t>& index) const {
  return data_[offset(index)];
}

Rational& TensorValue::at(const std::vector<std::size_t>& index) {
  return data_[offset(index)];
}

bool TensorValue::operator==(const TensorValue& other) const {
  return extents_ == other.extents_ && data_ == other.data_;
}

std::string TensorValue::to_string() const {
  std::string out;
  std::function<void(std::size_t, std::size_t)> emit = [&](std::size_t dim,
                                                            std::size_t base) {
    if (dim == extents_.size()) {
      out += format_rational(data_[base]);
      return;
    }
    std::size_t stride = 1;
    for (std::size_t d = dim + 1; d < extents_.size(); ++d) stride *= extents_[d];
    out += '[';
    for (std::size_t i = 0; i < extents_[dim]; ++i) {
      if (i) out += ',';
      emit(dim + 1, base + i * stride);
    }
    out += ']';
  };
  emit(0, 0);
  return out;
}

}  // namespace stagg
