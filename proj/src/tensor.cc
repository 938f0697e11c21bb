// Copyright 2026 The anchorplan Authors
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

#include "anchorplan/tensor.h"

#include <algorithm>
#include <cmath>

namespace anchorplan {

Tensor2::Tensor2(int rows, int cols, double fill)
    : rows_(rows), cols_(cols), data_(size_t(rows) * size_t(cols), fill) {
  if (rows < 0 || cols < 0) throw ShapeError("negative tensor dimension");
}

Tensor2::Tensor2(int rows, int cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != size_t(rows) * size_t(cols)) {
    throw ShapeError("tensor data length " + std::to_string(data_.size()) +
                     " != " + std::to_string(rows) + "x" +
                     std::to_string(cols));
  }
}

Tensor2 Tensor2::Identity(int n) {
  Tensor2 t(n, n);
  for (int i = 0; i < n; ++i) t(i, i) = 1.0;
  return t;
}

Tensor2 Tensor2::Row(std::span<const double> values) {
  return Tensor2(1, static_cast<int>(values.size()),
                 std::vector<double>(values.begin(), values.end()));
}

bool Tensor2::AllFinite() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](double v) { return std::isfinite(v); });
}

void Tensor2::Fill(double v) { std::fill(data_.begin(), data_.end(), v); }

void Tensor2::AddInPlace(const Tensor2& other) {
  if (!SameShape(other)) {
    throw ShapeError("add: " + ShapeString() + " vs " + other.ShapeString());
  }
  for (size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
}

std::string Tensor2::ShapeString() const {
  return "(" + std::to_string(rows_) + "x" + std::to_string(cols_) + ")";
}

}  // namespace anchorplan
