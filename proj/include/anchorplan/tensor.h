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

#ifndef ANCHORPLAN_TENSOR_H_
#define ANCHORPLAN_TENSOR_H_

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace anchorplan {

class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// NaN/Inf produced by a kernel op or gradient.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Dense row-major matrix of doubles.
class Tensor2 {
 public:
  Tensor2() = default;
  Tensor2(int rows, int cols, double fill = 0.0);
  Tensor2(int rows, int cols, std::vector<double> data);

  static Tensor2 Identity(int n);
  static Tensor2 Row(std::span<const double> values);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator()(int r, int c) { return data_[r * cols_ + c]; }
  double operator()(int r, int c) const { return data_[r * cols_ + c]; }
  double& operator[](size_t i) { return data_[i]; }
  double operator[](size_t i) const { return data_[i]; }

  std::span<double> row(int r) { return {data_.data() + r * cols_, size_t(cols_)}; }
  std::span<const double> row(int r) const {
    return {data_.data() + r * cols_, size_t(cols_)};
  }
  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  bool SameShape(const Tensor2& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_;
  }
  bool AllFinite() const;
  void Fill(double v);
  // this += other (same shape)
  void AddInPlace(const Tensor2& other);

  std::string ShapeString() const;

  friend bool operator==(const Tensor2&, const Tensor2&) = default;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

}  // namespace anchorplan

#endif  // ANCHORPLAN_TENSOR_H_
