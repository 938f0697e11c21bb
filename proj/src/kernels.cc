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

#include "anchorplan/kernels.h"

#include <omp.h>

namespace anchorplan::kernels {

namespace {

constexpr long kParallelThreshold = 1L << 16;

void CheckMatmul(const Tensor2& a, const Tensor2& b) {
  if (a.cols() != b.rows()) {
    throw ShapeError("matmul " + a.ShapeString() + " * " + b.ShapeString());
  }
}

inline void MatmulRow(const Tensor2& a, const Tensor2& b, Tensor2& c, int i) {
  const int inner = a.cols();
  const int n = b.cols();
  double* out = c.data().data() + size_t(i) * n;
  const double* arow = a.data().data() + size_t(i) * inner;
  const double* bdata = b.data().data();
  for (int k = 0; k < inner; ++k) {
    const double aik = arow[k];
    if (aik == 0.0) continue;
    const double* brow = bdata + size_t(k) * n;
    for (int j = 0; j < n; ++j) out[j] += aik * brow[j];
  }
}

}  // namespace

Tensor2 MatmulSerial(const Tensor2& a, const Tensor2& b) {
  CheckMatmul(a, b);
  Tensor2 c(a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i) MatmulRow(a, b, c, i);
  return c;
}

Tensor2 MatmulParallel(const Tensor2& a, const Tensor2& b) {
  CheckMatmul(a, b);
  Tensor2 c(a.rows(), b.cols());
#pragma omp parallel for schedule(static)
  for (int i = 0; i < a.rows(); ++i) MatmulRow(a, b, c, i);
  return c;
}

Tensor2 Matmul(const Tensor2& a, const Tensor2& b) {
  const long work = long(a.rows()) * a.cols() * b.cols();
  if (work >= kParallelThreshold && !omp_in_parallel() && a.rows() > 1) {
    return MatmulParallel(a, b);
  }
  return MatmulSerial(a, b);
}

Tensor2 MatmulTransA(const Tensor2& a, const Tensor2& b) {
  if (a.rows() != b.rows()) {
    throw ShapeError("matmul_ta " + a.ShapeString() + " * " + b.ShapeString());
  }
  const int m = a.cols();
  const int n = b.cols();
  Tensor2 c(m, n);
  double* out = c.data().data();
  for (int k = 0; k < a.rows(); ++k) {
    const double* arow = a.data().data() + size_t(k) * m;
    const double* brow = b.data().data() + size_t(k) * n;
    for (int i = 0; i < m; ++i) {
      const double aki = arow[i];
      if (aki == 0.0) continue;
      double* crow = out + size_t(i) * n;
      for (int j = 0; j < n; ++j) crow[j] += aki * brow[j];
    }
  }
  return c;
}

Tensor2 MatmulTransB(const Tensor2& a, const Tensor2& b) {
  if (a.cols() != b.cols()) {
    throw ShapeError("matmul_tb " + a.ShapeString() + " * " + b.ShapeString());
  }
  const int m = a.rows();
  const int n = b.rows();
  const int inner = a.cols();
  Tensor2 c(m, n);
  for (int i = 0; i < m; ++i) {
    const double* arow = a.data().data() + size_t(i) * inner;
    for (int j = 0; j < n; ++j) {
      const double* brow = b.data().data() + size_t(j) * inner;
      double acc = 0.0;
      for (int k = 0; k < inner; ++k) acc += arow[k] * brow[k];
      c(i, j) = acc;
    }
  }
  return c;
}

}  // namespace anchorplan::kernels
