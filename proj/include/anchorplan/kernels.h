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

#ifndef ANCHORPLAN_KERNELS_H_
#define ANCHORPLAN_KERNELS_H_

#include "anchorplan/tensor.h"

// Dense kernels. Every *Parallel variant splits output rows across OpenMP
// threads and accumulates each output element in the same order as its
// *Serial reference, so the two are bit-identical.
namespace anchorplan::kernels {

// C = A * B
Tensor2 MatmulSerial(const Tensor2& a, const Tensor2& b);
Tensor2 MatmulParallel(const Tensor2& a, const Tensor2& b);

// Parallel above a work threshold unless already inside a parallel region.
Tensor2 Matmul(const Tensor2& a, const Tensor2& b);

// C = A^T * B
Tensor2 MatmulTransA(const Tensor2& a, const Tensor2& b);
// C = A * B^T
Tensor2 MatmulTransB(const Tensor2& a, const Tensor2& b);

}  // namespace anchorplan::kernels

#endif  // ANCHORPLAN_KERNELS_H_
