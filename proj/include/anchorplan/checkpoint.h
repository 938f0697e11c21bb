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

#ifndef ANCHORPLAN_CHECKPOINT_H_
#define ANCHORPLAN_CHECKPOINT_H_

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "anchorplan/layers.h"

namespace anchorplan {

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Binary layout, little-endian:
//   "APCK" u32:version
//   u32:n_meta    { u32:len key  u32:len value }*
//   u32:n_tensors { u32:len name  u32:rows  u32:cols  f64[rows*cols] }*
inline constexpr uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  std::map<std::string, std::string> metadata;
  std::vector<std::pair<std::string, Tensor2>> tensors;

  const Tensor2* Find(const std::string& name) const;
};

void WriteCheckpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint ReadCheckpoint(const std::string& path);

std::string SerializeCheckpoint(const Checkpoint& ckpt);
Checkpoint ParseCheckpoint(const std::string& bytes);

// Appends every parameter of `store` (names as stored).
void AddParameters(Checkpoint& ckpt, const ParameterStore& store);

// Copies tensors into same-named parameters. Throws CheckpointError on a
// missing name or shape mismatch.
void LoadParameters(const Checkpoint& ckpt, ParameterStore& store);

}  // namespace anchorplan

#endif  // ANCHORPLAN_CHECKPOINT_H_
