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

#include "anchorplan/checkpoint.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

namespace anchorplan {

static_assert(std::endian::native == std::endian::little,
              "checkpoint IO assumes a little-endian host");

namespace {

constexpr char kMagic[4] = {'A', 'P', 'C', 'K'};

void PutU32(std::string& out, uint32_t v) {
  char buf[4];
  std::memcpy(buf, &v, 4);
  out.append(buf, 4);
}

void PutString(std::string& out, const std::string& s) {
  PutU32(out, static_cast<uint32_t>(s.size()));
  out.append(s);
}

class Reader {
 public:
  explicit Reader(const std::string& bytes) : bytes_(bytes) {}

  void Take(void* dst, size_t n) {
    if (pos_ + n > bytes_.size()) throw CheckpointError("truncated checkpoint");
    std::memcpy(dst, bytes_.data() + pos_, n);
    pos_ += n;
  }
  uint32_t U32() {
    uint32_t v;
    Take(&v, 4);
    return v;
  }
  std::string String() {
    const uint32_t n = U32();
    if (pos_ + n > bytes_.size()) throw CheckpointError("truncated checkpoint");
    std::string s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  bool AtEnd() const { return pos_ == bytes_.size(); }

 private:
  const std::string& bytes_;
  size_t pos_ = 0;
};

}  // namespace

const Tensor2* Checkpoint::Find(const std::string& name) const {
  for (const auto& [n, t] : tensors) {
    if (n == name) return &t;
  }
  return nullptr;
}

std::string SerializeCheckpoint(const Checkpoint& ckpt) {
  std::string out(kMagic, 4);
  PutU32(out, kCheckpointVersion);
  PutU32(out, static_cast<uint32_t>(ckpt.metadata.size()));
  for (const auto& [k, v] : ckpt.metadata) {
    PutString(out, k);
    PutString(out, v);
  }
  PutU32(out, static_cast<uint32_t>(ckpt.tensors.size()));
  for (const auto& [name, t] : ckpt.tensors) {
    PutString(out, name);
    PutU32(out, static_cast<uint32_t>(t.rows()));
    PutU32(out, static_cast<uint32_t>(t.cols()));
    out.append(reinterpret_cast<const char*>(t.data().data()),
               t.size() * sizeof(double));
  }
  return out;
}

Checkpoint ParseCheckpoint(const std::string& bytes) {
  Reader r(bytes);
  char magic[4];
  r.Take(magic, 4);
  if (std::memcmp(magic, kMagic, 4) != 0) {
    throw CheckpointError("not a checkpoint file (bad magic)");
  }
  const uint32_t version = r.U32();
  if (version != kCheckpointVersion) {
    throw CheckpointError("unsupported checkpoint version " +
                          std::to_string(version));
  }
  Checkpoint ckpt;
  const uint32_t n_meta = r.U32();
  for (uint32_t i = 0; i < n_meta; ++i) {
    std::string k = r.String();
    ckpt.metadata[k] = r.String();
  }
  const uint32_t n_tensors = r.U32();
  for (uint32_t i = 0; i < n_tensors; ++i) {
    std::string name = r.String();
    const uint32_t rows = r.U32();
    const uint32_t cols = r.U32();
    std::vector<double> data(size_t(rows) * cols);
    r.Take(data.data(), data.size() * sizeof(double));
    ckpt.tensors.emplace_back(std::move(name),
                              Tensor2(int(rows), int(cols), std::move(data)));
  }
  if (!r.AtEnd()) throw CheckpointError("trailing bytes in checkpoint");
  return ckpt;
}

void WriteCheckpoint(const std::string& path, const Checkpoint& ckpt) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CheckpointError("cannot open " + path + " for writing");
  const std::string bytes = SerializeCheckpoint(ckpt);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw CheckpointError("write failed: " + path);
}

Checkpoint ReadCheckpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ParseCheckpoint(ss.str());
}

void AddParameters(Checkpoint& ckpt, const ParameterStore& store) {
  for (const Parameter* p : store.All()) {
    ckpt.tensors.emplace_back(p->name, p->value);
  }
}

void LoadParameters(const Checkpoint& ckpt, ParameterStore& store) {
  for (Parameter* p : store.All()) {
    const Tensor2* t = ckpt.Find(p->name);
    if (t == nullptr) throw CheckpointError("checkpoint lacks " + p->name);
    if (!t->SameShape(p->value)) {
      throw CheckpointError("shape mismatch for " + p->name + ": file " +
                            t->ShapeString() + " vs model " +
                            p->value.ShapeString());
    }
    p->value = *t;
  }
}

}  // namespace anchorplan
