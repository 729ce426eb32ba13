// Copyright 2026 The Loom Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace loom {

// Caller violated an operation contract (level mismatch, scale mismatch,
// size-3 ciphertext where size-2 is required, ...).
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A cryptographic or learning parameter is unusable (modulus without the
// required root of unity, mask bound violated, scale too small, ...).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A key required by the operation is missing (rotation step without key,
// relinearization without evaluation key).
class KeyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The ciphertext has no level budget left for the requested operation.
class MustBootstrapError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Encoded values overflow the current modulus, or a precision contract
// cannot be met.
class PrecisionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A multiparty protocol cannot complete (missing share, unreachable party).
class ProtocolAbort : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input data (ragged CSV rows, non-numeric cells, missing label).
class IngestionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw UsageError(msg);
}

}  // namespace loom
