// Copyright 2026 The qdrop Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

#include <stdexcept>
#include <string>

namespace qdrop {

/// Raised for every contract violation in the library (bad indices,
/// mismatched dimensions, invalid configuration).
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

[[noreturn]] inline void abort_with(const std::string &message) {
    throw Error(message);
}

} // namespace qdrop

#define QDROP_ABORT_IF(cond, message)                                          \
    do {                                                                       \
        if (cond) {                                                            \
            ::qdrop::abort_with(message);                                      \
        }                                                                      \
    } while (false)

#define QDROP_ABORT_IF_NOT(cond, message) QDROP_ABORT_IF(!(cond), message)
