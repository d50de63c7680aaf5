// Copyright 2026 The aoplab Authors
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

#ifndef AOP_ERRORS_H_
#define AOP_ERRORS_H_

#include <stdexcept>
#include <string>

namespace aop {

enum class ErrorCode {
  kInvalidArgument = 1,
  kDimensionMismatch = 2,
  kNonFinite = 3,
  kOutOfRange = 4,
  kIo = 5,
  kTooLarge = 6,
  kParse = 7,
};

// All library failures surface as aop::Error; the C API maps code() onto
// its status enum.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void ThrowDimensionMismatch(const char* where, long expected,
                                         long actual);

}  // namespace aop

#endif  // AOP_ERRORS_H_
