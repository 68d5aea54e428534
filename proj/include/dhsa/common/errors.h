/*
 * Copyright 2026 The DHSA Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef DHSA_COMMON_ERRORS_H_
#define DHSA_COMMON_ERRORS_H_

#include <stdexcept>
#include <string>

namespace dhsa {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller supplied arguments that violate a documented precondition.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// A party received a message it cannot accept in its current phase, or a
// message that fails to parse.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

// The session cannot continue (failed key validation, missing party, overflow).
class SessionAbort : public Error {
 public:
  SessionAbort(std::string phase, const std::string& what)
      : Error(phase + ": " + what), phase_(std::move(phase)) {}

  const std::string& phase() const { return phase_; }

 private:
  std::string phase_;
};

}  // namespace dhsa

#endif  // DHSA_COMMON_ERRORS_H_
