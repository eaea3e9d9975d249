// Copyright 2026 The qtpe Authors
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

#ifndef QTPE_ERROR_HPP
#define QTPE_ERROR_HPP

#include <stdexcept>
#include <string>

namespace qtpe {

/// Argument outside the mathematical domain of an operation.
struct DomainError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// A hypothesis an operation relies on does not hold (e.g. d <= t^2).
struct PreconditionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Requested object would exceed a hard-coded enumeration or memory guard.
struct SizeLimitError : std::length_error {
    using std::length_error::length_error;
};

/// Malformed ensemble file. `field()` names the offending field.
class ParseError : public std::runtime_error {
   public:
    ParseError(std::string field, const std::string &what)
        : std::runtime_error("parse error in field '" + field + "': " + what), field_(std::move(field)) {}
    const std::string &field() const noexcept { return field_; }

   private:
    std::string field_;
};

/// Structurally well-formed data that fails a semantic check.
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace qtpe

#endif
