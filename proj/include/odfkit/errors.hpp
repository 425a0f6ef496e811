/*
Copyright 2026 The odfkit Authors.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS-IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

#ifndef ODFKIT_ERRORS_HPP
#define ODFKIT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace odf {

// Base class for everything thrown by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad arguments, bad configuration, malformed input files.
// The CLI maps these to exit code 2.
class InvalidArgumentError : public Error {
 public:
  using Error::Error;
};

// A mathematically well-formed request whose answer does not exist
// (angular error on grid estimates, correlation of a constant series, ...).
// The CLI maps these to exit code 3.
class DomainError : public Error {
 public:
  using Error::Error;
};

class InvalidDirectionError : public InvalidArgumentError {
 public:
  using InvalidArgumentError::InvalidArgumentError;
};

class EmptyGridError : public InvalidArgumentError {
 public:
  using InvalidArgumentError::InvalidArgumentError;
};

class GridMismatchError : public DomainError {
 public:
  using DomainError::DomainError;
};

class UndefinedAngularErrorError : public DomainError {
 public:
  using DomainError::DomainError;
};

class UndefinedCorrelationError : public DomainError {
 public:
  using DomainError::DomainError;
};

// Fit produced no support (e.g. NNLS on an all-zero signal) where a
// nonempty fODF was required downstream.
class EmptyFitError : public DomainError {
 public:
  using DomainError::DomainError;
};

}  // namespace odf

#endif  // ODFKIT_ERRORS_HPP
