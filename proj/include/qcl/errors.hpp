// Copyright 2026 The qcl-landscape Authors.

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/**
 * @file
 * Exception hierarchy shared by every qcl module. The CLI maps each family
 * onto a process exit code (see tools/qcl_landscape.cpp).
 */

#pragma once

#include <stdexcept>
#include <string>

namespace qcl {

class error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Invalid configuration value or unsupported option.
class config_error : public error {
  public:
    using error::error;
};

/// Malformed config or data file. Carries the offending location.
class parse_error : public config_error {
  public:
    using config_error::config_error;
};

class index_error : public error {
  public:
    using error::error;
};

class shape_error : public error {
  public:
    using error::error;
};

/// Argument outside the mathematical domain of an operation.
class domain_error : public error {
  public:
    using error::error;
};

class numerical_error : public error {
  public:
    using error::error;
};

/// Geometric degeneracy, e.g. collinear points handed to a plane basis.
class degeneracy_error : public numerical_error {
  public:
    degeneracy_error(const std::string &what, double residual)
        : numerical_error(what), residual_(residual) {}

    [[nodiscard]] double residual() const noexcept { return residual_; }

  private:
    double residual_;
};

class io_error : public error {
  public:
    using error::error;
};

} // namespace qcl
