// Copyright 2026 The nibp-lab Authors
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

#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace nibp {

// Dense algebra types. Everything in the library is double precision; the
// template aliases exist so kernels can be written against any scalar.

template <typename Scalar>
using ComplexMatrix =
    Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using ComplexVector = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>;
template <typename Scalar>
using RealMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using RealVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Complex = std::complex<double>;
using CMatrix = ComplexMatrix<double>;
using CVector = ComplexVector<double>;
using RMatrix = RealMatrix<double>;
using RVector = RealVector<double>;

inline constexpr int kMaxQubits = 9;

inline constexpr std::size_t dimension(int num_qubits) {
  return std::size_t{1} << num_qubits;
}

// Error hierarchy. All library failures derive from nibp::Error.

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Qubit count or problem size outside the supported range.
class SizeError : public Error {
 public:
  using Error::Error;
};

/// Operands disagree on qubit count or matrix dimension.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A matrix that should be a density operator is not one.
class InvalidStateError : public Error {
 public:
  InvalidStateError(const std::string& what, double min_eigenvalue)
      : Error(what), min_eigenvalue_(min_eigenvalue) {}
  double min_eigenvalue() const { return min_eigenvalue_; }

 private:
  double min_eigenvalue_;
};

/// Kraus set that is empty, ragged or not trace preserving.
class InvalidChannelError : public Error {
 public:
  using Error::Error;
};

/// Arguments violate an operation's stated precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Non-finite numbers where finite ones are required.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Malformed configuration or serialized input.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace nibp
