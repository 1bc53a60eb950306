// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace locbeam {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

class DegenerateGeometry : public Error {
 public:
  using Error::Error;
};

class LocalizabilityError : public Error {
 public:
  using Error::Error;
};

class InvalidCalibration : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

class DegenerateInput : public Error {
 public:
  using Error::Error;
};

class OracleDegenerate : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

class RankReductionFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace locbeam
