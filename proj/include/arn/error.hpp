// arn/error.hpp

// Copyright 2026  ARN contributors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace arn {

/// Root of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand extents do not agree (matmul inner dims, elementwise shapes, lengths).
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// An argument is outside its legal range (frame sizes, dropout rate, epoch).
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// backward() on a tensor that is not a scalar.
class RankError : public Error {
 public:
  using Error::Error;
};

/// Softmax row with no finite entry.
class DegenerateRowError : public Error {
 public:
  using Error::Error;
};

/// A signal with zero energy where a nonzero one is required.
class DegenerateSignalError : public Error {
 public:
  using Error::Error;
};

/// Optimizer step on a parameter whose gradient was never populated.
class UninitializedGradientError : public Error {
 public:
  using Error::Error;
};

/// Inconsistent model or training configuration, empty corpora or sets.
class ConfigurationError : public Error {
 public:
  using Error::Error;
};

/// attention over a zero-length sequence.
class EmptySequenceError : public Error {
 public:
  using Error::Error;
};

/// Non-finite training loss.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

/// Malformed or unsupported audio file.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Checkpoint and requested model disagree (frame size, width, ...).
class CompatibilityError : public Error {
 public:
  using Error::Error;
};

// Checkpoint load failures. Each is distinct so callers can report precisely.
class CheckpointError : public Error {
 public:
  using Error::Error;
};
class CorruptHeaderError : public CheckpointError {
 public:
  using CheckpointError::CheckpointError;
};
class ShapeMismatchError : public CheckpointError {
 public:
  using CheckpointError::CheckpointError;
};
class TruncatedPayloadError : public CheckpointError {
 public:
  using CheckpointError::CheckpointError;
};

}  // namespace arn
