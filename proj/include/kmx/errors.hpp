// Copyright 2026-present the kmx project
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

#include <stdexcept>
#include <string>

namespace kmx {

/// Root of the kmx exception hierarchy.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Mismatched vector lengths or feature dimensions.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// Invalid data values: non-finite entries, bad labels, empty inputs.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// More than two distinct class labels where a binary problem is required.
class MulticlassError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// Invalid kernel or grid parameter (sigma <= 0, degree < 1, unknown family).
class ParameterError : public Error {
public:
    using Error::Error;
};

/// Operation invoked in the wrong object state (access before attach,
/// re-attachment, predict before fit).
class StateError : public Error {
public:
    using Error::Error;
};

/// Index outside the matrix shape.
class BoundsError : public Error {
public:
    using Error::Error;
};

/// Shape requirement violated (non-square input, row/column mismatch).
class ShapeError : public Error {
public:
    using Error::Error;
};

/// Member incompatible with a container (shape differs from the set's).
class CompatibilityError : public Error {
public:
    using Error::Error;
};

/// Materialization refused: the dense result would exceed the element budget.
class CapacityError : public Error {
public:
    using Error::Error;
};

/// Gram diagonal unusable for cosine normalization (some K[i][i] <= 0).
class DegenerateDiagonalError : public Error {
public:
    using Error::Error;
};

/// Alignment undefined: a matrix has zero Frobenius norm after centering.
class DegenerateAlignmentError : public Error {
public:
    using Error::Error;
};

/// A numerical routine (eigensolver) failed to produce a usable result.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// Malformed textual input: kernel spec strings, CSV rows, grid JSON.
class ParseError : public Error {
public:
    using Error::Error;
};

}  // namespace kmx
