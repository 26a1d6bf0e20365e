// Copyright 2026 The SPLIT Authors
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

#ifndef SPLIT_ERRORS_H_
#define SPLIT_ERRORS_H_

#include <stdexcept>
#include <string>

namespace split {

// A state or argument lies outside the domain where the model is defined
// (e.g. longitudinal velocity below the slip-angle guard).
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A factorization failed or a precision went non-positive.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A feature lies outside the partition's bounding box.
class OutOfRegion : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Full-GP oracle asked to handle more samples than its configured cap.
class CapExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The plant left its safe envelope or the vehicle left the track.
class CrashDetected : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace split

#endif  // SPLIT_ERRORS_H_
