#pragma once
//------------------------------------------------------------------------------
//
//   Copyright 2026 The shiftdiag Authors
//
//   Licensed under the Apache License, Version 2.0 (the "License");
//   you may not use this file except in compliance with the License.
//   You may obtain a copy of the License at
//
//       http://www.apache.org/licenses/LICENSE-2.0
//
//   Unless required by applicable law or agreed to in writing, software
//   distributed under the License is distributed on an "AS IS" BASIS,
//   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//   See the License for the specific language governing permissions and
//   limitations under the License.
//
//------------------------------------------------------------------------------

#include <stdexcept>
#include <string>

namespace shiftdiag {

/// Base of every error raised by the library.
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Malformed, inconsistent or out-of-contract input data.
class DataError : public Error
{
public:
  using Error::Error;
};

/// Invalid configuration (manifest, design spec, command-line values).
class ConfigError : public Error
{
public:
  using Error::Error;
};

/// Training produced a non-finite loss.
class TrainingError : public Error
{
public:
  using Error::Error;
};

}  // namespace shiftdiag
