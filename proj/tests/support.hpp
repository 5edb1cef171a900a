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

#include <filesystem>
#include <fstream>
#include <string>

#include "shiftdiag/dataset.hpp"
#include "shiftdiag/rng.hpp"

namespace testing {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir
{
public:
  explicit TempDir(std::string const &name)
    : path_(std::filesystem::temp_directory_path() / ("shiftdiag-" + name))
  {
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }

  std::filesystem::path operator/(std::string const &leaf) const { return path_ / leaf; }
  std::filesystem::path const &path() const { return path_; }

private:
  std::filesystem::path path_;
};

inline void write_text(std::filesystem::path const &path, std::string const &text)
{
  std::ofstream(path) << text;
}

inline std::string read_text(std::filesystem::path const &path)
{
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline shiftdiag::Matrix random_matrix(std::size_t rows, std::size_t cols, shiftdiag::Rng &rng,
                                       double scale = 1.0)
{
  shiftdiag::Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
  {
    for (Eigen::Index j = 0; j < m.cols(); ++j)
    {
      m(i, j) = scale * rng.normal();
    }
  }
  return m;
}

/// Two Gaussian blobs at (+-3, 0); label 1 on the right.
inline shiftdiag::LabeledDataset separable(std::size_t n, std::uint64_t seed)
{
  shiftdiag::Rng    rng(seed);
  shiftdiag::Matrix x(static_cast<Eigen::Index>(n), 2);
  std::vector<int>  y(n);
  for (std::size_t i = 0; i < n; ++i)
  {
    int const label = static_cast<int>(i % 2);
    auto const r    = static_cast<Eigen::Index>(i);
    x(r, 0)         = (label ? 3.0 : -3.0) + 0.5 * rng.normal();
    x(r, 1)         = rng.normal();
    y[i]            = label;
  }
  return {std::move(x), std::move(y), 2, "separable"};
}

}  // namespace testing
