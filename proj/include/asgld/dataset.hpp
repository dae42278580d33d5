// Copyright 2026 The asgld Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ASGLD_DATASET_HPP
#define ASGLD_DATASET_HPP

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "asgld/core.hpp"

namespace asgld {

/// Labelled classification data with a fixed train/test partition.
struct Dataset {
  std::size_t n = 0;
  std::size_t p = 0;
  std::size_t num_classes = 0;
  std::vector<double> inputs;  // row-major, n x p
  std::vector<int> labels;
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;

  std::span<const double> row(std::size_t i) const { return {inputs.data() + i * p, p}; }

  void validate() const {
    if (n == 0 || p == 0) throw std::invalid_argument("Dataset: empty dataset");
    if (inputs.size() != n * p || labels.size() != n) throw std::invalid_argument("Dataset: shape mismatch");
    for (int y : labels)
      if (y < 0 || static_cast<std::size_t>(y) >= num_classes)
        throw std::invalid_argument("Dataset: label out of range");
    std::vector<char> seen(n, 0);
    for (const auto* part : {&train, &test})
      for (std::size_t i : *part) {
        if (i >= n) throw std::invalid_argument("Dataset: split index out of range");
        if (seen[i]++) throw std::invalid_argument("Dataset: row appears in both partitions");
      }
    if (train.size() + test.size() != n) throw std::invalid_argument("Dataset: split does not cover all rows");
  }
};

/// Deterministic 80/20 train/test split of 0..n-1, shuffled by `seed`.
inline void split_80_20(Dataset& ds, std::uint64_t seed) {
  std::vector<std::size_t> idx(ds.n);
  for (std::size_t i = 0; i < ds.n; ++i) idx[i] = i;
  std::mt19937_64 eng(mix_seed(seed, 0x5bd1));
  for (std::size_t i = ds.n; i > 1; --i) std::swap(idx[i - 1], idx[eng() % i]);
  const std::size_t n_train = ds.n * 4 / 5;
  ds.train.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
  ds.test.assign(idx.begin() + static_cast<std::ptrdiff_t>(n_train), idx.end());
  std::sort(ds.train.begin(), ds.train.end());
  std::sort(ds.test.begin(), ds.test.end());
}

/**
 * Two interleaved half circles, n/2 points each. Class 0 lies on
 * (cos t, sin t) and class 1 on (1 - cos t, 0.5 - sin t) for t evenly spaced
 * in [0, pi], each point perturbed by N(0, noise_sd^2) per coordinate.
 */
inline Dataset two_moons(std::size_t n, double noise_sd, std::uint64_t seed) {
  if (n < 2 || n % 2 != 0) throw std::invalid_argument("two_moons: n must be even and >= 2");
  if (!(noise_sd >= 0.0)) throw std::invalid_argument("two_moons: noise_sd must be >= 0");
  Dataset ds;
  ds.n = n;
  ds.p = 2;
  ds.num_classes = 2;
  ds.inputs.reserve(2 * n);
  GaussianStream noise(seed);
  const std::size_t half = n / 2;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t k = i % half;
    const double t = half > 1 ? std::numbers::pi * static_cast<double>(k) / static_cast<double>(half - 1) : 0.0;
    const bool upper = i < half;
    double x = upper ? std::cos(t) : 1.0 - std::cos(t);
    double y = upper ? std::sin(t) : 0.5 - std::sin(t);
    x += noise_sd * noise.standard_normal();
    y += noise_sd * noise.standard_normal();
    ds.inputs.push_back(x);
    ds.inputs.push_back(y);
    ds.labels.push_back(upper ? 0 : 1);
  }
  split_80_20(ds, seed);
  return ds;
}

class DatasetError : public std::runtime_error {
 public:
  enum class Code { missing_file, malformed_row, unknown_label_column, empty_dataset };

  DatasetError(Code code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
  Code code() const { return code_; }

 private:
  Code code_;
};

namespace detail {

inline std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline std::string trim(std::string s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

inline bool parse_double(const std::string& text, double& out) {
  const std::string t = trim(text);
  if (t.empty()) return false;
  char* end = nullptr;
  errno = 0;
  out = std::strtod(t.c_str(), &end);
  return errno == 0 && end == t.c_str() + t.size() && std::isfinite(out);
}

}  // namespace detail

/**
 * Loads a comma-separated numeric table with a header row. `label_column`
 * names the integer class column; every other column becomes a feature.
 * Row numbers in error messages count data rows from 1 (header excluded).
 * The class count is max(label) + 1, and never less than 2.
 */
inline Dataset load_csv_dataset(const std::filesystem::path& path, const std::string& label_column,
                                std::uint64_t split_seed = 0) {
  using Code = DatasetError::Code;
  std::ifstream in(path);
  if (!in) throw DatasetError(Code::missing_file, "cannot open dataset file '" + path.string() + "'");

  std::string line;
  if (!std::getline(in, line)) throw DatasetError(Code::empty_dataset, "empty dataset");
  std::vector<std::string> header = detail::split_commas(line);
  for (auto& h : header) h = detail::trim(h);
  const auto it = std::find(header.begin(), header.end(), label_column);
  if (it == header.end())
    throw DatasetError(Code::unknown_label_column, "unknown label column '" + label_column + "'");
  const std::size_t label_idx = static_cast<std::size_t>(it - header.begin());

  Dataset ds;
  ds.p = header.size() - 1;
  std::size_t row = 0;
  int max_label = 0;
  while (std::getline(in, line)) {
    if (detail::trim(line).empty()) continue;
    ++row;
    const auto cells = detail::split_commas(line);
    if (cells.size() != header.size())
      throw DatasetError(Code::malformed_row, "row " + std::to_string(row) + ": expected " +
                                                  std::to_string(header.size()) + " fields, got " +
                                                  std::to_string(cells.size()));
    for (std::size_t c = 0; c < cells.size(); ++c) {
      double v = 0.0;
      if (!detail::parse_double(cells[c], v))
        throw DatasetError(Code::malformed_row,
                           "row " + std::to_string(row) + ": non-numeric value in column '" + header[c] + "'");
      if (c == label_idx) {
        if (v < 0.0 || v != std::floor(v) || v > 1e6)
          throw DatasetError(Code::malformed_row, "row " + std::to_string(row) + ": label must be a class index");
        ds.labels.push_back(static_cast<int>(v));
        max_label = std::max(max_label, static_cast<int>(v));
      } else {
        ds.inputs.push_back(v);
      }
    }
  }
  if (row == 0) throw DatasetError(Code::empty_dataset, "empty dataset");
  if (ds.p == 0) throw DatasetError(Code::malformed_row, "dataset has no feature columns");
  ds.n = row;
  ds.num_classes = static_cast<std::size_t>(std::max(max_label + 1, 2));
  split_80_20(ds, split_seed);
  ds.validate();
  return ds;
}

}  // namespace asgld

#endif  // ASGLD_DATASET_HPP
