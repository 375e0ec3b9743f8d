/*!
 * This file is part of fastkrr, a library for Gaussian kernel ridge
 * regression with Nystrom preconditioning.
 *
 * Licensed under the Apache License Version 2.0. See LICENSE file in the
 * project root for license information.
 */
#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "fastkrr/point_set.hpp"

namespace fastkrr {

class CsvParseError : public std::runtime_error {
 public:
  CsvParseError(const std::string& path, std::size_t line, const std::string& what)
      : std::runtime_error(path + ":" + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

struct IngestResult {
  Matrix features;
  Vector labels;
  std::vector<std::string> feature_names;
  std::string label_name;
  bool standardized = false;
  Vector feature_means;   // filled when standardized
  Vector feature_stdevs;  // filled when standardized
};

/// Reads a numeric CSV with a header row; the named column becomes the
/// label vector, every other column a feature. Optional per-column
/// standardization to zero mean / unit variance.
IngestResult ingest_csv(const std::string& path, const std::string& label_column,
                        bool standardize);

}  // namespace fastkrr
