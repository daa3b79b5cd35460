#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "rbeigs/dense.hpp"

namespace rbeigs {

/// 17 significant digits; round-trips doubles exactly.
std::string format_g17(double v);

/// Rows of comma-separated values. Header may be empty.
class CsvWriter {
 public:
  explicit CsvWriter(const std::filesystem::path& path);
  ~CsvWriter();
  CsvWriter(const CsvWriter&) = delete;
  CsvWriter& operator=(const CsvWriter&) = delete;

  void header(const std::vector<std::string>& names);
  void row(const std::vector<std::string>& fields);

 private:
  struct Impl;
  Impl* impl_;
};

void write_dense_csv(const std::filesystem::path& path, const DenseMatrix& m,
                     const std::vector<std::string>& header = {});

}  // namespace rbeigs
