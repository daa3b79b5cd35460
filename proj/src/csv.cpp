#include "rbeigs/csv.hpp"

#include <cstdio>
#include <fstream>

#include "rbeigs/errors.hpp"

namespace rbeigs {

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct CsvWriter::Impl {
  std::ofstream out;
};

CsvWriter::CsvWriter(const std::filesystem::path& path) : impl_(new Impl) {
  impl_->out.open(path);
  if (!impl_->out) {
    delete impl_;
    throw IoError("cannot open " + path.string() + " for writing");
  }
}

CsvWriter::~CsvWriter() { delete impl_; }

void CsvWriter::header(const std::vector<std::string>& names) { row(names); }

void CsvWriter::row(const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) impl_->out << ',';
    impl_->out << fields[i];
  }
  impl_->out << '\n';
}

void write_dense_csv(const std::filesystem::path& path, const DenseMatrix& m,
                     const std::vector<std::string>& header) {
  CsvWriter w(path);
  if (!header.empty()) w.header(header);
  std::vector<std::string> fields(m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) fields[j] = format_g17(m(i, j));
    w.row(fields);
  }
}

}  // namespace rbeigs
