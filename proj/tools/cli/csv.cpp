#include "csv.hpp"

#include "qdot/error.hpp"

namespace qdot::cli {

CsvFile::CsvFile(const std::filesystem::path& path, const std::vector<std::string>& manifest,
                 const std::vector<std::string>& columns)
    : path_(path), out_(path) {
  if (!out_) throw Error(ErrorCode::InvalidValue, "cannot write " + path.string());
  for (const auto& line : manifest) out_ << "# " << line << '\n';
  for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
  out_ << '\n';
}

void CsvFile::sep() {
  if (!first_) out_ << ',';
  first_ = false;
}

CsvFile& CsvFile::operator<<(double v) {
  sep();
  out_ << num(v);
  return *this;
}

CsvFile& CsvFile::operator<<(int v) {
  sep();
  out_ << v;
  return *this;
}

CsvFile& CsvFile::operator<<(const std::string& v) {
  sep();
  out_ << v;
  return *this;
}

void CsvFile::end_row() {
  out_ << '\n';
  first_ = true;
}

}  // namespace qdot::cli
