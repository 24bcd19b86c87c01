#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <fmt/format.h>

namespace qdot::cli {

/// '#'-prefixed manifest lines, then a header row, then data rows.
class CsvFile {
 public:
  CsvFile(const std::filesystem::path& path, const std::vector<std::string>& manifest,
          const std::vector<std::string>& columns);

  CsvFile& operator<<(double v);
  CsvFile& operator<<(int v);
  CsvFile& operator<<(const std::string& v);
  void end_row();

 private:
  void sep();

  std::filesystem::path path_;
  std::ofstream out_;
  bool first_ = true;
};

inline std::string num(double v) { return fmt::format("{:.12g}", v); }

}  // namespace qdot::cli
