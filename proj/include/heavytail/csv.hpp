#pragma once

#include <fstream>
#include <string>
#include <vector>

namespace heavytail {

/// Round-trip decimal form of a double (%.17g); "inf", "-inf" and "nan" for
/// non-finite values.
std::string format_double(double v);

/// Comma-separated output with a leading "# manifest <hash>" line and a header.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::string& manifest_hash, const std::vector<std::string>& header);

  void row(const std::vector<std::string>& cells);
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::ofstream out_;
  std::size_t width_;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::string manifest_hash;  // empty when the file has no manifest line

  /// Column index by name; throws ValidationError when absent.
  std::size_t column(const std::string& name) const;
};

/// Reads a file written by CsvWriter. Lines starting with '#' are comments.
CsvTable read_csv(const std::string& path);

}  // namespace heavytail
