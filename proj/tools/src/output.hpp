#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace hbl::cli {

// Writes through a temporary file in the same directory, then renames.
void write_atomic(const std::filesystem::path& path, const std::string& content);

std::string sha256_hex(const std::string& data);

// %.17g, the round-trip format used for every CSV number.
std::string num(double x);

class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);
  CsvWriter& cell(double x);
  CsvWriter& cell(long x);
  CsvWriter& cell(const std::string& s);
  void end_row();
  const std::string& str() const { return buf_; }

 private:
  std::string buf_;
  bool fresh_ = true;
};

}  // namespace hbl::cli
