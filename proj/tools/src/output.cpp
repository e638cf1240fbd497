#include "output.hpp"

#include <hbl/errors.hpp>

#include <openssl/evp.h>

#include <cstdio>
#include <fstream>

namespace hbl::cli {

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw Error("cannot write " + tmp.string());
    os << content;
    os.flush();
    if (!os) throw Error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) throw Error("sha256 failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

std::string num(double x) {
  char b[40];
  std::snprintf(b, sizeof b, "%.17g", x);
  return b;
}

CsvWriter::CsvWriter(std::vector<std::string> header) {
  for (const auto& h : header) cell(h);
  end_row();
}

CsvWriter& CsvWriter::cell(double x) { return cell(num(x)); }

CsvWriter& CsvWriter::cell(long x) { return cell(std::to_string(x)); }

CsvWriter& CsvWriter::cell(const std::string& s) {
  if (!fresh_) buf_ += ',';
  fresh_ = false;
  if (s.find_first_of(",\"\n") != std::string::npos) {
    buf_ += '"';
    for (char c : s) {
      if (c == '"') buf_ += '"';
      buf_ += c;
    }
    buf_ += '"';
  } else {
    buf_ += s;
  }
  return *this;
}

void CsvWriter::end_row() {
  buf_ += '\n';
  fresh_ = true;
}

}  // namespace hbl::cli
