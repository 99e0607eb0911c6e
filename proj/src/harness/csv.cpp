#include "harness/csv.hpp"

#include <cstdio>

#include "seqcs/errors.hpp"

namespace seqcs::harness {

namespace {

bool needs_quoting(const std::string& s) {
  return s.find_first_of(",\"\n\r") != std::string::npos;
}

std::string quoted(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 2);
  out.push_back('"');
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace

CsvWriter::CsvWriter(const std::filesystem::path& path) : out_(path, std::ios::binary) {
  if (!out_) throw Error("cannot open CSV output file: " + path.string());
}

void CsvWriter::header(const std::vector<std::string>& names) { emit(names); }

void CsvWriter::row(const std::vector<std::string>& cells) { emit(cells); }

void CsvWriter::emit(const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i > 0) out_.put(',');
    const std::string& c = cells[i];
    out_ << (needs_quoting(c) ? quoted(c) : c);
  }
  out_.put('\n');
  if (!out_) throw Error("CSV write failed");
}

std::string CsvWriter::num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string CsvWriter::num(std::int64_t v) { return std::to_string(v); }

std::string CsvWriter::num(std::uint64_t v) { return std::to_string(v); }

}  // namespace seqcs::harness
