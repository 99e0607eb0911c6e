#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace seqcs::harness {

/// Deterministic CSV emitter: RFC-4180-style quoting, '.' decimal separator,
/// UTF-8, '\n' line ends, doubles printed with %.17g so reruns are
/// byte-identical.
class CsvWriter {
 public:
  explicit CsvWriter(const std::filesystem::path& path);

  void header(const std::vector<std::string>& names);
  void row(const std::vector<std::string>& cells);

  static std::string num(double v);
  static std::string num(std::int64_t v);
  static std::string num(int v) { return num(static_cast<std::int64_t>(v)); }
  static std::string num(std::uint64_t v);
  static std::string boolean(bool v) { return v ? "true" : "false"; }

 private:
  std::ofstream out_;
  void emit(const std::vector<std::string>& cells);
};

}  // namespace seqcs::harness
