#pragma once

#include <fstream>
#include <string>
#include <vector>

#include "reclab/errors.hpp"
#include "reclab/rational.hpp"

namespace reclab {

/// Minimal CSV writer: header row required, '.' decimal separator,
/// newline-terminated rows.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header) : header_(std::move(header)) {}

  void row(std::vector<std::string> cells) {
    if (cells.size() != header_.size()) throw ConfigError("csv row width mismatch");
    rows_.push_back(std::move(cells));
  }

  std::string render() const {
    std::string out;
    auto emit = [&out](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out.push_back(',');
        out += cells[i];
      }
      out.push_back('\n');
    };
    emit(header_);
    for (const auto& r : rows_) emit(r);
    return out;
  }

  void write(const std::string& path) const {
    std::ofstream f(path);
    if (!f) throw ConfigError("cannot open output file: " + path);
    f << render();
  }

  static std::string num(double v) { return double_repr(v); }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace reclab
