#pragma once

#include <exception>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

namespace fhc {

/// Shortest round-trip decimal form (std::to_chars), so equal doubles always
/// print identically.
std::string format_number(double v);
std::string format_number(long v);

/// Comma-separated writer with a fixed header. Text cells are written as-is
/// and must not contain commas or newlines.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, std::vector<std::string> header);

  class Row {
   public:
    explicit Row(CsvWriter& w) : w_(w), pending_(std::uncaught_exceptions()) {}
    Row& operator<<(double v) { return cell(format_number(v)); }
    Row& operator<<(long v) { return cell(format_number(v)); }
    Row& operator<<(int v) { return cell(format_number(static_cast<long>(v))); }
    Row& operator<<(bool v) { return cell(v ? "1" : "0"); }
    Row& operator<<(std::string_view v) { return cell(std::string(v)); }
    Row& operator<<(const char* v) { return cell(v); }
    ~Row() noexcept(false);

   private:
    Row& cell(std::string s);
    CsvWriter& w_;
    std::vector<std::string> cells_;
    int pending_;  // a row abandoned by an exception is dropped
  };

  Row row() { return Row(*this); }
  const std::filesystem::path& path() const { return path_; }

 private:
  void write(const std::vector<std::string>& cells);
  std::filesystem::path path_;
  std::size_t columns_;
  std::ofstream out_;
};

struct PlotSeries {
  std::string label;
  std::vector<double> x, y;
};

/// Minimal SVG line chart; axes span the data range.
void write_svg_plot(const std::filesystem::path& path, const std::string& title, const std::string& x_label,
                    const std::string& y_label, const std::vector<PlotSeries>& series);

}  // namespace fhc
