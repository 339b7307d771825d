#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace mflab {
namespace io {

/// Minimal native SVG line/scatter plot writer. Output is deterministic:
/// no timestamps, no randomness, doubles printed with shortest round-trip
/// formatting.
class SvgPlot {
 public:
  SvgPlot(std::string title, std::string x_label, std::string y_label);

  void add_series(std::string name, std::vector<double> xs, std::vector<double> ys,
                  std::string color = "", bool dashed = false);
  void set_log_y(bool log_y) { log_y_ = log_y; }
  void set_log_x(bool log_x) { log_x_ = log_x; }

  void write(const std::filesystem::path& path) const;

 private:
  struct Series {
    std::string name;
    std::vector<double> xs, ys;
    std::string color;
    bool dashed;
  };
  std::string title_, x_label_, y_label_;
  std::vector<Series> series_;
  bool log_x_ = false;
  bool log_y_ = false;
};

}  // namespace io
}  // namespace mflab
