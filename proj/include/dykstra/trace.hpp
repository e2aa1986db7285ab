#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace dykstra {

struct TraceRow {
  int iter = 0;
  double F = 0.0;
  double gap_lb = 0.0;
  double dist_ref = 0.0;      // NaN when no reference is available
  double sumz_sqrtn = 0.0;    // sum_alpha |z_alpha| / sqrt(cycle index)
  std::int64_t wall_ns = 0;
};

struct Trace {
  std::vector<TraceRow> rows;

  void write_csv(std::ostream& os) const;
  void write_csv_file(const std::string& path) const;
  static Trace read_csv(std::istream& is);
  static Trace read_csv_file(const std::string& path);
};

}  // namespace dykstra
