#include "dykstra/trace.hpp"

#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace dykstra {

void Trace::write_csv(std::ostream& os) const {
  os << "iter,F,gap_lb,dist_ref,sumz_sqrtn,wall_ns\n";
  os << std::setprecision(17);
  for (const auto& r : rows) {
    os << r.iter << ',' << r.F << ',' << r.gap_lb << ',' << r.dist_ref << ','
       << r.sumz_sqrtn << ',' << r.wall_ns << '\n';
  }
}

void Trace::write_csv_file(const std::string& path) const {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open trace file for writing: " + path);
  write_csv(os);
}

Trace Trace::read_csv(std::istream& is) {
  Trace t;
  std::string line;
  if (!std::getline(is, line))
    throw std::runtime_error("empty trace stream");
  if (line != "iter,F,gap_lb,dist_ref,sumz_sqrtn,wall_ns")
    throw std::runtime_error("bad trace header: " + line);
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::istringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 6) throw std::runtime_error("bad trace row: " + line);
    TraceRow r;
    try {
      r.iter = std::stoi(cells[0]);
      r.F = std::stod(cells[1]);
      r.gap_lb = std::stod(cells[2]);
      r.dist_ref = std::stod(cells[3]);
      r.sumz_sqrtn = std::stod(cells[4]);
      r.wall_ns = std::stoll(cells[5]);
    } catch (const std::exception&) {
      throw std::runtime_error("bad trace row: " + line);
    }
    t.rows.push_back(r);
  }
  return t;
}

Trace Trace::read_csv_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open trace file: " + path);
  return read_csv(is);
}

}  // namespace dykstra
