#include "oac/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace oac {

std::string format_g6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

void write_metrics_csv(std::ostream& out, const std::vector<EvalRow>& rows) {
  out << kMetricsHeader << "\n";
  for (const EvalRow& r : rows) {
    out << r.env_step << "," << format_g6(r.return_raw) << ","
        << format_g6(r.return_smooth) << "," << format_g6(r.shift_norm) << ","
        << format_g6(r.q1_loss) << "," << format_g6(r.q2_loss) << ","
        << format_g6(r.actor_loss) << "\n";
  }
}

void write_metrics_csv(const std::string& path,
                       const std::vector<EvalRow>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  write_metrics_csv(out, rows);
}

std::vector<EvalRow> read_metrics_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open metrics file: " + path);
  std::string line;
  if (!std::getline(in, line) || line != kMetricsHeader)
    throw std::runtime_error(path + ": bad metrics header");
  std::vector<EvalRow> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string f;
    std::vector<double> vals;
    while (std::getline(ss, f, ',')) {
      try {
        vals.push_back(std::stod(f));
      } catch (...) {
        throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                 ": bad value '" + f + "'");
      }
    }
    if (vals.size() != 7)
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": expected 7 fields");
    EvalRow r;
    r.env_step = static_cast<long long>(vals[0]);
    r.return_raw = vals[1];
    r.return_smooth = vals[2];
    r.shift_norm = vals[3];
    r.q1_loss = vals[4];
    r.q2_loss = vals[5];
    r.actor_loss = vals[6];
    rows.push_back(r);
  }
  return rows;
}

}  // namespace oac
