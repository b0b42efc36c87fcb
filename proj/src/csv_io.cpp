#include "gaussbv/csv_io.hpp"

#include "gaussbv/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

namespace gaussbv {

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    cells.push_back(cell);
  }
  return cells;
}

double parse_double(const std::string& s, std::size_t line_no) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw GridError("field csv line " + std::to_string(line_no) + ": bad number '" + s + "'");
  }
}

}  // namespace

void write_field_csv(std::ostream& out, const GridField& u) {
  const int d = u.grid().dim();
  for (int k = 0; k < d; ++k) out << 'x' << (k + 1) << ',';
  out << "value\n";
  out.precision(std::numeric_limits<double>::max_digits10);
  for (std::size_t i = 0; i < u.size(); ++i) {
    const auto p = u.grid().point(i);
    for (int k = 0; k < d; ++k) out << p[k] << ',';
    out << u[i] << '\n';
  }
}

void write_field_csv(const std::string& path, const GridField& u) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path + " for writing");
  write_field_csv(out, u);
}

GridField read_field_csv(std::istream& in, const GaussianMeasure& measure) {
  std::string line;
  if (!std::getline(in, line)) throw GridError("field csv: empty input");
  const auto header = split(line);
  const int d = static_cast<int>(header.size()) - 1;
  if (d < 1 || d > kMaxGridDim) throw GridError("field csv: expected 2 to 4 columns");
  for (int k = 0; k < d; ++k) {
    if (header[k] != "x" + std::to_string(k + 1)) {
      throw GridError("field csv: header column " + std::to_string(k + 1) + " must be x" +
                      std::to_string(k + 1));
    }
  }
  if (header[d] != "value") throw GridError("field csv: last header column must be 'value'");
  if (measure.dim() != d) throw GridError("field csv: measure dimension mismatch");

  std::vector<std::array<double, 4>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto cells = split(line);
    if (static_cast<int>(cells.size()) != d + 1) {
      throw GridError("field csv line " + std::to_string(line_no) + ": wrong column count");
    }
    std::array<double, 4> row{};
    for (int k = 0; k <= d; ++k) row[k] = parse_double(cells[k], line_no);
    rows.push_back(row);
  }

  // Recover the per-axis coordinates and check they form one shared equispaced set.
  std::vector<double> coords;
  for (const auto& r : rows) coords.push_back(r[0]);
  std::sort(coords.begin(), coords.end());
  coords.erase(std::unique(coords.begin(), coords.end()), coords.end());
  const int n = static_cast<int>(coords.size());
  if (n < 3) throw GridError("field csv: need at least 3 nodes per axis");
  const double radius = coords.back();
  const double h = 2.0 * radius / (n - 1);
  const double tol = 1e-9 * std::max(1.0, radius);
  for (int i = 0; i < n; ++i) {
    if (std::abs(coords[i] - (-radius + i * h)) > tol) {
      throw GridError("field csv: coordinates are not an equispaced symmetric grid");
    }
  }
  std::size_t expected = 1;
  for (int k = 0; k < d; ++k) expected *= static_cast<std::size_t>(n);
  if (rows.size() != expected) throw GridError("field csv: node set is not a full tensor grid");

  const UniformGrid grid(d, n, radius);
  std::vector<double> values(grid.size());
  std::vector<char> seen(grid.size(), 0);
  for (const auto& r : rows) {
    std::size_t flat = 0;
    for (int k = 0; k < d; ++k) {
      const double s = (r[k] + radius) / h;
      const long idx = std::lround(s);
      if (idx < 0 || idx >= n || std::abs(s - idx) > 1e-6) {
        throw GridError("field csv: node off the regular grid");
      }
      flat += static_cast<std::size_t>(idx) * grid.stride(k);
    }
    if (seen[flat]) throw GridError("field csv: duplicate node");
    seen[flat] = 1;
    values[flat] = r[d];
  }
  return GridField(GaussianGrid::create(grid, measure), std::move(values));
}

GridField read_field_csv(const std::string& path, const GaussianMeasure& measure) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  return read_field_csv(in, measure);
}

}  // namespace gaussbv
