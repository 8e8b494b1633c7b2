#include "fvps/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "fvps/errors.hpp"

#ifndef FVPS_VERSION
#define FVPS_VERSION "unknown"
#endif

namespace fvps {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream ss(line);
  while (std::getline(ss, cur, sep)) out.push_back(cur);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_number(const std::string& s, std::size_t line_no) {
  const std::string t = trim(s);
  double v = 0.0;
  const auto* first = t.data();
  const auto* last = t.data() + t.size();
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last) {
    // from_chars rejects "inf"/"nan" spellings produced by some writers
    if (t == "inf") return INFINITY;
    if (t == "-inf") return -INFINITY;
    if (t == "nan") return NAN;
    throw ConfigurationError("read_csv: bad number '" + t + "' on line " + std::to_string(line_no));
  }
  return v;
}

}  // namespace

const char* version() { return FVPS_VERSION; }

std::string CsvTable::meta(const std::string& key) const {
  for (const auto& [k, v] : metadata)
    if (k == key) return v;
  return {};
}

std::vector<double> CsvTable::column(const std::string& name) const {
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (columns[c] != name) continue;
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r[c]);
    return out;
  }
  throw ConfigurationError("CsvTable: no column named " + name);
}

std::string format_number(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

void write_csv(std::ostream& out, const CsvTable& table) {
  for (const auto& [k, v] : table.metadata) out << "# " << k << '=' << v << '\n';
  for (std::size_t c = 0; c < table.columns.size(); ++c) out << (c ? "," : "") << table.columns[c];
  out << '\n';
  for (const auto& row : table.rows) {
    if (row.size() != table.columns.size()) throw DimensionError("write_csv: row width differs from header");
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << format_number(row[c]);
    out << '\n';
  }
}

void write_csv(const std::filesystem::path& path, const CsvTable& table) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigurationError("write_csv: cannot open " + path.string());
  write_csv(f, table);
  if (!f) throw ConfigurationError("write_csv: write failed for " + path.string());
}

CsvTable read_csv(std::istream& in) {
  CsvTable t;
  std::string line;
  std::size_t no = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (header) throw ConfigurationError("read_csv: metadata after header on line " + std::to_string(no));
      const std::string body = trim(line.substr(1));
      const auto eq = body.find('=');
      if (eq == std::string::npos) {
        t.metadata.emplace_back(body, "");
      } else {
        t.metadata.emplace_back(trim(body.substr(0, eq)), trim(body.substr(eq + 1)));
      }
      continue;
    }
    const auto cells = split(line, ',');
    if (!header) {
      for (const auto& c : cells) t.columns.push_back(trim(c));
      header = true;
      continue;
    }
    if (cells.size() != t.columns.size()) {
      throw ConfigurationError("read_csv: line " + std::to_string(no) + " has " + std::to_string(cells.size()) +
                               " cells, header has " + std::to_string(t.columns.size()));
    }
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) row.push_back(parse_number(c, no));
    t.rows.push_back(std::move(row));
  }
  if (!header) throw ConfigurationError("read_csv: no header row");
  return t;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigurationError("read_csv: cannot open " + path.string());
  return read_csv(f);
}

CsvTable field_table(const RealField& w, const PhaseSpaceGrid& grid) {
  if (w.rows() != static_cast<Eigen::Index>(grid.n_p()) || w.cols() != static_cast<Eigen::Index>(grid.n_q())) {
    throw DimensionError("field_table: field shape does not match grid");
  }
  CsvTable t;
  t.metadata = {{"n_p", std::to_string(grid.n_p())},
                {"n_q", std::to_string(grid.n_q())},
                {"dp", format_number(grid.momentum().spacing())},
                {"dq", format_number(grid.position().spacing)}};
  t.columns = {"p", "q", "w"};
  t.rows.reserve(static_cast<std::size_t>(w.size()));
  for (Eigen::Index i = 0; i < w.rows(); ++i)
    for (Eigen::Index j = 0; j < w.cols(); ++j)
      t.rows.push_back({grid.momentum().node(i), grid.position().node(j), w(i, j)});
  return t;
}

CsvTable state_table(const ChargeBranchState& state, Branch branch) {
  CsvTable t;
  t.metadata = {{"branch", branch == Branch::plus ? "plus" : "minus"}};
  t.columns = {"p", "re", "im"};
  const auto& a = state.amplitude(branch);
  for (std::size_t k = 0; k < a.size(); ++k)
    t.rows.push_back({state.grid().node(static_cast<std::ptrdiff_t>(k)), a[k].real(), a[k].imag()});
  return t;
}

CsvTable orbit_table(const OrbitSeries& series) {
  CsvTable t;
  t.metadata = {{"omega", format_number(series.omega)}};
  t.columns = {"t", "r", "x", "y"};
  t.rows.reserve(series.size());
  for (std::size_t i = 0; i < series.size(); ++i)
    t.rows.push_back({series.times[i], series.r[i], series.x[i], series.y[i]});
  return t;
}

CsvTable penalty_table(const std::vector<PenaltyRow>& rows) {
  CsvTable t;
  t.columns = {"sigma", "nonrel", "rel", "ratio"};
  for (const auto& r : rows) t.rows.push_back({r.sigma, r.nonrelativistic, r.relativistic, r.ratio()});
  return t;
}

std::filesystem::path sidecar_path(const std::filesystem::path& data) {
  auto p = data;
  p.replace_extension(".json");
  return p;
}

}  // namespace fvps
