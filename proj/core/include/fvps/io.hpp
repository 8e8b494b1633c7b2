#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "fvps/entangled.hpp"
#include "fvps/grids.hpp"
#include "fvps/rotator.hpp"
#include "fvps/states.hpp"

namespace fvps {

/// Library version string, e.g. "0.3.0".
const char* version();

/// Numeric table with "# key=value" metadata lines above a header row.
struct CsvTable {
  std::vector<std::pair<std::string, std::string>> metadata;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  /// Metadata value for key, or an empty string.
  std::string meta(const std::string& key) const;
  std::vector<double> column(const std::string& name) const;
};

/// Shortest round-trip decimal form of x.
std::string format_number(double x);

void write_csv(std::ostream& out, const CsvTable& table);
void write_csv(const std::filesystem::path& path, const CsvTable& table);
/// Throws ConfigurationError on malformed input.
CsvTable read_csv(std::istream& in);
CsvTable read_csv(const std::filesystem::path& path);

/// Long form (p, q, w), one row per grid cell, momentum-major.
CsvTable field_table(const RealField& w, const PhaseSpaceGrid& grid);
/// (p, re, im) of one branch.
CsvTable state_table(const ChargeBranchState& state, Branch branch = Branch::plus);
/// (t, r, x, y)
CsvTable orbit_table(const OrbitSeries& series);
/// (sigma, nonrel, rel, ratio)
CsvTable penalty_table(const std::vector<PenaltyRow>& rows);

/// Sidecar path: data.csv -> data.json.
std::filesystem::path sidecar_path(const std::filesystem::path& data);

}  // namespace fvps
