#pragma once

// Map files, boundary files and CSV output.

#include <json.hpp>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mgl/grid_map.hpp"
#include "mgl/solver.hpp"

namespace mgl {

using json = nlohmann::ordered_json;

/// Malformed or unreadable user input.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shortest form that round-trips, at most 17 significant digits, '.' as
/// the decimal separator regardless of locale.
std::string format_double(double x);

json domain_to_json(const GridDomain& d);
GridDomain domain_from_json(const json& j);
json target_to_json(const ManifoldSpec& t);
ManifoldSpec target_from_json(const json& j);

json map_to_json(const GridMap& f);
/// Throws InputError on missing fields, shape mismatch or points off the
/// target.
GridMap map_from_json(const json& j);

/// Same format with null interior values.
json boundary_to_json(const BoundaryData& b);
/// Accepts boundary files and full map files (interior values are dropped).
BoundaryData boundary_from_json(const json& j);

json outcome_to_json(const SolveOutcome& o);

json read_json_file(const std::string& path);
/// Writes the whole content or throws std::runtime_error; no partial file
/// is left behind on failure.
void write_text_file(const std::string& path, const std::string& content);

GridMap read_map(const std::string& path);
void write_map(const std::string& path, const GridMap& f);
BoundaryData read_boundary(const std::string& path);
void write_boundary(const std::string& path, const BoundaryData& b);

/// Row-by-row CSV with a fixed header.
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, std::vector<std::string> header);
  CsvWriter& operator<<(double x);
  CsvWriter& operator<<(long long x);
  CsvWriter& operator<<(int x) { return *this << static_cast<long long>(x); }
  CsvWriter& operator<<(std::size_t x) { return *this << static_cast<long long>(x); }
  CsvWriter& operator<<(const std::string& s);
  CsvWriter& operator<<(const char* s) { return *this << std::string(s); }
  /// Throws std::logic_error if the row width differs from the header.
  void end_row();

 private:
  void cell(const std::string& s);
  std::ostream& out_;
  std::size_t columns_;
  std::size_t filled_ = 0;
};

}  // namespace mgl
