#include "mgl/io.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace mgl {

std::string format_double(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

json domain_to_json(const GridDomain& d) {
  json g;
  g["nx"] = d.nx;
  g["ny"] = d.ny;
  g["hx"] = d.hx;
  g["hy"] = d.hy;
  if (!d.mask.empty()) {
    json m = json::array();
    for (char c : d.mask) m.push_back(c ? 1 : 0);
    g["mask"] = std::move(m);
  }
  return g;
}

namespace {

template <class T>
T field(const json& j, const char* key, const char* where) {
  if (!j.is_object() || !j.contains(key))
    throw InputError(std::string(where) + ": missing field '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw InputError(std::string(where) + ": field '" + key + "' has the wrong type");
  }
}

Point point_from_json(const json& v, int dim, std::size_t node) {
  if (!v.is_array() || static_cast<int>(v.size()) != dim)
    throw InputError("values[" + std::to_string(node) + "]: expected " + std::to_string(dim) +
                     " coordinates");
  Point p(dim);
  for (int a = 0; a < dim; ++a) {
    if (!v[a].is_number())
      throw InputError("values[" + std::to_string(node) + "]: non-numeric coordinate");
    p[a] = v[a].get<double>();
  }
  return p;
}

json point_to_json(const Point& p) {
  json a = json::array();
  for (Eigen::Index i = 0; i < p.size(); ++i) a.push_back(p[i]);
  return a;
}

struct Parsed {
  GridDomain domain;
  ManifoldSpec target;
  std::vector<std::optional<Point>> values;
};

Parsed parse_values(const json& j) {
  Parsed out;
  out.domain = domain_from_json(field<json>(j, "grid", "map"));
  out.target = target_from_json(field<json>(j, "target", "map"));
  const json v = field<json>(j, "values", "map");
  if (!v.is_array() || v.size() != out.domain.size())
    throw InputError("map: 'values' must be an array of nx*ny entries");
  const int amb = out.target.ambient_dim();
  const ModelManifold mf(out.target);
  out.values.resize(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (v[k].is_null()) continue;
    Point p = point_from_json(v[k], amb, k);
    if (mf.constraint_residual(p) > kConstraintTol * std::max(1.0, std::abs(p[0])))
      throw InputError("values[" + std::to_string(k) + "]: point is not on the target");
    out.values[k] = std::move(p);
  }
  return out;
}

}  // namespace

GridDomain domain_from_json(const json& j) {
  GridDomain d;
  d.nx = field<int>(j, "nx", "grid");
  d.ny = field<int>(j, "ny", "grid");
  d.hx = field<double>(j, "hx", "grid");
  d.hy = field<double>(j, "hy", "grid");
  if (j.contains("mask") && !j["mask"].is_null()) {
    const json& m = j["mask"];
    if (!m.is_array()) throw InputError("grid: 'mask' must be an array");
    for (const auto& e : m) {
      if (!e.is_number_integer() && !e.is_boolean())
        throw InputError("grid: mask entries must be 0/1");
      d.mask.push_back(e.is_boolean() ? e.get<bool>() : e.get<int>() != 0);
    }
  }
  try {
    d.validate();
  } catch (const std::invalid_argument& e) {
    throw InputError(std::string("grid: ") + e.what());
  }
  return d;
}

json target_to_json(const ManifoldSpec& t) {
  json j;
  j["kind"] = t.kind == ManifoldKind::Euclidean ? "euclidean" : "hyperbolic";
  j["dim"] = t.dim;
  j["curvature"] = t.curvature;
  return j;
}

ManifoldSpec target_from_json(const json& j) {
  const auto kind = field<std::string>(j, "kind", "target");
  const int dim = field<int>(j, "dim", "target");
  ManifoldSpec t;
  if (kind == "euclidean") {
    t = ManifoldSpec::euclidean(dim);
    if (j.contains("curvature") && field<double>(j, "curvature", "target") != 0.0)
      throw InputError("target: euclidean target must have curvature 0");
  } else if (kind == "hyperbolic") {
    const double c = j.contains("curvature") ? field<double>(j, "curvature", "target") : -1.0;
    if (!(c < 0.0)) throw InputError("target: hyperbolic curvature must be negative");
    t = ManifoldSpec::hyperbolic(dim, -c);
  } else {
    throw InputError("target: kind must be 'euclidean' or 'hyperbolic'");
  }
  try {
    t.validate();
  } catch (const std::invalid_argument& e) {
    throw InputError(std::string("target: ") + e.what());
  }
  return t;
}

json map_to_json(const GridMap& f) {
  json j;
  j["grid"] = domain_to_json(f.domain);
  j["target"] = target_to_json(f.target);
  json v = json::array();
  for (std::size_t k = 0; k < f.values.size(); ++k) {
    if (f.domain.active(f.domain.col(k), f.domain.row(k))) v.push_back(point_to_json(f.values[k]));
    else v.push_back(nullptr);
  }
  j["values"] = std::move(v);
  return j;
}

GridMap map_from_json(const json& j) {
  Parsed p = parse_values(j);
  GridMap f(p.domain, p.target);
  for (std::size_t k = 0; k < p.values.size(); ++k) {
    const bool on = p.domain.active(p.domain.col(k), p.domain.row(k));
    if (!p.values[k]) {
      if (on) throw InputError("values[" + std::to_string(k) + "]: null at an active node");
      continue;
    }
    f.values[k] = *p.values[k];
  }
  return f;
}

json boundary_to_json(const BoundaryData& b) {
  json j;
  j["grid"] = domain_to_json(b.domain);
  j["target"] = target_to_json(b.target);
  json v = json::array();
  for (std::size_t k = 0; k < b.values.size(); ++k) {
    const bool on = b.domain.boundary(b.domain.col(k), b.domain.row(k));
    if (on && b.values[k]) v.push_back(point_to_json(*b.values[k]));
    else v.push_back(nullptr);
  }
  j["values"] = std::move(v);
  return j;
}

BoundaryData boundary_from_json(const json& j) {
  Parsed p = parse_values(j);
  BoundaryData b{p.domain, p.target, {}};
  b.values.resize(p.values.size());
  for (std::size_t k = 0; k < p.values.size(); ++k)
    if (p.domain.boundary(p.domain.col(k), p.domain.row(k))) b.values[k] = p.values[k];
  try {
    b.require_complete();
  } catch (const std::invalid_argument& e) {
    throw InputError(std::string("boundary: ") + e.what());
  }
  return b;
}

json outcome_to_json(const SolveOutcome& o) {
  json j;
  j["converged"] = o.converged;
  j["iterations"] = o.iterations;
  j["final_residual"] = o.final_residual;
  j["message"] = o.message;
  j["volume_history"] = o.volume_history;
  j["map"] = map_to_json(o.map);
  return j;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError("'" + path + "': " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << content;
    out.flush();
    if (!out) {
      std::remove(tmp.c_str());
      throw std::runtime_error("write failed for '" + path + "'");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::remove(tmp.c_str());
    throw std::runtime_error("cannot write '" + path + "': " + ec.message());
  }
}

GridMap read_map(const std::string& path) { return map_from_json(read_json_file(path)); }

void write_map(const std::string& path, const GridMap& f) {
  write_text_file(path, map_to_json(f).dump(1) + "\n");
}

BoundaryData read_boundary(const std::string& path) {
  return boundary_from_json(read_json_file(path));
}

void write_boundary(const std::string& path, const BoundaryData& b) {
  write_text_file(path, boundary_to_json(b).dump(1) + "\n");
}

CsvWriter::CsvWriter(std::ostream& out, std::vector<std::string> header)
    : out_(out), columns_(header.size()) {
  if (header.empty()) throw std::logic_error("CSV header must not be empty");
  for (const auto& h : header) cell(h);
  end_row();
}

void CsvWriter::cell(const std::string& s) {
  if (filled_ > 0) out_ << ',';
  if (s.find_first_of(",\"\n") != std::string::npos) {
    out_ << '"';
    for (char c : s) {
      if (c == '"') out_ << '"';
      out_ << c;
    }
    out_ << '"';
  } else {
    out_ << s;
  }
  ++filled_;
}

CsvWriter& CsvWriter::operator<<(double x) {
  cell(format_double(x));
  return *this;
}

CsvWriter& CsvWriter::operator<<(long long x) {
  cell(std::to_string(x));
  return *this;
}

CsvWriter& CsvWriter::operator<<(const std::string& s) {
  cell(s);
  return *this;
}

void CsvWriter::end_row() {
  if (filled_ != columns_)
    throw std::logic_error("CSV row has " + std::to_string(filled_) + " cells, header has " +
                           std::to_string(columns_));
  out_ << '\n';
  filled_ = 0;
}

}  // namespace mgl
