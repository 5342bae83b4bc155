#include "mgl/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <charconv>
#include <fstream>
#include <optional>
#include <sstream>

#include "mgl/homotopy.hpp"
#include "mgl/io.hpp"
#include "mgl/majorization.hpp"
#include "mgl/plots.hpp"
#include "mgl/samples.hpp"
#include "mgl/solver.hpp"
#include "mgl/variation.hpp"

namespace mgl {

namespace {

struct Config {
  std::vector<std::string> inputs;
  std::vector<std::string> positional;
  std::string boundary;
  std::string output;
  std::string format = "json";
  std::string region;
  std::string grid = "17,17";
  std::string target = "euclidean:2";
  std::string demo;
  std::optional<int> m;
  std::optional<int> samples;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  int t_samples = 33;
  bool squared = false;
  bool random_pair = false;
};

std::vector<double> parse_numbers(const std::string& text, const std::string& where) {
  std::vector<double> v;
  std::string item;
  std::string norm = text;
  std::replace(norm.begin(), norm.end(), ',', ' ');
  std::istringstream is(norm);
  while (is >> item) {
    double x = 0.0;
    auto res = std::from_chars(item.data(), item.data() + item.size(), x);
    if (res.ec != std::errc() || res.ptr != item.data() + item.size())
      throw InputError(where + ": not a number '" + item + "'");
    v.push_back(x);
  }
  if (v.empty()) throw InputError(where + ": no values");
  return v;
}

/// Non-empty, non-comment lines with their 1-based line numbers.
std::vector<std::pair<int, std::string>> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::vector<std::pair<int, std::string>> lines;
  std::string line;
  int no = 0;
  while (std::getline(in, line)) {
    ++no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    lines.emplace_back(no, line);
  }
  return lines;
}

void emit(const Config& c, const std::string& content, std::ostream& out) {
  if (c.output.empty()) out << content;
  else write_text_file(c.output, content);
}

GridDomain parse_grid(const std::string& text) {
  const auto v = parse_numbers(text, "--grid");
  if (v.size() != 2 || v[0] != std::floor(v[0]) || v[1] != std::floor(v[1]))
    throw InputError("--grid expects nx,ny");
  return GridDomain::unit_square(static_cast<int>(v[0]), static_cast<int>(v[1]));
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ";" : "") + format_double(v[i]);
  return s;
}

json verdict_json(const RegionVerdict& v) {
  json j;
  j["member"] = v.member;
  j["on_boundary"] = v.on_boundary;
  j["margin"] = v.margin;
  j["out_of_scope"] = v.out_of_scope;
  return j;
}

// ---------------------------------------------------------------- region

int cmd_region(const Config& c, std::ostream& out) {
  const Region region = Region::parse(c.region.empty() ? "N" : c.region);
  std::ostringstream os;
  const bool map_mode = !c.inputs.empty() && c.inputs[0].size() > 5 &&
                        c.inputs[0].substr(c.inputs[0].size() - 5) == ".json";
  if (map_mode) {
    const GridMap f = read_map(c.inputs[0]);
    const RegionField field = region_field(f, region);
    const auto& d = f.domain;
    if (c.format == "csv") {
      CsvWriter csv(os, {"node_i", "node_j", "lambda1_sq", "lambda2_sq", "member", "on_boundary",
                         "margin", "out_of_scope"});
      for (std::size_t k = 0; k < d.size(); ++k) {
        if (!d.active(d.col(k), d.row(k))) continue;
        const auto& v = field.verdicts[k];
        csv << d.col(k) << d.row(k) << field.spectra[k][0] << field.spectra[k][1]
            << int(v.member) << int(v.on_boundary) << v.margin << int(v.out_of_scope);
        csv.end_row();
      }
    } else {
      json j;
      j["region"] = region.name();
      j["all_member"] = field.all_member;
      j["min_margin"] = field.min_margin;
      j["non_members"] = field.non_members;
      json nodes = json::array();
      for (std::size_t k = 0; k < d.size(); ++k) {
        if (!d.active(d.col(k), d.row(k))) continue;
        json n = verdict_json(field.verdicts[k]);
        n["node"] = {d.col(k), d.row(k)};
        n["lambda_sq"] = field.spectra[k].values();
        nodes.push_back(std::move(n));
      }
      j["nodes"] = std::move(nodes);
      os << j.dump(1) << '\n';
    }
    emit(c, os.str(), out);
    return 0;
  }

  std::vector<std::pair<std::string, std::vector<double>>> rows;
  for (const auto& p : c.positional) rows.emplace_back("arg '" + p + "'", parse_numbers(p, "arg '" + p + "'"));
  for (const auto& path : c.inputs)
    for (const auto& [no, line] : read_lines(path))
      rows.emplace_back(path + ":" + std::to_string(no),
                        parse_numbers(line, path + ": line " + std::to_string(no)));
  if (rows.empty()) throw InputError("region: no spectra given (--input or positional values)");

  json table = json::array();
  std::optional<CsvWriter> csv;
  if (c.format == "csv")
    csv.emplace(os, std::vector<std::string>{"source", "values", "lambda_sq", "region", "member",
                                             "on_boundary", "margin", "out_of_scope"});
  for (const auto& [where, vals] : rows) {
    if (c.m && static_cast<int>(vals.size()) != *c.m)
      throw InputError(where + ": expected " + std::to_string(*c.m) + " values");
    SquaredSpectrum a;
    try {
      a = c.squared ? SquaredSpectrum(vals) : SquaredSpectrum::from_spectrum(Spectrum(vals));
    } catch (const std::invalid_argument& e) {
      throw InputError(where + ": " + e.what());
    }
    const RegionVerdict v = region(a);
    if (csv) {
      *csv << where << join(vals) << join(a.values()) << region.name() << int(v.member)
           << int(v.on_boundary) << v.margin << int(v.out_of_scope);
      csv->end_row();
    } else {
      json r = verdict_json(v);
      r["source"] = where;
      r["values"] = vals;
      r["lambda_sq"] = a.values();
      r["region"] = region.name();
      if (v.out_of_scope) r["flag"] = "out-of-theorem-scope";
      table.push_back(std::move(r));
    }
  }
  if (!csv) os << table.dump(1) << '\n';
  emit(c, os.str(), out);
  return 0;
}

// -------------------------------------------------------------- majorize

int cmd_majorize(const Config& c, std::ostream& out) {
  std::ostringstream os;
  const Region region = Region::parse(c.region.empty() ? "N" : c.region);

  if (c.m && c.positional.empty() && c.inputs.empty()) {
    // Random agreement check between partial sums and hull membership.
    if (*c.m < 1 || static_cast<std::size_t>(*c.m) > kMaxExtremeDim)
      throw InputError("--m must be in 1.." + std::to_string(kMaxExtremeDim));
    Rng rng(c.seed.value_or(1));
    std::vector<double> x(*c.m);
    for (auto& v : x) v = rng.uniform(0.0, 2.0);
    RandomSampling rs;
    rs.count = static_cast<std::size_t>(c.samples.value_or(1000));
    rs.upper = *std::max_element(x.begin(), x.end()) + 0.2;
    rs.seed = c.seed.value_or(1);
    const MirskyReport r = mirsky_agreement(NonNegVector(x), rs);
    json j;
    j["x"] = x;
    j["samples"] = r.samples;
    j["disagreements"] = r.disagreements;
    j["in_band"] = r.in_band;
    os << j.dump(1) << '\n';
    emit(c, os.str(), out);
    return 0;
  }

  if (c.samples) {
    if (c.positional.size() != 1) throw InputError("majorize --samples expects one vector x");
    const auto x = parse_numbers(c.positional[0], "x");
    NonNegVector xv;
    try {
      xv = NonNegVector(x);
    } catch (const std::invalid_argument& e) {
      throw InputError(std::string("x: ") + e.what());
    }
    Rng rng(c.seed.value_or(1));
    const auto ys = sample_W(xv, static_cast<std::size_t>(*c.samples), rng);
    std::vector<std::string> header;
    for (std::size_t i = 1; i <= x.size(); ++i) header.push_back("y" + std::to_string(i));
    header.insert(header.end(), {"slack", "region", "member", "margin"});
    CsvWriter csv(os, header);
    for (const auto& y : ys) {
      for (double v : y) csv << v;
      const RegionVerdict v = region(SquaredSpectrum(y));
      csv << majorization_slack(y, x, x.size()) << region.name() << int(v.member) << v.margin;
      csv.end_row();
    }
    emit(c, os.str(), out);
    return 0;
  }

  std::vector<std::pair<std::string, std::string>> rows;
  for (const auto& p : c.positional) rows.emplace_back("arg '" + p + "'", p);
  for (const auto& path : c.inputs)
    for (const auto& [no, line] : read_lines(path))
      rows.emplace_back(path + ": line " + std::to_string(no), line);
  if (rows.empty()) throw InputError("majorize: no 'x;y' pairs given");

  CsvWriter csv(os, {"source", "x", "y", "weakly_majorized", "in_hull", "hull_residual", "slack"});
  for (const auto& [where, text] : rows) {
    const auto semi = text.find(';');
    if (semi == std::string::npos) throw InputError(where + ": expected 'x1,x2,...;y1,y2,...'");
    const auto x = parse_numbers(text.substr(0, semi), where);
    const auto y = parse_numbers(text.substr(semi + 1), where);
    if (x.size() != y.size()) throw InputError(where + ": x and y differ in length");
    if (x.size() > kMaxExtremeDim)
      throw InputError(where + ": dimension above " + std::to_string(kMaxExtremeDim));
    NonNegVector xv, yv;
    try {
      xv = NonNegVector(x);
      yv = NonNegVector(y);
    } catch (const std::invalid_argument& e) {
      throw InputError(where + ": " + e.what());
    }
    double residual = 0.0;
    const bool hull = hull_contains(xv, yv, &residual);
    csv << where << join(x) << join(y) << int(weakly_majorized(y, x, x.size())) << int(hull)
        << residual << majorization_slack(y, x, x.size());
    csv.end_row();
  }
  emit(c, os.str(), out);
  return 0;
}

// ----------------------------------------------------------------- solve

BoundaryData load_boundary(const Config& c) {
  if (!c.boundary.empty()) return read_boundary(c.boundary);
  if (c.demo.empty()) throw InputError("need --boundary FILE or --demo NAME");
  ManifoldSpec t;
  try {
    t = ManifoldSpec::parse(c.target);
  } catch (const std::exception& e) {
    throw InputError(std::string("--target: ") + e.what());
  }
  return demo_boundary(c.demo, parse_grid(c.grid), t);
}

SolverOptions solver_options(const Config& c) {
  SolverOptions o;
  if (c.tol) o.tol_residual = *c.tol;
  if (c.seed) o.seed = *c.seed;
  o.validate();
  return o;
}

void check_boundary(const BoundaryData& b, const GridMap& f) {
  for (std::size_t k = 0; k < b.values.size(); ++k)
    if (b.values[k] && !(f.values[k] == *b.values[k]))
      throw InvariantError("solver modified boundary node " + std::to_string(k));
}

int cmd_solve(const Config& c, std::ostream& out) {
  const BoundaryData b = load_boundary(c);
  const SolverOptions opts = solver_options(c);
  GridMap init;
  if (!c.inputs.empty()) {
    init = read_map(c.inputs[0]);
    if (!(init.domain == b.domain) || !(init.target == b.target))
      throw InputError("initial map does not match the boundary grid/target");
  } else if (c.seed) {
    init = perturbed_initialization(b, 0.1 * data_scale(b), *c.seed);
  } else {
    init = harmonic_extension(b);
  }
  const SolveOutcome o = solve_minimal(b, init, opts);
  check_boundary(b, o.map);
  std::ostringstream os;
  if (c.format == "csv") {
    CsvWriter csv(os, {"iteration", "volume"});
    for (std::size_t k = 0; k < o.volume_history.size(); ++k) {
      csv << k << o.volume_history[k];
      csv.end_row();
    }
    out << os.str();
  } else {
    json j;
    j["converged"] = o.converged;
    j["iterations"] = o.iterations;
    j["final_residual"] = o.final_residual;
    j["volume"] = graph_volume(o.map);
    j["message"] = o.message;
    out << j.dump(1) << '\n';
  }
  if (!c.output.empty()) write_text_file(c.output, outcome_to_json(o).dump(1) + "\n");
  return 0;
}

// -------------------------------------------------------------- homotopy

MapPair load_pair(const Config& c) {
  if (c.random_pair) {
    ManifoldSpec t;
    try {
      t = ManifoldSpec::parse(c.target);
    } catch (const std::exception& e) {
      throw InputError(std::string("--target: ") + e.what());
    }
    return random_map_pair(parse_grid(c.grid), t, c.seed.value_or(1));
  }
  if (c.inputs.size() != 2) throw InputError("need two --input map files (or --random)");
  MapPair p{read_map(c.inputs[0]), read_map(c.inputs[1])};
  if (!(p.f0.domain == p.f1.domain) || !(p.f0.target == p.f1.target))
    throw InputError("input maps differ in grid or target");
  if (boundary_distance(p.f0, p.f1) > 1e-10)
    throw InputError("input maps have different boundary values");
  return p;
}

HomotopyTrace load_trace(const Config& c) {
  if (c.t_samples < 4) throw InputError("--t-samples must be at least 4");
  const MapPair p = load_pair(c);
  return build_homotopy(p.f0, p.f1, uniform_samples(c.t_samples));
}

int cmd_homotopy(const Config& c, std::ostream& out) {
  const HomotopyTrace tr = load_trace(c);
  const Region region = Region::parse(c.region.empty() ? "C_m" : c.region);
  const std::size_t last = tr.samples() - 1;
  json j;
  j["t_samples"] = tr.samples();
  j["max_spectrum"] = tr.max_spectrum();
  json dom = json::array();
  std::size_t worst = 0;
  double worst_excess = -INFINITY;
  for (int l = 1; l <= kSourceDim; ++l) {
    const DominationReport r = partial_sum_domination(tr, l, 0, last, c.tol.value_or(-1.0));
    dom.push_back({{"l", l},
                   {"checks", r.checks},
                   {"violations", r.violations},
                   {"worst_excess", r.worst_violation},
                   {"worst_node", {tr.f0.domain.col(r.worst_node), tr.f0.domain.row(r.worst_node)}},
                   {"worst_t", r.worst_t},
                   {"tolerance", r.tolerance}});
    if (r.worst_violation > worst_excess) {
      worst_excess = r.worst_violation;
      worst = r.worst_node;
    }
  }
  j["domination"] = std::move(dom);
  json conv = json::array();
  for (int k = 1; k <= kSourceDim; ++k) {
    const ConvexityReport r = fk_convexity(tr, k);
    conv.push_back({{"k", k},
                    {"min_second_difference", r.min_second_difference},
                    {"max_F", r.max_F},
                    {"tolerance", r.tolerance},
                    {"violations", r.violations}});
  }
  j["convexity"] = std::move(conv);
  const ConfinementTraceReport cr = confinement_check(tr, region);
  j["confinement"] = {{"region", region.name()},
                      {"nodes", cr.nodes},
                      {"hypothesis_met", cr.hypothesis_met},
                      {"hypothesis_unmet", cr.hypothesis_unmet},
                      {"violations", cr.violations},
                      {"degenerate_boundary_nodes", cr.degenerate_boundary_nodes},
                      {"status", cr.status}};
  if (!c.output.empty()) {
    const auto& d = tr.f0.domain;
    std::vector<std::size_t> nodes{d.index(d.nx / 2, d.ny / 2)};
    if (worst != nodes[0]) nodes.push_back(worst);
    j["files"] = emit_homotopy_plots(tr, nodes, c.output);
  }
  if (c.format == "csv") {
    write_trace_csv(tr, out);
  } else {
    out << j.dump(1) << '\n';
  }
  return 0;
}

// ------------------------------------------------------------- variation

int cmd_variation(const Config& c, std::ostream& out) {
  const HomotopyTrace tr = load_trace(c);
  const VariationTable table = variation_table(tr);
  if (c.format == "csv") {
    write_variation_csv(table, out);
  } else {
    json rows = json::array();
    for (const auto& r : table.reports) {
      json s = json::array();
      for (const auto& chk : sign_report(r, c.tol.value_or(1e-8)))
        s.push_back({{"name", chk.name},
                     {"value", chk.value},
                     {"threshold", chk.threshold},
                     {"status", to_string(chk.status)}});
      rows.push_back({{"t", r.t},
                      {"area", r.area},
                      {"term_i", r.terms.i},
                      {"term_ii", r.terms.ii},
                      {"term_iii", r.terms.iii},
                      {"term_iv", r.terms.iv},
                      {"term_v", r.terms.v},
                      {"total", r.terms.total()},
                      {"direct_total", r.direct_total},
                      {"fd_total", r.fd_total},
                      {"fd_time_error", r.fd_time_error},
                      {"outside_N", r.outside_N},
                      {"pairwise_violations", r.pairwise_violations},
                      {"signs", std::move(s)}});
    }
    json j;
    j["reports"] = std::move(rows);
    out << j.dump(1) << '\n';
  }
  if (!c.output.empty()) emit_variation_plots(table, c.output);
  return 0;
}

// ------------------------------------------------------------ uniqueness

int cmd_uniqueness(const Config& c, std::ostream& out) {
  const BoundaryData b = load_boundary(c);
  const Region region = Region::parse(c.region.empty() ? "slope_sqrt3" : c.region);
  const SolverOptions opts = solver_options(c);
  const int runs = c.samples.value_or(2);
  if (runs < 2) throw InputError("uniqueness needs at least 2 runs (--samples)");
  const UniquenessReport r = uniqueness_experiment(b, region, opts, runs);
  for (const auto& s : r.solutions) check_boundary(b, s);
  json j;
  j["region"] = region.name();
  j["in_region"] = r.in_region;
  j["max_pair_distance"] = r.max_pair_distance;
  j["conclusion"] = r.conclusion;
  json rs = json::array();
  for (const auto& run : r.runs)
    rs.push_back({{"converged", run.converged},
                  {"iterations", run.iterations},
                  {"final_residual", run.final_residual},
                  {"in_region", run.in_region},
                  {"min_margin", run.min_margin},
                  {"non_members", run.non_members},
                  {"max_slope", run.max_slope}});
  j["runs"] = std::move(rs);
  const std::string text = j.dump(1) + "\n";
  out << text;
  if (!c.output.empty()) write_text_file(c.output, text);
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Numerical checks for minimal maps into non-positively curved targets", "mgl"};
  app.require_subcommand(1);
  Config c;

  auto common = [&](CLI::App* s) {
    s->add_option("--input", c.inputs, "Input file (repeat for two maps)");
    s->add_option("--output", c.output, "Output path or file prefix");
    s->add_option("--format", c.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    s->add_option("--region", c.region, "M, M_bar, N, C_m, V_m, slope_sqrt3");
    s->add_option("--seed", c.seed, "Random seed");
    s->add_option("--tol", c.tol, "Tolerance override");
  };
  auto grid_opts = [&](CLI::App* s) {
    s->add_option("--grid", c.grid, "nx,ny for generated data");
    s->add_option("--target", c.target, "euclidean:n or hyperbolic:n:kappa");
  };

  auto* region = app.add_subcommand("region", "Region verdicts for spectra or a map file");
  common(region);
  region->add_option("--m", c.m, "Expected spectrum length");
  region->add_flag("--squared", c.squared, "Values are squared singular values");
  region->add_option("values", c.positional, "Spectra such as 1,1");

  auto* majorize = app.add_subcommand("majorize", "Weak majorization and hull membership");
  common(majorize);
  majorize->add_option("--m", c.m, "Dimension for the random agreement check");
  majorize->add_option("--samples", c.samples, "Number of samples");
  majorize->add_option("pairs", c.positional, "'x;y' pairs, or one x with --samples");

  auto* solve = app.add_subcommand("solve", "Solve the Dirichlet problem");
  common(solve);
  grid_opts(solve);
  solve->add_option("--boundary", c.boundary, "Boundary data file");
  solve->add_option("--demo", c.demo, "affine, sine[:amp] or steep");

  auto* homotopy = app.add_subcommand("homotopy", "Geodesic homotopy spectra checks");
  common(homotopy);
  grid_opts(homotopy);
  homotopy->add_option("--t-samples", c.t_samples, "Number of t-samples");
  homotopy->add_flag("--random", c.random_pair, "Use a seeded random map pair");

  auto* variation = app.add_subcommand("variation", "Second variation decomposition");
  common(variation);
  grid_opts(variation);
  variation->add_option("--t-samples", c.t_samples, "Number of t-samples");
  variation->add_flag("--random", c.random_pair, "Use a seeded random map pair");

  auto* uniq = app.add_subcommand("uniqueness", "Multi-start uniqueness experiment");
  common(uniq);
  grid_opts(uniq);
  uniq->add_option("--boundary", c.boundary, "Boundary data file");
  uniq->add_option("--demo", c.demo, "affine, sine[:amp] or steep");
  uniq->add_option("--samples", c.samples, "Number of initializations");
  uniq->add_option("--m", c.m, "Unused; accepted for symmetry");

  std::vector<const char*> argv{"mgl"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    if (region->parsed()) return cmd_region(c, out);
    if (majorize->parsed()) return cmd_majorize(c, out);
    if (solve->parsed()) return cmd_solve(c, out);
    if (homotopy->parsed()) return cmd_homotopy(c, out);
    if (variation->parsed()) return cmd_variation(c, out);
    if (uniq->parsed()) return cmd_uniqueness(c, out);
  } catch (const InputError& e) {
    err << "input error: " << e.what() << '\n';
    return 2;
  } catch (const InvariantError& e) {
    err << "invariant violated: " << e.what() << '\n';
    return 3;
  } catch (const std::invalid_argument& e) {
    err << "input error: " << e.what() << '\n';
    return 2;
  } catch (const std::domain_error& e) {
    err << "input error: " << e.what() << '\n';
    return 2;
  } catch (const std::length_error& e) {
    err << "input error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return 3;
  }
  return 2;
}

}  // namespace mgl
