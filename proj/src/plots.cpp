#include "mgl/plots.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "mgl/io.hpp"
#include "mgl/util.hpp"

namespace mgl {

namespace {

constexpr double kW = 640, kH = 400, kL = 70, kR = 20, kT = 40, kB = 50;

std::string fixed(double x, int digits = 2) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::fixed, digits);
  return std::string(buf, res.ptr);
}

std::string tick(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 4);
  return std::string(buf, res.ptr);
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::pair<double, double> padded_range(double lo, double hi) {
  if (!std::isfinite(lo) || !std::isfinite(hi)) return {0.0, 1.0};
  if (hi - lo < 1e-12 * std::max(1.0, std::abs(hi))) {
    const double pad = std::max(1e-3, 0.05 * std::abs(hi));
    return {lo - pad, hi + pad};
  }
  const double pad = 0.05 * (hi - lo);
  return {lo - pad, hi + pad};
}

}  // namespace

std::string svg_line_plot(const std::string& title, const std::string& xlabel,
                          const std::string& ylabel, const std::vector<Series>& series) {
  if (series.empty()) throw std::invalid_argument("plot needs at least one series");
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (const auto& s : series) {
    if (s.x.size() != s.y.size()) throw std::invalid_argument("series x/y length mismatch");
    for (std::size_t k = 0; k < s.x.size(); ++k) {
      if (!std::isfinite(s.x[k]) || !std::isfinite(s.y[k])) continue;
      x0 = std::min(x0, s.x[k]);
      x1 = std::max(x1, s.x[k]);
      y0 = std::min(y0, s.y[k]);
      y1 = std::max(y1, s.y[k]);
    }
  }
  std::tie(x0, x1) = padded_range(x0, x1);
  std::tie(y0, y1) = padded_range(y0, y1);
  const double pw = kW - kL - kR, ph = kH - kT - kB;
  auto px = [&](double x) { return kL + (x - x0) / (x1 - x0) * pw; };
  auto py = [&](double y) { return kT + (1.0 - (y - y0) / (y1 - y0)) * ph; };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
    << "\" viewBox=\"0 0 " << kW << ' ' << kH << "\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << kW / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
    << escape(title) << "</text>\n";
  o << "<rect x=\"" << kL << "\" y=\"" << kT << "\" width=\"" << pw << "\" height=\"" << ph
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = x0 + (x1 - x0) * k / 4.0, yv = y0 + (y1 - y0) * k / 4.0;
    o << "<text x=\"" << fixed(px(xv)) << "\" y=\"" << fixed(kT + ph + 16)
      << "\" text-anchor=\"middle\" font-size=\"11\">" << tick(xv) << "</text>\n";
    o << "<text x=\"" << fixed(kL - 6) << "\" y=\"" << fixed(py(yv) + 4)
      << "\" text-anchor=\"end\" font-size=\"11\">" << tick(yv) << "</text>\n";
  }
  o << "<text x=\"" << kL + pw / 2 << "\" y=\"" << kH - 10
    << "\" text-anchor=\"middle\" font-size=\"12\">" << escape(xlabel) << "</text>\n";
  o << "<text x=\"14\" y=\"" << kT + ph / 2 << "\" text-anchor=\"middle\" font-size=\"12\" "
    << "transform=\"rotate(-90 14 " << kT + ph / 2 << ")\">" << escape(ylabel) << "</text>\n";
  for (std::size_t s = 0; s < series.size(); ++s) {
    const auto& sr = series[s];
    o << "<polyline fill=\"none\" stroke=\"" << escape(sr.color) << "\" stroke-width=\"1.5\"";
    if (sr.dashed) o << " stroke-dasharray=\"5,3\"";
    o << " points=\"";
    bool first = true;
    for (std::size_t k = 0; k < sr.x.size(); ++k) {
      if (!std::isfinite(sr.x[k]) || !std::isfinite(sr.y[k])) continue;
      if (!first) o << ' ';
      o << fixed(px(sr.x[k])) << ',' << fixed(py(sr.y[k]));
      first = false;
    }
    o << "\"/>\n";
    const double ly = kT + 14 + 14.0 * s;
    o << "<text x=\"" << fixed(kL + pw - 8) << "\" y=\"" << fixed(ly)
      << "\" text-anchor=\"end\" font-size=\"11\" fill=\"" << escape(sr.color) << "\">"
      << escape(sr.label) << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

VariationTable variation_table(const HomotopyTrace& trace) {
  VariationTable t;
  t.profile = area_derivatives(trace);
  t.reports.resize(trace.samples());
  parallel_for(trace.samples(),
               [&](std::size_t s) { t.reports[s] = second_variation_terms(trace, s); });
  return t;
}

void write_variation_csv(const VariationTable& table, std::ostream& out) {
  CsvWriter csv(out, {"t", "A", "dA", "d2A_analytic", "d2A_fd", "term_i", "term_ii", "term_iii",
                      "term_iv", "term_v"});
  const auto& p = table.profile;
  for (std::size_t s = 0; s < table.reports.size(); ++s) {
    const auto& r = table.reports[s];
    csv << p.t[s] << p.area[s] << p.d_area[s] << r.terms.total() << p.d2_area_fd[s] << r.terms.i
        << r.terms.ii << r.terms.iii << r.terms.iv << r.terms.v;
    csv.end_row();
  }
}

namespace {

std::vector<std::string> write_all(const std::vector<std::pair<std::string, std::string>>& files) {
  std::vector<std::string> written;
  try {
    for (const auto& [path, content] : files) {
      write_text_file(path, content);
      written.push_back(path);
    }
  } catch (...) {
    for (const auto& p : written) std::remove(p.c_str());
    throw;
  }
  return written;
}

}  // namespace

std::vector<std::string> emit_homotopy_plots(const HomotopyTrace& trace,
                                             const std::vector<std::size_t>& nodes,
                                             const std::string& prefix) {
  if (trace.samples() == 0 || trace.nodes() == 0) throw std::invalid_argument("empty trace");
  std::vector<std::pair<std::string, std::string>> files;
  std::ostringstream csv;
  write_trace_csv(trace, csv);
  files.emplace_back(prefix + "_trace.csv", csv.str());
  const std::size_t last = trace.samples() - 1;
  static const char* colors[] = {"#1f77b4", "#d62728"};
  for (std::size_t node : nodes) {
    if (node >= trace.nodes() || !trace.active(node))
      throw std::invalid_argument("plot node " + std::to_string(node) + " is not active");
    std::vector<Series> series;
    for (int i = 0; i < kSourceDim; ++i) {
      Series s{"lambda" + std::to_string(i + 1) + "^2", trace.t, {}, colors[i], false};
      Series mu{"mu" + std::to_string(i + 1), trace.t, {}, colors[i], true};
      for (std::size_t k = 0; k <= last; ++k) {
        s.y.push_back(trace.spectra[k][node][i]);
        const double a = trace.t[k];
        mu.y.push_back((1.0 - a) * trace.spectra[0][node][i] + a * trace.spectra[last][node][i]);
      }
      series.push_back(std::move(s));
      series.push_back(std::move(mu));
    }
    const auto& d = trace.f0.domain;
    const std::string tag = std::to_string(d.col(node)) + "_" + std::to_string(d.row(node));
    files.emplace_back(prefix + "_node_" + tag + ".svg",
                       svg_line_plot("squared singular values at node (" + std::to_string(d.col(node)) +
                                         ", " + std::to_string(d.row(node)) + ")",
                                     "t", "lambda^2", series));
  }
  return write_all(files);
}

std::vector<std::string> emit_variation_plots(const VariationTable& table,
                                              const std::string& prefix) {
  if (table.reports.empty()) throw std::invalid_argument("empty variation report");
  const auto& p = table.profile;
  std::ostringstream csv;
  write_variation_csv(table, csv);

  // Cumulative stack of the five terms, then the finite-difference overlay.
  static const char* names[] = {"(i)", "(ii)", "(iii)", "(iv)", "(v)"};
  static const char* colors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#9467bd", "#8c564b"};
  std::vector<Series> stack;
  std::vector<double> acc(table.reports.size(), 0.0);
  for (int term = 0; term < 5; ++term) {
    Series s{"up to " + std::string(names[term]), p.t, {}, colors[term], false};
    for (std::size_t k = 0; k < table.reports.size(); ++k) {
      const auto& t = table.reports[k].terms;
      const double v[] = {t.i, t.ii, t.iii, t.iv, t.v};
      acc[k] += v[term];
      s.y.push_back(acc[k]);
    }
    stack.push_back(std::move(s));
  }
  stack.push_back({"finite difference", p.t, p.d2_area_fd, "#000000", true});

  std::vector<std::pair<std::string, std::string>> files{
      {prefix + "_variation.csv", csv.str()},
      {prefix + "_terms.svg", svg_line_plot("second variation terms", "t", "d2A/dt2", stack)},
      {prefix + "_area.svg",
       svg_line_plot("graph volume", "t", "A", {{"A(t)", p.t, p.area, "#1f77b4", false}})},
  };
  return write_all(files);
}

}  // namespace mgl
