#include "fogpss/trace_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fogpss {

namespace {

void append_number(std::string& out, double v) {
  char buf[32];
  const int n = std::snprintf(buf, sizeof buf, "%.12g", v);
  out.append(buf, static_cast<std::size_t>(n));
}

double parse_field(std::string_view s, std::size_t row) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw std::runtime_error("trace CSV row " + std::to_string(row) + ": bad number '" + std::string(s) + "'");
  }
  return v;
}

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// Roughly five ticks at 1, 2 or 5 times a power of ten.
std::vector<double> ticks(double lo, double hi) {
  const double span = hi - lo;
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    step = m * mag;
    if (step >= raw) break;
  }
  std::vector<double> out;
  for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * span; v += step) {
    out.push_back(std::abs(v) < 1e-12 * span ? 0.0 : v);
  }
  return out;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

}  // namespace

double round_to_csv(double value) {
  std::string s;
  append_number(s, value);
  return parse_field(s, 0);
}

std::string format_trace_csv(const SimTrace& trace) {
  const std::size_t n = trace.rows();
  for (const auto* col : {&trace.x, &trace.x_d, &trace.x_e, &trace.xe_tilde, &trace.u}) {
    if (col->size() != n) throw std::invalid_argument("trace columns differ in length");
  }
  std::string out = kTraceHeader;
  out += '\n';
  out.reserve(out.size() + n * 6 * 20);
  for (std::size_t i = 0; i < n; ++i) {
    append_number(out, trace.t[i]);
    for (const auto* col : {&trace.x, &trace.x_d, &trace.x_e, &trace.xe_tilde, &trace.u}) {
      out += ',';
      append_number(out, (*col)[i]);
    }
    out += '\n';
  }
  return out;
}

SimTrace parse_trace_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kTraceHeader) {
    throw std::runtime_error(std::string("trace CSV: header must be exactly '") + kTraceHeader + "'");
  }
  SimTrace trace;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::vector<double> fields;
    std::size_t start = 0;
    while (true) {
      const auto comma = line.find(',', start);
      const auto end = comma == std::string::npos ? line.size() : comma;
      fields.push_back(parse_field(std::string_view(line).substr(start, end - start), row));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (fields.size() != 6) {
      throw std::runtime_error("trace CSV row " + std::to_string(row) + ": expected 6 fields");
    }
    trace.t.push_back(fields[0]);
    trace.x.push_back(fields[1]);
    trace.x_d.push_back(fields[2]);
    trace.x_e.push_back(fields[3]);
    trace.xe_tilde.push_back(fields[4]);
    trace.u.push_back(fields[5]);
  }
  return trace;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

void write_trace_csv(const std::filesystem::path& path, const SimTrace& trace) {
  write_text_file(path, format_trace_csv(trace));
}

SimTrace read_trace_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_trace_csv(buf.str());
}

std::string render_svg(const LinePlot& plot) {
  constexpr double W = 720, H = 360, left = 70, right = 20, top = 40, bottom = 50;
  constexpr const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};
  if (plot.x.empty()) throw std::invalid_argument("render_svg: empty plot");

  double x_lo = plot.x.front(), x_hi = plot.x.back();
  double y_lo = 0.0, y_hi = 0.0;
  bool first = true;
  auto widen = [&](double v) {
    if (!std::isfinite(v)) return;
    if (first) {
      y_lo = y_hi = v;
      first = false;
    }
    y_lo = std::min(y_lo, v);
    y_hi = std::max(y_hi, v);
  };
  for (const auto& s : plot.series) {
    if (s.y.size() != plot.x.size()) throw std::invalid_argument("render_svg: series length mismatch");
    for (double v : s.y) widen(v);
  }
  for (double g : plot.guides) widen(g);
  if (x_hi <= x_lo) x_hi = x_lo + 1.0;
  if (y_hi - y_lo < 1e-12) {
    y_lo -= 1.0;
    y_hi += 1.0;
  }
  const double pad = 0.05 * (y_hi - y_lo);
  y_lo -= pad;
  y_hi += pad;

  const double pw = W - left - right, ph = H - top - bottom;
  auto px = [&](double x) { return left + (x - x_lo) / (x_hi - x_lo) * pw; };
  auto py = [&](double y) { return top + (y_hi - y) / (y_hi - y_lo) * ph; };

  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
     << "\" viewBox=\"0 0 " << W << ' ' << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
     << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
     << escape_xml(plot.title) << "</text>\n";

  for (double v : ticks(x_lo, x_hi)) {
    os << "<line x1=\"" << px(v) << "\" y1=\"" << top << "\" x2=\"" << px(v) << "\" y2=\"" << top + ph
       << "\" stroke=\"#eee\"/>\n"
       << "<text x=\"" << px(v) << "\" y=\"" << top + ph + 16 << "\" text-anchor=\"middle\">" << fmt(v)
       << "</text>\n";
  }
  for (double v : ticks(y_lo, y_hi)) {
    os << "<line x1=\"" << left << "\" y1=\"" << py(v) << "\" x2=\"" << left + pw << "\" y2=\"" << py(v)
       << "\" stroke=\"#eee\"/>\n"
       << "<text x=\"" << left - 6 << "\" y=\"" << py(v) + 4 << "\" text-anchor=\"end\">" << fmt(v)
       << "</text>\n";
  }
  os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
     << "\" fill=\"none\" stroke=\"black\"/>\n"
     << "<text x=\"" << left + pw / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">"
     << escape_xml(plot.x_label) << "</text>\n"
     << "<text x=\"16\" y=\"" << top + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
     << top + ph / 2 << ")\">" << escape_xml(plot.y_label) << "</text>\n";

  for (double g : plot.guides) {
    os << "<line x1=\"" << left << "\" y1=\"" << py(g) << "\" x2=\"" << left + pw << "\" y2=\"" << py(g)
       << "\" stroke=\"#888\" stroke-dasharray=\"6 4\"/>\n";
  }

  os.precision(6);
  for (std::size_t s = 0; s < plot.series.size(); ++s) {
    const auto& series = plot.series[s];
    os << "<polyline fill=\"none\" stroke-width=\"1.2\" stroke=\"" << colors[s % 4] << "\" points=\"";
    for (std::size_t i = 0; i < plot.x.size(); ++i) {
      if (!std::isfinite(series.y[i])) continue;
      os << px(plot.x[i]) << ',' << py(series.y[i]) << ' ';
    }
    os << "\"/>\n";
    if (!series.label.empty()) {
      const double ly = top + 14 + 16 * static_cast<double>(s);
      os << "<line x1=\"" << left + pw - 120 << "\" y1=\"" << ly - 4 << "\" x2=\"" << left + pw - 100
         << "\" y2=\"" << ly - 4 << "\" stroke=\"" << colors[s % 4] << "\"/>\n"
         << "<text x=\"" << left + pw - 95 << "\" y=\"" << ly << "\">" << escape_xml(series.label)
         << "</text>\n";
    }
  }
  os << "</svg>\n";
  return os.str();
}

void write_svg(const std::filesystem::path& path, const LinePlot& plot) {
  write_text_file(path, render_svg(plot));
}

}  // namespace fogpss
