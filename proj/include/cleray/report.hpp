#ifndef CLERAY_REPORT_HPP_
#define CLERAY_REPORT_HPP_

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cleray/errors.hpp"
#include "cleray/fit.hpp"

namespace cleray {

using json = nlohmann::json;

/// One asserted (or reported-only) property.
struct Check {
  std::string name;
  bool asserted = true;
  bool pass = false;
  double value = std::numeric_limits<double>::quiet_NaN();
  double threshold = std::numeric_limits<double>::quiet_NaN();
  std::string detail;
};

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

/// A log-log series with its fitted slope, drawn in the SVG output.
struct Series {
  std::string name;
  std::string xlabel, ylabel;
  std::vector<double> x, y;
  double slope = std::numeric_limits<double>::quiet_NaN();
  double intercept = std::numeric_limits<double>::quiet_NaN();
};

struct Report {
  std::string experiment;
  std::string header;
  json config = json::object();
  std::vector<Check> checks;
  std::vector<Table> tables;
  std::vector<Series> series;

  bool passed() const {
    for (const auto& c : checks)
      if (c.asserted && !c.pass) return false;
    return true;
  }

  Check& check(std::string name, bool pass, double value = std::numeric_limits<double>::quiet_NaN(),
               double threshold = std::numeric_limits<double>::quiet_NaN(), std::string detail = {}, bool asserted = true) {
    checks.push_back({std::move(name), asserted, pass, value, threshold, std::move(detail)});
    return checks.back();
  }

  Series& add_series(std::string name, std::string xl, std::string yl, std::vector<double> x, std::vector<double> y) {
    const LinearFit f = fit_loglog(x, y);
    series.push_back({std::move(name), std::move(xl), std::move(yl), std::move(x), std::move(y), f.slope, f.intercept});
    return series.back();
  }
};

// NaN compares unequal to itself; reports compare field-by-field with NaN == NaN.
namespace detail {
inline bool same(double a, double b) { return a == b || (std::isnan(a) && std::isnan(b)); }
}  // namespace detail

inline bool same_numbers(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!detail::same(a[i], b[i])) return false;
  return true;
}

inline bool equivalent(const Report& a, const Report& b) {
  if (a.experiment != b.experiment || a.header != b.header || a.config != b.config) return false;
  if (a.checks.size() != b.checks.size() || a.tables.size() != b.tables.size() || a.series.size() != b.series.size()) return false;
  for (std::size_t i = 0; i < a.checks.size(); ++i) {
    const auto &x = a.checks[i], &y = b.checks[i];
    if (x.name != y.name || x.asserted != y.asserted || x.pass != y.pass || !detail::same(x.value, y.value) ||
        !detail::same(x.threshold, y.threshold) || x.detail != y.detail)
      return false;
  }
  for (std::size_t i = 0; i < a.tables.size(); ++i) {
    const auto &x = a.tables[i], &y = b.tables[i];
    if (x.name != y.name || x.columns != y.columns || x.rows.size() != y.rows.size()) return false;
    for (std::size_t r = 0; r < x.rows.size(); ++r)
      if (!same_numbers(x.rows[r], y.rows[r])) return false;
  }
  for (std::size_t i = 0; i < a.series.size(); ++i) {
    const auto &x = a.series[i], &y = b.series[i];
    if (x.name != y.name || x.xlabel != y.xlabel || x.ylabel != y.ylabel || !same_numbers(x.x, y.x) || !same_numbers(x.y, y.y) ||
        !detail::same(x.slope, y.slope) || !detail::same(x.intercept, y.intercept))
      return false;
  }
  return true;
}

// ---------------------------------------------------------------------------------------------
// JSON. Non-finite numbers are written as the strings "nan", "inf", "-inf".

inline json number_json(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

inline double number_from(const json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    throw ConfigError("not a number: " + s);
  }
  return j.get<double>();
}

inline json numbers_json(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(number_json(x));
  return a;
}

inline std::vector<double> numbers_from(const json& j) {
  std::vector<double> v;
  for (const auto& x : j) v.push_back(number_from(x));
  return v;
}

inline json to_json(const Report& r) {
  json j;
  j["experiment"] = r.experiment;
  j["header"] = r.header;
  j["config"] = r.config;
  j["passed"] = r.passed();
  j["checks"] = json::array();
  for (const auto& c : r.checks)
    j["checks"].push_back({{"name", c.name},
                           {"asserted", c.asserted},
                           {"pass", c.pass},
                           {"value", number_json(c.value)},
                           {"threshold", number_json(c.threshold)},
                           {"detail", c.detail}});
  j["tables"] = json::array();
  for (const auto& t : r.tables) {
    json rows = json::array();
    for (const auto& row : t.rows) rows.push_back(numbers_json(row));
    j["tables"].push_back({{"name", t.name}, {"columns", t.columns}, {"rows", rows}});
  }
  j["series"] = json::array();
  for (const auto& s : r.series)
    j["series"].push_back({{"name", s.name},
                           {"xlabel", s.xlabel},
                           {"ylabel", s.ylabel},
                           {"x", numbers_json(s.x)},
                           {"y", numbers_json(s.y)},
                           {"slope", number_json(s.slope)},
                           {"intercept", number_json(s.intercept)}});
  return j;
}

inline Report report_from_json(const json& j) {
  Report r;
  r.experiment = j.at("experiment").get<std::string>();
  r.header = j.at("header").get<std::string>();
  r.config = j.at("config");
  for (const auto& c : j.at("checks"))
    r.checks.push_back({c.at("name").get<std::string>(), c.at("asserted").get<bool>(), c.at("pass").get<bool>(), number_from(c.at("value")),
                        number_from(c.at("threshold")), c.at("detail").get<std::string>()});
  for (const auto& t : j.at("tables")) {
    Table tb{t.at("name").get<std::string>(), t.at("columns").get<std::vector<std::string>>(), {}};
    for (const auto& row : t.at("rows")) tb.rows.push_back(numbers_from(row));
    r.tables.push_back(std::move(tb));
  }
  for (const auto& s : j.at("series"))
    r.series.push_back({s.at("name").get<std::string>(), s.at("xlabel").get<std::string>(), s.at("ylabel").get<std::string>(),
                        numbers_from(s.at("x")), numbers_from(s.at("y")), number_from(s.at("slope")), number_from(s.at("intercept"))});
  return r;
}

/// Reports are written as one JSON array; an empty set gives "[]".
inline std::string reports_json(const std::vector<Report>& rs) {
  json a = json::array();
  for (const auto& r : rs) a.push_back(to_json(r));
  return a.dump(2) + "\n";
}

inline std::vector<Report> reports_from_json(const std::string& text) {
  std::vector<Report> out;
  for (const auto& j : json::parse(text)) out.push_back(report_from_json(j));
  return out;
}

// ---------------------------------------------------------------------------------------------
// CSV: one row per table cell, plus one row per check value.

inline constexpr const char* kCsvHeader = "experiment,table,row,column,value";

inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

inline std::string reports_csv(const std::vector<Report>& rs) {
  std::ostringstream os;
  os << kCsvHeader << "\n";
  for (const auto& r : rs) {
    for (const auto& t : r.tables)
      for (std::size_t i = 0; i < t.rows.size(); ++i)
        for (std::size_t c = 0; c < t.rows[i].size() && c < t.columns.size(); ++c)
          os << csv_field(r.experiment) << "," << csv_field(t.name) << "," << i << "," << csv_field(t.columns[c]) << ","
             << format_number(t.rows[i][c]) << "\n";
    for (std::size_t i = 0; i < r.checks.size(); ++i)
      os << csv_field(r.experiment) << ",checks," << i << "," << csv_field(r.checks[i].name) << "," << format_number(r.checks[i].value)
         << "\n";
  }
  return os.str();
}

// ---------------------------------------------------------------------------------------------
// SVG: one log-log panel per series with the fitted line and its slope.

inline std::string xml_escape(const std::string& s) {
  std::string o;
  for (char c : s) {
    if (c == '<') o += "&lt;";
    else if (c == '>') o += "&gt;";
    else if (c == '&') o += "&amp;";
    else o += c;
  }
  return o;
}

inline std::string reports_svg(const std::vector<Report>& rs) {
  std::vector<const Series*> ss;
  for (const auto& r : rs)
    for (const auto& s : r.series) ss.push_back(&s);
  constexpr int W = 420, H = 300, pad = 50;
  std::ostringstream os;
  os.precision(6);
  const int rows = static_cast<int>(ss.size());
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H * rows << "\" viewBox=\"0 0 " << W << " "
     << H * rows << "\">\n";
  for (int k = 0; k < rows; ++k) {
    const Series& s = *ss[k];
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i)
      if (s.x[i] > 0 && s.y[i] > 0 && std::isfinite(s.x[i]) && std::isfinite(s.y[i])) {
        lx.push_back(std::log10(s.x[i]));
        ly.push_back(std::log10(s.y[i]));
      }
    const int y0 = k * H;
    os << "<g>\n<rect x=\"0\" y=\"" << y0 << "\" width=\"" << W << "\" height=\"" << H << "\" fill=\"white\" stroke=\"#999\"/>\n";
    os << "<text x=\"" << pad << "\" y=\"" << y0 + 20 << "\" font-size=\"13\">" << xml_escape(s.name) << "</text>\n";
    os << "<text x=\"" << W / 2 << "\" y=\"" << y0 + H - 8 << "\" font-size=\"11\" text-anchor=\"middle\">log10 " << xml_escape(s.xlabel)
       << "</text>\n";
    os << "<text x=\"12\" y=\"" << y0 + H / 2 << "\" font-size=\"11\" transform=\"rotate(-90 12 " << y0 + H / 2 << ")\">log10 "
       << xml_escape(s.ylabel) << "</text>\n";
    os << "<line x1=\"" << pad << "\" y1=\"" << y0 + H - pad << "\" x2=\"" << W - 20 << "\" y2=\"" << y0 + H - pad
       << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << pad << "\" y1=\"" << y0 + 30 << "\" x2=\"" << pad << "\" y2=\"" << y0 + H - pad << "\" stroke=\"black\"/>\n";
    if (!lx.empty()) {
      double xmin = *std::min_element(lx.begin(), lx.end()), xmax = *std::max_element(lx.begin(), lx.end());
      double ymin = *std::min_element(ly.begin(), ly.end()), ymax = *std::max_element(ly.begin(), ly.end());
      if (xmax - xmin < 1e-12) xmax = xmin + 1;
      if (ymax - ymin < 1e-12) ymax = ymin + 1;
      auto px = [&](double v) { return pad + (v - xmin) / (xmax - xmin) * (W - pad - 30); };
      auto py = [&](double v) { return y0 + H - pad - (v - ymin) / (ymax - ymin) * (H - pad - 40); };
      for (std::size_t i = 0; i < lx.size(); ++i)
        os << "<circle cx=\"" << px(lx[i]) << "\" cy=\"" << py(ly[i]) << "\" r=\"3\" fill=\"#1f77b4\"/>\n";
      if (std::isfinite(s.slope)) {
        // fitted line in natural logs: ln y = c + slope ln x, i.e. the same slope in log10
        auto fy = [&](double v) { return (s.intercept / std::log(10.0)) + s.slope * v; };
        os << "<line x1=\"" << px(xmin) << "\" y1=\"" << py(fy(xmin)) << "\" x2=\"" << px(xmax) << "\" y2=\"" << py(fy(xmax))
           << "\" stroke=\"#d62728\" stroke-dasharray=\"4 3\"/>\n";
      }
      os << "<text x=\"" << W - 30 << "\" y=\"" << y0 + 20 << "\" font-size=\"12\" text-anchor=\"end\">slope = "
         << format_number(s.slope) << "</text>\n";
      os << "<text x=\"" << pad << "\" y=\"" << y0 + H - pad + 14 << "\" font-size=\"10\">" << xmin << "</text>\n";
      os << "<text x=\"" << W - 30 << "\" y=\"" << y0 + H - pad + 14 << "\" font-size=\"10\" text-anchor=\"end\">" << xmax << "</text>\n";
      os << "<text x=\"" << pad - 4 << "\" y=\"" << y0 + 36 << "\" font-size=\"10\" text-anchor=\"end\">" << ymax << "</text>\n";
      os << "<text x=\"" << pad - 4 << "\" y=\"" << y0 + H - pad << "\" font-size=\"10\" text-anchor=\"end\">" << ymin << "</text>\n";
    }
    os << "</g>\n";
  }
  os << "</svg>\n";
  return os.str();
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write " + path);
  f << text;
  if (!f) throw Error("write failed: " + path);
}

}  // namespace cleray

#endif  // CLERAY_REPORT_HPP_
