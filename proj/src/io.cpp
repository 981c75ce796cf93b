#include "hjn/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace hjn {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

double parse_double(const std::string& s) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  const char* b = s.data();
  const char* e = b + s.size();
  auto r = std::from_chars(b, e, v);
  if (r.ec != std::errc() || r.ptr != e) throw ConfigError("not a number: '" + s + "'");
  return v;
}

std::size_t Table::column(const std::string& name) const {
  auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw ConfigError("table has no column '" + name + "'");
  return static_cast<std::size_t>(it - columns.begin());
}

std::string to_csv(const Table& t) {
  std::string out = "# hj-neumann v";
  out += kVersion;
  for (const auto& [k, v] : t.meta) out += " " + k + "=" + v;
  out += " |";
  for (std::size_t c = 0; c < t.columns.size(); ++c) out += (c ? "," : " ") + t.columns[c];
  out += "\n";
  for (const auto& row : t.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      out += format_double(row[c]);
    }
    out += '\n';
  }
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open '" + path + "' for writing");
  f << text;
  if (!f) throw Error("write failed: '" + path + "'");
}

void write_csv(const std::string& path, const Table& t) { write_text(path, to_csv(t)); }

Table parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line.rfind("# hj-neumann v", 0) != 0) throw ConfigError("missing CSV header");
  auto bar = line.find(" |");
  if (bar == std::string::npos) throw ConfigError("CSV header has no column list");
  Table t;
  std::istringstream meta(line.substr(0, bar));
  std::string tok;
  meta >> tok >> tok >> tok;  // "#", "hj-neumann", version
  while (meta >> tok) {
    auto eq = tok.find('=');
    if (eq == std::string::npos) throw ConfigError("bad CSV header field '" + tok + "'");
    t.meta[tok.substr(0, eq)] = tok.substr(eq + 1);
  }
  std::istringstream cols(line.substr(bar + 2));
  while (std::getline(cols, tok, ',')) {
    tok.erase(0, tok.find_first_not_of(' '));
    t.columns.push_back(tok);
  }
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<double> row;
    std::istringstream cells(line);
    while (std::getline(cells, tok, ',')) row.push_back(parse_double(tok));
    if (row.size() != t.columns.size())
      throw ConfigError("CSV line " + std::to_string(lineno) + ": expected " + std::to_string(t.columns.size()) +
                        " values");
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table read_csv(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot read '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_csv(ss.str());
}

Table field_table(const GridField& f, double dt) {
  const Grid& g = *f.grid;
  Table t;
  t.meta["h"] = format_double(g.h());
  t.meta["dt"] = format_double(dt);
  t.columns = g.dim() == 1 ? std::vector<std::string>{"x", "u"} : std::vector<std::string>{"x", "y", "u"};
  for (std::size_t i = 0; i < g.size(); ++i) {
    Vec p = g.position(i);
    if (g.dim() == 1)
      t.rows.push_back({p.x, f.values[i]});
    else
      t.rows.push_back({p.x, p.y, f.values[i]});
  }
  return t;
}

Table spacetime_table(const SpaceTimeField& f) {
  const Grid& g = *f.grid;
  Table t;
  t.meta["h"] = format_double(g.h());
  t.meta["dt"] = format_double(f.dt);
  t.columns = g.dim() == 1 ? std::vector<std::string>{"x", "t", "u"} : std::vector<std::string>{"x", "y", "t", "u"};
  for (std::size_t k = 0; k < f.times.size(); ++k)
    for (std::size_t i = 0; i < g.size(); ++i) {
      Vec p = g.position(i);
      if (g.dim() == 1)
        t.rows.push_back({p.x, f.times[k], f.values[k][i]});
      else
        t.rows.push_back({p.x, p.y, f.times[k], f.values[k][i]});
    }
  return t;
}

SpaceTimeField spacetime_from_table(const Table& t, GridPtr grid) {
  const std::size_t n = grid->size();
  if (t.rows.size() % n != 0) throw ConfigError("table rows do not match the grid size");
  const std::size_t tc = t.column("t"), uc = t.column("u");
  SpaceTimeField f;
  f.grid = grid;
  if (auto it = t.meta.find("dt"); it != t.meta.end()) f.dt = parse_double(it->second);
  for (std::size_t k = 0; k < t.rows.size() / n; ++k) {
    f.times.push_back(t.rows[k * n][tc]);
    std::vector<double> u(n);
    for (std::size_t i = 0; i < n; ++i) u[i] = t.rows[k * n + i][uc];
    f.values.push_back(std::move(u));
  }
  return f;
}

namespace {

constexpr double W = 640, Hh = 420, L = 70, R = 20, T = 40, B = 55;

std::string esc(const std::string& s) {
  std::string o;
  for (char c : s) {
    if (c == '<') o += "&lt;";
    else if (c == '>') o += "&gt;";
    else if (c == '&') o += "&amp;";
    else o += c;
  }
  return o;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::string frame(const PlotOptions& opt, double x0, double x1, double y0, double y1) {
  std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"420\" viewBox=\"0 0 640 420\">\n";
  s += "<rect width=\"640\" height=\"420\" fill=\"white\"/>\n";
  s += "<text x=\"320\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" + esc(opt.title) + "</text>\n";
  s += "<rect x=\"" + num(L) + "\" y=\"" + num(T) + "\" width=\"" + num(W - L - R) + "\" height=\"" +
       num(Hh - T - B) + "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    double fx = L + (W - L - R) * k / 4.0, fy = Hh - B - (Hh - T - B) * k / 4.0;
    double vx = x0 + (x1 - x0) * k / 4.0;
    if (opt.log_x) vx = std::pow(10.0, vx);
    s += "<text x=\"" + num(fx) + "\" y=\"" + num(Hh - B + 18) + "\" text-anchor=\"middle\" font-size=\"11\">" +
         tick(vx) + "</text>\n";
    s += "<text x=\"" + num(L - 6) + "\" y=\"" + num(fy + 4) + "\" text-anchor=\"end\" font-size=\"11\">" +
         tick(y0 + (y1 - y0) * k / 4.0) + "</text>\n";
  }
  s += "<text x=\"" + num(L + (W - L - R) / 2) + "\" y=\"" + num(Hh - 12) +
       "\" text-anchor=\"middle\" font-size=\"13\">" + esc(opt.xlabel) + (opt.log_x ? " (log)" : "") + "</text>\n";
  s += "<text x=\"16\" y=\"" + num(T + (Hh - T - B) / 2) + "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 16 " +
       num(T + (Hh - T - B) / 2) + ")\">" + esc(opt.ylabel) + "</text>\n";
  return s;
}

void pad(double& lo, double& hi) {
  if (!(hi > lo)) {
    lo -= 0.5;
    hi += 0.5;
  } else {
    double m = 0.05 * (hi - lo);
    lo -= m;
    hi += m;
  }
}

}  // namespace

std::string svg_lines(const std::vector<Series>& series, const PlotOptions& opt) {
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};
  auto X = [&](double x) { return opt.log_x ? std::log10(x) : x; };
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (const auto& s : series)
    for (std::size_t k = 0; k < s.x.size(); ++k) {
      if (!std::isfinite(X(s.x[k])) || !std::isfinite(s.y[k])) continue;
      x0 = std::min(x0, X(s.x[k]));
      x1 = std::max(x1, X(s.x[k]));
      y0 = std::min(y0, s.y[k]);
      y1 = std::max(y1, s.y[k]);
    }
  if (opt.reference_y) {
    y0 = std::min(y0, *opt.reference_y);
    y1 = std::max(y1, *opt.reference_y);
  }
  if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  pad(y0, y1);
  if (!(x1 > x0)) pad(x0, x1);
  auto px = [&](double x) { return L + (X(x) - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double y) { return Hh - B - (y - y0) / (y1 - y0) * (Hh - T - B); };
  std::string s = frame(opt, x0, x1, y0, y1);
  if (opt.reference_y)
    s += "<line x1=\"" + num(L) + "\" x2=\"" + num(W - R) + "\" y1=\"" + num(py(*opt.reference_y)) + "\" y2=\"" +
         num(py(*opt.reference_y)) + "\" stroke=\"gray\" stroke-dasharray=\"5,4\"/>\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& ser = series[k];
    const char* col = colors[k % 6];
    s += "<polyline fill=\"none\" stroke-width=\"1.5\" stroke=\"" + std::string(col) + "\" points=\"";
    for (std::size_t j = 0; j < ser.x.size(); ++j) {
      if (!std::isfinite(X(ser.x[j])) || !std::isfinite(ser.y[j])) continue;
      s += num(px(ser.x[j])) + "," + num(py(ser.y[j])) + " ";
    }
    s += "\"/>\n";
    s += "<text x=\"" + num(W - R - 8) + "\" y=\"" + num(T + 16 + 15 * k) + "\" text-anchor=\"end\" font-size=\"12\" fill=\"" +
         col + "\">" + esc(ser.name) + "</text>\n";
  }
  return s + "</svg>\n";
}

std::string svg_heat(const GridField& f, const PlotOptions& opt) {
  const Grid& g = *f.grid;
  if (g.dim() == 1) {
    Series s{"u", {}, {}};
    for (std::size_t i = 0; i < g.size(); ++i) {
      s.x.push_back(g.lattice(i).x);
      s.y.push_back(f.values[i]);
    }
    return svg_lines({s}, opt);
  }
  Vec lo = g.domain().box_lo(), hi = g.domain().box_hi();
  double vmin = *std::min_element(f.values.begin(), f.values.end());
  double vmax = *std::max_element(f.values.begin(), f.values.end());
  double span = vmax > vmin ? vmax - vmin : 1.0;
  double sx = (W - L - R) / (hi.x - lo.x + g.h()), sy = (Hh - T - B) / (hi.y - lo.y + g.h());
  double sc = std::min(sx, sy);
  std::string s = frame(opt, lo.x, hi.x, lo.y, hi.y);
  for (std::size_t i = 0; i < g.size(); ++i) {
    Vec p = g.lattice(i);
    double t = (f.values[i] - vmin) / span;
    int r = static_cast<int>(255 * t), b = 255 - r;
    char col[16];
    std::snprintf(col, sizeof col, "#%02x40%02x", r, b);
    double cx = L + (p.x - lo.x) * sc, cy = Hh - B - (p.y - lo.y + g.h()) * sc;
    s += "<rect x=\"" + num(cx) + "\" y=\"" + num(cy) + "\" width=\"" + num(g.h() * sc + 0.3) + "\" height=\"" +
         num(g.h() * sc + 0.3) + "\" fill=\"" + col + "\"/>\n";
  }
  s += "<text x=\"" + num(W - R) + "\" y=\"" + num(T - 6) + "\" text-anchor=\"end\" font-size=\"11\">min " + tick(vmin) +
       "  max " + tick(vmax) + "</text>\n";
  return s + "</svg>\n";
}

}  // namespace hjn
