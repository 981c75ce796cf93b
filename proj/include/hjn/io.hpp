#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hjn/scheme.hpp"

namespace hjn {

// shortest representation that parses back to the same double
std::string format_double(double v);
double parse_double(const std::string& s);

// one header line: "# hj-neumann v<version> key=value ... | col1,col2,..."
struct Table {
  std::map<std::string, std::string> meta;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  std::size_t column(const std::string& name) const;
};

void write_csv(const std::string& path, const Table& t);
std::string to_csv(const Table& t);
Table read_csv(const std::string& path);
Table parse_csv(const std::string& text);

// x[,y],u
Table field_table(const GridField& f, double dt = 0.0);
// x[,y],t,u over all stamps
Table spacetime_table(const SpaceTimeField& f);
// inverse of spacetime_table on the same grid
SpaceTimeField spacetime_from_table(const Table& t, GridPtr grid);

struct Series {
  std::string name;
  std::vector<double> x, y;
};

struct PlotOptions {
  std::string title;
  std::string xlabel = "x";
  std::string ylabel = "u";
  bool log_x = false;
  std::optional<double> reference_y;  // dashed horizontal line
};

std::string svg_lines(const std::vector<Series>& series, const PlotOptions& opt);
// nodal values drawn as h x h cells
std::string svg_heat(const GridField& f, const PlotOptions& opt);
void write_text(const std::string& path, const std::string& text);

}  // namespace hjn
