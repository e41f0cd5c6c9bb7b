#include "eccmark/io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace eccmark::io {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    cells.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

std::string where(const std::string& source, std::size_t line) {
  return source + ":" + std::to_string(line) + ": ";
}

double parse_cell(std::string_view cell, const char* column, const std::string& source, std::size_t line) {
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  double v = 0.0;
  const auto [end, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc{} || end != cell.data() + cell.size() || cell.empty()) {
    throw Error(where(source, line) + "column '" + column + "' is not a number: '" + std::string(cell) + "'");
  }
  if (!std::isfinite(v)) throw Error(where(source, line) + "column '" + column + "' is not finite");
  return v;
}

}  // namespace

PointTable read_pattern_csv(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  std::array<std::size_t, 3> column{};
  std::size_t width = 0;
  PointTable table;

  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view text = trim(line);
    if (text.empty()) continue;
    const auto cells = split(text);
    if (!have_header) {
      constexpr std::array<const char*, 3> names{"x", "y", "mark"};
      for (std::size_t c = 0; c < names.size(); ++c) {
        std::size_t found = cells.size();
        for (std::size_t k = 0; k < cells.size(); ++k) {
          if (cells[k] == names[c]) found = k;
        }
        if (found == cells.size()) throw Error(where(source, line_no) + "missing column '" + names[c] + "'");
        column[c] = found;
      }
      width = cells.size();
      have_header = true;
      continue;
    }
    if (cells.size() != width) {
      throw Error(where(source, line_no) + "expected " + std::to_string(width) + " fields, found " +
                  std::to_string(cells.size()));
    }
    table.points.push_back(
        {parse_cell(cells[column[0]], "x", source, line_no), parse_cell(cells[column[1]], "y", source, line_no)});
    table.marks.push_back(parse_cell(cells[column[2]], "mark", source, line_no));
  }
  if (!have_header) throw Error(source + ": empty file");
  if (table.points.empty()) throw Error(source + ": no data rows");
  return table;
}

PointTable read_pattern_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  return read_pattern_csv(in, path.string());
}

std::string format_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

namespace {

std::string format17(double v) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general, 17);
  return std::string(buf.data(), res.ptr);
}

}  // namespace

void write_pattern_csv(std::ostream& out, const MarkedPointPattern& pattern) {
  out << "x,y,mark\n";
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    const Point& p = pattern.points()[i];
    out << format17(p.x) << ',' << format17(p.y) << ',' << format17(pattern.marks()[i]) << '\n';
  }
}

void write_curve_csv(std::ostream& out, const EulerCurve& curve) {
  out << "epsilon,beta0,beta1,chi\n";
  for (std::size_t t = 0; t < curve.grid.size(); ++t) {
    out << format_number(curve.grid[t]) << ',' << curve.beta0[t] << ',' << curve.beta1[t] << ',' << curve.chi[t]
        << '\n';
  }
}

void write_diagram_csv(std::ostream& out, const PersistenceDiagram& diagram) {
  out << "dim,birth,death\n";
  for (const auto& p : diagram.dim0) out << "0," << format_number(p.birth) << ',' << format_number(p.death) << '\n';
  for (const auto& p : diagram.dim1) out << "1," << format_number(p.birth) << ',' << format_number(p.death) << '\n';
}

void write_zscores_csv(std::ostream& out, const MarkedPointPattern& pattern, const ZScoreMap& z) {
  out << "index,x,y,mark,obs_degree,perm_mean,perm_sd,z\n";
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    const Point& p = pattern.points()[i];
    out << i << ',' << format_number(p.x) << ',' << format_number(p.y) << ',' << format_number(pattern.marks()[i])
        << ',' << z.obs_degree[i] << ',' << format_number(z.perm_mean[i]) << ',' << format_number(z.perm_sd[i])
        << ',' << format_number(z.scores[i]) << '\n';
  }
}

void write_band_csv(std::ostream& out, const Band& band) {
  out << "epsilon,median,lo,hi\n";
  for (std::size_t t = 0; t < band.grid.size(); ++t) {
    out << format_number(band.grid[t]) << ',' << format_number(band.median[t]) << ',' << format_number(band.lo[t])
        << ',' << format_number(band.hi[t]) << '\n';
  }
}

nlohmann::ordered_json report_json(const EnvelopeReport& r) {
  nlohmann::ordered_json j;
  j["schema"] = kReportSchema;
  j["null_kind"] = to_string(r.null_kind);
  j["s"] = r.s;
  j["seed"] = r.seed;
  j["alpha"] = r.alpha;
  j["p_value"] = r.p_value;
  j["rejected"] = r.rejected();
  j["extreme_rank_obs"] = r.extreme_rank_obs;
  j["epsilon_crit"] = r.epsilon_crit;
  j["crit_index"] = r.crit_index;
  j["grid"] = r.grid;
  j["observed"] = r.observed;
  j["lower"] = r.lower;
  j["upper"] = r.upper;
  j["generator"] = r.generator;
  return j;
}

std::string summary_line(const EnvelopeReport& r) {
  return "null=" + to_string(r.null_kind) + " p=" + format_number(r.p_value) +
         " eps_crit=" + format_number(r.epsilon_crit) + " rank=" + format_number(r.extreme_rank_obs);
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw Error("write failed for '" + path.string() + "'");
}

}  // namespace eccmark::io
