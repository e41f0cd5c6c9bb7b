#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "eccmark/envelopes.hpp"
#include "eccmark/filtration.hpp"
#include "eccmark/geometry.hpp"
#include "eccmark/localscores.hpp"
#include "eccmark/scenarios.hpp"
#include "json.hpp"

namespace eccmark::io {

inline constexpr int kReportSchema = 1;

/// Locations and marks as read from a CSV file; the window comes separately.
struct PointTable {
  std::vector<Point> points;
  std::vector<double> marks;
};

/// Reads `x,y,mark` CSV (columns by header name, any order, extra columns
/// ignored). Errors name the source and line.
PointTable read_pattern_csv(std::istream& in, const std::string& source = "<input>");
PointTable read_pattern_csv(const std::filesystem::path& path);

/// Shortest text that reads back to the same double; "inf" for infinity.
std::string format_number(double v);

void write_pattern_csv(std::ostream& out, const MarkedPointPattern& pattern);
void write_curve_csv(std::ostream& out, const EulerCurve& curve);
void write_diagram_csv(std::ostream& out, const PersistenceDiagram& diagram);
void write_zscores_csv(std::ostream& out, const MarkedPointPattern& pattern, const ZScoreMap& z);
void write_band_csv(std::ostream& out, const Band& band);

nlohmann::ordered_json report_json(const EnvelopeReport& report);

/// `null=<kind> p=<value> eps_crit=<value> rank=<value>`
std::string summary_line(const EnvelopeReport& report);

/// Writes text to a file, creating parent directories.
void write_file(const std::filesystem::path& path, const std::string& content);

// ---------------------------------------------------------------------------
// SVG figures

/// Pattern (marks), ECC panels with envelopes, and the Z-score map.
std::string scenario_svg(const MarkedPointPattern& pattern, const EnvelopeReport* csr,
                         const EnvelopeReport* marked, const ZScoreMap* z, const std::string& title);

struct BandPanel {
  std::string title;
  BandSummary bands;
};

/// Grid of band panels, `columns` per row.
std::string bands_svg(const std::vector<BandPanel>& panels, std::size_t columns);

}  // namespace eccmark::io
