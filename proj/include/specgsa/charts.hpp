#pragma once

#include <cstddef>
#include <iosfwd>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "specgsa/gsa.hpp"

namespace specgsa {

/// GSA diagnostics sampled on a rectangular (Nc, kdx) grid at fixed Pe.
/// Row index runs over Nc, column index over kdx.
struct ChartGrid {
  Scheme scheme = Scheme::RK2;
  double Pe = 0.0;
  std::vector<double> Nc_axis;
  std::vector<double> kdx_axis;
  std::vector<GsaPoint> values;  // row-major, rows() * cols()

  std::size_t rows() const { return Nc_axis.size(); }
  std::size_t cols() const { return kdx_axis.size(); }
  const GsaPoint& at(std::size_t row, std::size_t col) const { return values[row * cols() + col]; }
};

enum class ChartField { GRe, GIm, Gmod, Phi, CNOverC, VgNOverC, NuNOverNu, Ratio };

/// Accepts the CSV column names ("Gmod", "ratio", "phi", ...).
ChartField parse_chart_field(std::string_view name);

/// Field value of one point; NaN where the field is undefined.
double field_value(const GsaPoint& point, ChartField field);

/// `count` evenly spaced samples on [first, last], endpoints included.
std::vector<double> linspace(double first, double last, std::size_t count);

struct ChartDefaults {
  static constexpr double kNcMin = 0.01;
  static constexpr double kNcMax = 1.0;
  static constexpr std::size_t kNcSamples = 200;
  static constexpr std::size_t kKdxSamples = 400;
};

/// Evaluates gsa_point on every cell. Rows are independent and are spread
/// over `threads` workers (0 = hardware concurrency); the result does not
/// depend on the thread count.
///
/// Throws std::invalid_argument for empty or non-increasing axes, Nc <= 0,
/// kdx outside [0, pi] or Pe < 0.
ChartGrid sweep(Scheme scheme, double Pe, std::vector<double> Nc_axis,
                std::vector<double> kdx_axis, unsigned threads = 0);

struct ContourPoint {
  double Nc = 0.0;
  double kdx = 0.0;
};
using Polyline = std::vector<ContourPoint>;

/// Marching-squares iso-lines of `field` at `level` in (Nc, kdx) coordinates.
/// Crossings are linearly interpolated along cell edges; saddle cells are
/// resolved by the sign of the cell average. Cells touching an undefined
/// value are skipped. No crossing yields an empty set.
std::vector<Polyline> neutral_boundary(const ChartGrid& grid, double level, ChartField field);

/// CSV with header Nc,kdx,G_re,G_im,Gmod,phi,cN_over_c,VgN_over_c,nuN_over_nu,ratio.
void write_chart_csv(std::ostream& out, const ChartGrid& grid);

/// JSON document with schema "gsa_chart_v1".
nlohmann::json chart_to_json(const ChartGrid& grid);

}  // namespace specgsa
