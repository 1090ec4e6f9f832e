#include "specgsa/charts.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>
#include <unordered_map>
#include <utility>

#include "specgsa/format.hpp"

namespace specgsa {
namespace {

void check_axis(const std::vector<double>& axis, const char* name) {
  if (axis.empty()) throw std::invalid_argument(std::string(name) + " axis is empty");
  for (std::size_t i = 0; i < axis.size(); ++i) {
    if (!std::isfinite(axis[i])) throw std::invalid_argument(std::string(name) + " axis has a non-finite sample");
    if (i > 0 && !(axis[i] > axis[i - 1])) {
      throw std::invalid_argument(std::string(name) + " axis must be strictly increasing");
    }
  }
}

void sweep_row(const ChartGrid& grid, std::size_t row, GsaPoint* out) {
  const SchemeSpec spec{grid.scheme, grid.Nc_axis[row], grid.Pe};
  double prev_kdx = 0.0;
  double prev_phi = 0.0;
  for (std::size_t col = 0; col < grid.cols(); ++col) {
    const double kdx = grid.kdx_axis[col];
    const double reference = continue_phase(spec, prev_kdx, prev_phi, kdx);
    out[col] = gsa_point(spec, kdx, reference);
    if (!out[col].degenerate) {
      prev_kdx = kdx;
      prev_phi = out[col].phi;
    }
  }
}

// Marching squares over the value grid. Horizontal edges join (i, j) and
// (i + 1, j); vertical edges join (i, j) and (i, j + 1).
class Contourer {
 public:
  Contourer(const ChartGrid& grid, double level, ChartField field)
      : grid_(grid), level_(level), values_(grid.values.size()) {
    for (std::size_t n = 0; n < values_.size(); ++n) values_[n] = field_value(grid.values[n], field);
  }

  std::vector<Polyline> run() {
    if (grid_.rows() < 2 || grid_.cols() < 2) return {};
    for (std::size_t i = 0; i + 1 < grid_.rows(); ++i) {
      for (std::size_t j = 0; j + 1 < grid_.cols(); ++j) cell(i, j);
    }
    return stitch();
  }

 private:
  double value(std::size_t i, std::size_t j) const { return values_[i * grid_.cols() + j]; }

  std::size_t horizontal(std::size_t i, std::size_t j) const { return 2 * (i * grid_.cols() + j); }
  std::size_t vertical(std::size_t i, std::size_t j) const { return 2 * (i * grid_.cols() + j) + 1; }

  ContourPoint crossing(std::size_t edge) const {
    const std::size_t node = edge / 2;
    const std::size_t i = node / grid_.cols();
    const std::size_t j = node % grid_.cols();
    const bool is_vertical = edge % 2 == 1;
    const std::size_t i2 = is_vertical ? i : i + 1;
    const std::size_t j2 = is_vertical ? j + 1 : j;
    const double va = value(i, j);
    const double vb = value(i2, j2);
    const double t = va == vb ? 0.5 : (level_ - va) / (vb - va);
    const double nc = grid_.Nc_axis[i] + t * (grid_.Nc_axis[i2] - grid_.Nc_axis[i]);
    const double kdx = grid_.kdx_axis[j] + t * (grid_.kdx_axis[j2] - grid_.kdx_axis[j]);
    return {nc, kdx};
  }

  void add_segment(std::size_t a, std::size_t b) {
    const std::size_t index = segments_.size();
    segments_.emplace_back(a, b);
    incident_[a].push_back(index);
    incident_[b].push_back(index);
  }

  void cell(std::size_t i, std::size_t j) {
    // Corner order: 0 = (i, j), 1 = (i+1, j), 2 = (i+1, j+1), 3 = (i, j+1).
    const std::array<double, 4> v{value(i, j), value(i + 1, j), value(i + 1, j + 1), value(i, j + 1)};
    for (double x : v) {
      if (std::isnan(x)) return;
    }
    // Edge e_k joins corners k and k+1 (mod 4).
    const std::array<std::size_t, 4> edge{horizontal(i, j), vertical(i + 1, j), horizontal(i, j + 1),
                                          vertical(i, j)};
    int code = 0;
    for (int k = 0; k < 4; ++k) {
      if (v[k] >= level_) code |= 1 << k;
    }
    if (code == 0 || code == 15) return;

    if (code == 5 || code == 10) {
      const bool center_inside = 0.25 * (v[0] + v[1] + v[2] + v[3]) >= level_;
      // Corners 1 and 3 are cut off when the diagonal 0-2 is connected.
      const bool connect_02 = (code == 5) == center_inside;
      if (connect_02) {
        add_segment(edge[0], edge[1]);
        add_segment(edge[2], edge[3]);
      } else {
        add_segment(edge[3], edge[0]);
        add_segment(edge[1], edge[2]);
      }
      return;
    }

    std::array<std::size_t, 2> crossed{};
    int count = 0;
    for (int k = 0; k < 4; ++k) {
      const bool a = (code >> k) & 1;
      const bool b = (code >> ((k + 1) % 4)) & 1;
      if (a != b) crossed[count++] = edge[k];
    }
    add_segment(crossed[0], crossed[1]);
  }

  std::vector<Polyline> stitch() const {
    std::vector<bool> used(segments_.size(), false);
    std::vector<Polyline> lines;

    auto walk = [&](std::size_t start_segment, std::size_t start_edge) {
      Polyline line;
      line.push_back(crossing(start_edge));
      std::size_t seg = start_segment;
      std::size_t at = start_edge;
      while (true) {
        used[seg] = true;
        const auto [a, b] = segments_[seg];
        const std::size_t next = a == at ? b : a;
        line.push_back(crossing(next));
        at = next;
        const auto& around = incident_.at(at);
        std::size_t follow = segments_.size();
        for (std::size_t s : around) {
          if (!used[s]) {
            follow = s;
            break;
          }
        }
        if (follow == segments_.size()) break;
        seg = follow;
      }
      lines.push_back(std::move(line));
    };

    // Open chains first, starting from an end, then the closed loops.
    for (std::size_t s = 0; s < segments_.size(); ++s) {
      if (used[s]) continue;
      for (std::size_t end : {segments_[s].first, segments_[s].second}) {
        if (!used[s] && incident_.at(end).size() == 1) walk(s, end);
      }
    }
    for (std::size_t s = 0; s < segments_.size(); ++s) {
      if (!used[s]) walk(s, segments_[s].first);
    }
    return lines;
  }

  const ChartGrid& grid_;
  double level_;
  std::vector<double> values_;
  std::vector<std::pair<std::size_t, std::size_t>> segments_;
  std::unordered_map<std::size_t, std::vector<std::size_t>> incident_;
};

const char* kCsvHeader = "Nc,kdx,G_re,G_im,Gmod,phi,cN_over_c,VgN_over_c,nuN_over_nu,ratio";

}  // namespace

ChartField parse_chart_field(std::string_view name) {
  if (name == "G_re") return ChartField::GRe;
  if (name == "G_im") return ChartField::GIm;
  if (name == "Gmod") return ChartField::Gmod;
  if (name == "phi") return ChartField::Phi;
  if (name == "cN_over_c") return ChartField::CNOverC;
  if (name == "VgN_over_c") return ChartField::VgNOverC;
  if (name == "nuN_over_nu") return ChartField::NuNOverNu;
  if (name == "ratio") return ChartField::Ratio;
  throw std::invalid_argument("unknown chart field '" + std::string(name) + "'");
}

double field_value(const GsaPoint& point, ChartField field) {
  switch (field) {
    case ChartField::GRe: return point.G.real();
    case ChartField::GIm: return point.G.imag();
    case ChartField::Gmod: return point.Gmod;
    case ChartField::Phi: return point.phi;
    case ChartField::CNOverC: return point.cN_over_c;
    case ChartField::VgNOverC: return point.VgN_over_c;
    case ChartField::NuNOverNu:
      return point.nuN_over_nu ? *point.nuN_over_nu : std::numeric_limits<double>::quiet_NaN();
    case ChartField::Ratio: return point.ratio;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

std::vector<double> linspace(double first, double last, std::size_t count) {
  std::vector<double> out(count);
  if (count == 1) {
    out[0] = first;
    return out;
  }
  for (std::size_t i = 0; i < count; ++i) {
    out[i] = first + (last - first) * static_cast<double>(i) / static_cast<double>(count - 1);
  }
  if (count > 0) out.back() = last;
  return out;
}

ChartGrid sweep(Scheme scheme, double Pe, std::vector<double> Nc_axis,
                std::vector<double> kdx_axis, unsigned threads) {
  check_axis(Nc_axis, "Nc");
  check_axis(kdx_axis, "kdx");
  if (!(Nc_axis.front() > 0.0)) throw std::invalid_argument("Nc axis must be positive");
  if (kdx_axis.front() < 0.0 || kdx_axis.back() > kPi) {
    throw std::invalid_argument("kdx axis must lie within [0, pi]");
  }
  if (!std::isfinite(Pe) || Pe < 0.0) throw std::invalid_argument("Pe must be non-negative");

  ChartGrid grid;
  grid.scheme = scheme;
  grid.Pe = Pe;
  grid.Nc_axis = std::move(Nc_axis);
  grid.kdx_axis = std::move(kdx_axis);
  grid.values.resize(grid.rows() * grid.cols());

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, grid.rows()));

  if (threads <= 1) {
    for (std::size_t r = 0; r < grid.rows(); ++r) sweep_row(grid, r, &grid.values[r * grid.cols()]);
    return grid;
  }
  // Each worker owns a fixed stride of rows; cells are written in place.
  std::vector<std::jthread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&grid, t, threads] {
      for (std::size_t r = t; r < grid.rows(); r += threads) {
        sweep_row(grid, r, &grid.values[r * grid.cols()]);
      }
    });
  }
  pool.clear();
  return grid;
}

std::vector<Polyline> neutral_boundary(const ChartGrid& grid, double level, ChartField field) {
  return Contourer(grid, level, field).run();
}

void write_chart_csv(std::ostream& out, const ChartGrid& grid) {
  out << kCsvHeader << '\n';
  for (std::size_t r = 0; r < grid.rows(); ++r) {
    for (std::size_t c = 0; c < grid.cols(); ++c) {
      const GsaPoint& p = grid.at(r, c);
      out << format_double(grid.Nc_axis[r]) << ',' << format_double(p.kdx) << ','
          << format_double(p.G.real()) << ',' << format_double(p.G.imag()) << ','
          << format_double(p.Gmod) << ',' << format_double(p.phi) << ','
          << format_double(p.cN_over_c) << ',' << format_double(p.VgN_over_c) << ',';
      if (p.nuN_over_nu) out << format_double(*p.nuN_over_nu);
      out << ',' << format_double(p.ratio) << '\n';
    }
  }
}

nlohmann::json chart_to_json(const ChartGrid& grid) {
  nlohmann::json doc;
  doc["schema"] = "gsa_chart_v1";
  doc["scheme"] = to_string(grid.scheme);
  doc["Pe"] = grid.Pe;
  doc["Nc_axis"] = grid.Nc_axis;
  doc["kdx_axis"] = grid.kdx_axis;
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t r = 0; r < grid.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t c = 0; c < grid.cols(); ++c) {
      const GsaPoint& p = grid.at(r, c);
      nlohmann::json cell;
      cell["Nc"] = grid.Nc_axis[r];
      cell["kdx"] = p.kdx;
      cell["G_re"] = p.G.real();
      cell["G_im"] = p.G.imag();
      cell["Gmod"] = p.Gmod;
      cell["phi"] = p.phi;
      cell["cN_over_c"] = p.cN_over_c;
      cell["VgN_over_c"] = p.VgN_over_c;
      cell["nuN_over_nu"] = p.nuN_over_nu ? nlohmann::json(*p.nuN_over_nu) : nlohmann::json(nullptr);
      cell["ratio"] = p.ratio;
      row.push_back(std::move(cell));
    }
    rows.push_back(std::move(row));
  }
  doc["values"] = std::move(rows);
  return doc;
}

}  // namespace specgsa
