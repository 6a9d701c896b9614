#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ozbias/date.hpp"

namespace ozbias {

// Regular lat/lon grid. Row 0 sits at lat_min (south-west origin) and cells
// bin half-open: a point on a cell's northern/eastern edge belongs to the
// next cell. The derived shape is floor(extent / resolution) per axis; an
// explicit shape_override takes precedence (some published grids are trimmed
// relative to the raw extent arithmetic, so both conventions are needed).
struct GridSpec {
  double lat_min = 0.0;
  double lat_max = 0.0;
  double lon_min = 0.0;
  double lon_max = 0.0;
  double resolution = 1.0;
  std::optional<std::pair<int, int>> shape_override;

  GridSpec() = default;
  GridSpec(double lat_min, double lat_max, double lon_min, double lon_max,
           double resolution,
           std::optional<std::pair<int, int>> shape_override = std::nullopt);

  void validate() const;

  int rows() const;
  int cols() const;
  std::pair<int, int> shape() const { return {rows(), cols()}; }

  // Half-open binning; throws OutOfDomain outside bounds or beyond an
  // overridden shape.
  std::pair<int, int> cell_index(double lat, double lon) const;

  // Geographic box of cell (row, col), anchored at (lat_min, lon_min).
  void cell_bounds(int row, int col, double& clat_min, double& clat_max,
                   double& clon_min, double& clon_max) const;

  double cell_center_lat(int row) const {
    return lat_min + (row + 0.5) * resolution;
  }
  double cell_center_lon(int col) const {
    return lon_min + (col + 0.5) * resolution;
  }

  bool operator==(const GridSpec&) const = default;
};

// Multi-channel 2-D field over a grid, C x rows x cols row-major.
// Values are held as doubles in memory; the file payload is f32.
struct GridStack {
  GridSpec spec;
  std::vector<std::string> channels;
  std::vector<double> data;
  Date date;

  GridStack() = default;
  GridStack(GridSpec spec, std::vector<std::string> channels, Date date);
  GridStack(GridSpec spec, std::vector<std::string> channels, Date date,
            std::vector<double> data);

  int channel_count() const { return static_cast<int>(channels.size()); }
  std::size_t plane_size() const;

  double& at(int c, int r, int col);
  double at(int c, int r, int col) const;
  double* plane(int c) { return data.data() + c * plane_size(); }
  const double* plane(int c) const { return data.data() + c * plane_size(); }

  int channel_index(const std::string& name) const;  // -1 when absent

  void validate() const;
};

// Single-channel field plus validity mask (true = observed).
struct MaskedField {
  GridSpec spec;
  std::vector<double> values;
  std::vector<std::uint8_t> mask;
  Date date;

  MaskedField() = default;
  MaskedField(GridSpec spec, Date date);

  double& value(int r, int c);
  double value(int r, int c) const;
  bool valid(int r, int c) const;
  void set(int r, int c, double v);
  void set_masked(int r, int c);

  std::size_t valid_count() const;
  void validate() const;
};

// Per-channel z-score statistics. Population std; entries below epsilon are
// replaced by 1 so constant channels normalize to zero instead of NaN.
struct NormStats {
  std::vector<double> mean;
  std::vector<double> stddev;
  double epsilon = 1e-8;
};

NormStats fit_normalizer(std::span<const GridStack> train_stacks);
GridStack apply_normalizer(const NormStats& stats, const GridStack& stack);

}  // namespace ozbias
