#pragma once

#include <string>
#include <vector>

#include "ozbias/grid.hpp"
#include "ozbias/raster.hpp"

#include <json.hpp>

namespace ozbias {

// Per-cell aggregation of high-resolution rasters. Membership is by pixel
// center: a pixel belongs to the cell containing its center point, with the
// half-open convention on cell edges. Reductions run in fixed pixel order
// (row-major), so results are independent of scheduling.

struct CategoricalCellStats {
  std::uint8_t mode = 0;     // most frequent code, ties -> smallest code
  double variance = 0.0;     // population variance of the numeric codes
  std::vector<double> coverage;  // fraction per class, class-set order
};

struct ContinuousCellStats {
  double variance = 0.0;  // population variance
  double max = 0.0;
  double min = 0.0;
  double mean = 0.0;
};

struct CellBox {
  double lat_min, lat_max, lon_min, lon_max;
};

// Throws EmptyCell when no pixel center falls inside the cell box, and
// DataError on codes outside the class set.
CategoricalCellStats categorical_cell_stats(const Raster& raster,
                                            const CellBox& cell,
                                            const ClassSet& classes);
ContinuousCellStats continuous_cell_stats(const Raster& raster,
                                          const CellBox& cell);

// Channel order of the land-use stack: one coverage channel per class code,
// then land-cover mode and variance, then the four population statistics.
// With the default 17-class set that is 17 + 2 + 4 = 23 channels.
std::vector<std::string> landuse_channel_names(const ClassSet& classes);

struct LanduseExtraction {
  GridStack stack;
  std::vector<std::pair<int, int>> empty_categorical;
  std::vector<std::pair<int, int>> empty_continuous;
  double fill_value = 0.0;

  nlohmann::json coverage_report() const;
};

LanduseExtraction build_landuse_stack(const Raster& categorical_raster,
                                      const Raster& continuous_raster,
                                      const GridSpec& spec,
                                      const ClassSet& classes,
                                      double fill_value = 0.0,
                                      Date date = Date{2016, 1, 1});

}  // namespace ozbias
