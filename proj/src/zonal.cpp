#include "ozbias/zonal.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "ozbias/errors.hpp"
#include "ozbias/threading.hpp"

namespace ozbias {

namespace {

struct PixelRange {
  int r0, r1, c0, c1;  // candidate window, half-open
};

// Conservative candidate window around the cell; the exact center-in-box
// test below decides membership, so off-by-one here is harmless.
PixelRange candidate_range(const Raster& raster, const CellBox& cell) {
  double ph = raster.pixel_height();
  double pw = raster.pixel_width();
  int r0 = static_cast<int>(
      std::floor((cell.lat_min - raster.bounds.lat_min) / ph)) - 1;
  int r1 = static_cast<int>(
      std::ceil((cell.lat_max - raster.bounds.lat_min) / ph)) + 1;
  int c0 = static_cast<int>(
      std::floor((cell.lon_min - raster.bounds.lon_min) / pw)) - 1;
  int c1 = static_cast<int>(
      std::ceil((cell.lon_max - raster.bounds.lon_min) / pw)) + 1;
  return PixelRange{std::clamp(r0, 0, raster.rows),
                    std::clamp(r1, 0, raster.rows),
                    std::clamp(c0, 0, raster.cols),
                    std::clamp(c1, 0, raster.cols)};
}

bool center_in_cell(double lat, double lon, const CellBox& cell) {
  return lat >= cell.lat_min && lat < cell.lat_max && lon >= cell.lon_min &&
         lon < cell.lon_max;
}

template <class Fn>
void for_each_pixel_in_cell(const Raster& raster, const CellBox& cell,
                            Fn&& fn) {
  PixelRange range = candidate_range(raster, cell);
  for (int r = range.r0; r < range.r1; ++r) {
    double lat = raster.center_lat(r);
    for (int c = range.c0; c < range.c1; ++c) {
      if (center_in_cell(lat, raster.center_lon(c), cell)) fn(r, c);
    }
  }
}

}  // namespace

CategoricalCellStats categorical_cell_stats(const Raster& raster,
                                            const CellBox& cell,
                                            const ClassSet& classes) {
  if (raster.kind != RasterKind::categorical) {
    throw DataError("categorical_cell_stats needs a categorical raster");
  }
  std::array<long long, 256> counts{};
  long long n = 0;
  double sum = 0.0;
  for_each_pixel_in_cell(raster, cell, [&](int r, int c) {
    std::uint8_t code = raster.codes[static_cast<std::size_t>(r) * raster.cols + c];
    counts[code]++;
    sum += code;
    ++n;
  });
  if (n == 0) throw EmptyCell("no pixel center inside cell");

  CategoricalCellStats stats;
  stats.coverage.assign(classes.codes.size(), 0.0);
  long long classified = 0;
  for (std::size_t i = 0; i < classes.codes.size(); ++i) {
    long long count = counts[classes.codes[i]];
    classified += count;
    stats.coverage[i] = static_cast<double>(count) / static_cast<double>(n);
  }
  if (classified != n) {
    throw DataError("raster contains class codes outside the class set");
  }
  // Ascending scan with strict max: ties resolve to the smallest code.
  long long best = 0;
  int best_code = 0;
  for (int code = 0; code < 256; ++code) {
    if (counts[code] > best) {
      best = counts[code];
      best_code = code;
    }
  }
  stats.mode = static_cast<std::uint8_t>(best_code);

  double mean = sum / static_cast<double>(n);
  double sq = 0.0;
  for_each_pixel_in_cell(raster, cell, [&](int r, int c) {
    double d = raster.codes[static_cast<std::size_t>(r) * raster.cols + c] - mean;
    sq += d * d;
  });
  stats.variance = sq / static_cast<double>(n);
  return stats;
}

ContinuousCellStats continuous_cell_stats(const Raster& raster,
                                          const CellBox& cell) {
  if (raster.kind != RasterKind::continuous) {
    throw DataError("continuous_cell_stats needs a continuous raster");
  }
  long long n = 0;
  double sum = 0.0;
  double vmin = 0.0, vmax = 0.0;
  for_each_pixel_in_cell(raster, cell, [&](int r, int c) {
    double v = raster.values[static_cast<std::size_t>(r) * raster.cols + c];
    if (n == 0) {
      vmin = vmax = v;
    } else {
      vmin = std::min(vmin, v);
      vmax = std::max(vmax, v);
    }
    sum += v;
    ++n;
  });
  if (n == 0) throw EmptyCell("no pixel center inside cell");
  double mean = sum / static_cast<double>(n);
  double sq = 0.0;
  for_each_pixel_in_cell(raster, cell, [&](int r, int c) {
    double d = raster.values[static_cast<std::size_t>(r) * raster.cols + c] - mean;
    sq += d * d;
  });
  return ContinuousCellStats{sq / static_cast<double>(n), vmax, vmin, mean};
}

std::vector<std::string> landuse_channel_names(const ClassSet& classes) {
  std::vector<std::string> names;
  names.reserve(classes.codes.size() + 6);
  for (auto code : classes.codes) {
    names.push_back("lc_coverage_" + std::to_string(code));
  }
  names.push_back("lc_mode");
  names.push_back("lc_variance");
  names.push_back("pop_variance");
  names.push_back("pop_max");
  names.push_back("pop_min");
  names.push_back("pop_mean");
  return names;
}

LanduseExtraction build_landuse_stack(const Raster& categorical_raster,
                                      const Raster& continuous_raster,
                                      const GridSpec& spec,
                                      const ClassSet& classes,
                                      double fill_value, Date date) {
  classes.validate();
  categorical_raster.validate();
  continuous_raster.validate();

  auto names = landuse_channel_names(classes);
  GridStack stack(spec, names, date);
  int rows = spec.rows();
  int cols = spec.cols();
  int n_classes = static_cast<int>(classes.codes.size());
  int ch_mode = n_classes;
  int ch_lc_var = n_classes + 1;
  int ch_pop = n_classes + 2;

  std::vector<std::uint8_t> cat_empty(static_cast<std::size_t>(rows) * cols, 0);
  std::vector<std::uint8_t> cont_empty(static_cast<std::size_t>(rows) * cols, 0);

  parallel_for(rows, [&](int r_begin, int r_end) {
    for (int r = r_begin; r < r_end; ++r) {
      for (int c = 0; c < cols; ++c) {
        CellBox cell;
        spec.cell_bounds(r, c, cell.lat_min, cell.lat_max, cell.lon_min,
                         cell.lon_max);
        try {
          auto cat = categorical_cell_stats(categorical_raster, cell, classes);
          for (int k = 0; k < n_classes; ++k) {
            stack.at(k, r, c) = cat.coverage[k];
          }
          stack.at(ch_mode, r, c) = cat.mode;
          stack.at(ch_lc_var, r, c) = cat.variance;
        } catch (const EmptyCell&) {
          for (int k = 0; k <= ch_lc_var; ++k) stack.at(k, r, c) = fill_value;
          cat_empty[static_cast<std::size_t>(r) * cols + c] = 1;
        }
        try {
          auto cont = continuous_cell_stats(continuous_raster, cell);
          stack.at(ch_pop + 0, r, c) = cont.variance;
          stack.at(ch_pop + 1, r, c) = cont.max;
          stack.at(ch_pop + 2, r, c) = cont.min;
          stack.at(ch_pop + 3, r, c) = cont.mean;
        } catch (const EmptyCell&) {
          for (int k = 0; k < 4; ++k) stack.at(ch_pop + k, r, c) = fill_value;
          cont_empty[static_cast<std::size_t>(r) * cols + c] = 1;
        }
      }
    }
  });

  // Quantize to f32 so the in-memory stack matches its on-disk round trip.
  for (double& v : stack.data) v = static_cast<float>(v);

  LanduseExtraction result{std::move(stack), {}, {}, fill_value};
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (cat_empty[static_cast<std::size_t>(r) * cols + c]) {
        result.empty_categorical.emplace_back(r, c);
      }
      if (cont_empty[static_cast<std::size_t>(r) * cols + c]) {
        result.empty_continuous.emplace_back(r, c);
      }
    }
  }
  return result;
}

nlohmann::json LanduseExtraction::coverage_report() const {
  nlohmann::json j;
  j["fill_value"] = fill_value;
  j["empty_categorical"] = nlohmann::json::array();
  for (auto [r, c] : empty_categorical) {
    j["empty_categorical"].push_back({r, c});
  }
  j["empty_continuous"] = nlohmann::json::array();
  for (auto [r, c] : empty_continuous) {
    j["empty_continuous"].push_back({r, c});
  }
  return j;
}

}  // namespace ozbias
