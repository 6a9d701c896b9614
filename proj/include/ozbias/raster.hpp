#pragma once

#include <cstdint>
#include <vector>

namespace ozbias {

struct Bounds {
  double lat_min = 0.0;
  double lat_max = 0.0;
  double lon_min = 0.0;
  double lon_max = 0.0;

  bool operator==(const Bounds&) const = default;
};

enum class RasterKind { categorical, continuous };

// High-resolution source imagery. Row 0 sits at lat_min, matching the grid
// orientation; pixel (r, c) covers a bounds-extent/pixel-count sized box.
struct Raster {
  RasterKind kind = RasterKind::continuous;
  Bounds bounds;
  int rows = 0;
  int cols = 0;
  std::vector<std::uint8_t> codes;  // categorical payload
  std::vector<float> values;        // continuous payload

  static Raster categorical(Bounds bounds, int rows, int cols,
                            std::vector<std::uint8_t> codes);
  static Raster continuous(Bounds bounds, int rows, int cols,
                           std::vector<float> values);

  double pixel_height() const {
    return (bounds.lat_max - bounds.lat_min) / rows;
  }
  double pixel_width() const { return (bounds.lon_max - bounds.lon_min) / cols; }
  double center_lat(int r) const {
    return bounds.lat_min + (r + 0.5) * pixel_height();
  }
  double center_lon(int c) const {
    return bounds.lon_min + (c + 0.5) * pixel_width();
  }

  void validate() const;
};

// Valid land-cover class codes, in coverage-channel order.
struct ClassSet {
  std::vector<std::uint8_t> codes;

  // The 17 MODIS-style land-cover classes, codes 1..17.
  static ClassSet default_17();

  void validate() const;
  int index_of(std::uint8_t code) const;  // -1 when absent
};

}  // namespace ozbias
