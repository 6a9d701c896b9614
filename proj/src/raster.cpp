#include "ozbias/raster.hpp"

#include <unordered_set>

#include "ozbias/errors.hpp"

namespace ozbias {

Raster Raster::categorical(Bounds bounds, int rows, int cols,
                           std::vector<std::uint8_t> codes) {
  Raster r;
  r.kind = RasterKind::categorical;
  r.bounds = bounds;
  r.rows = rows;
  r.cols = cols;
  r.codes = std::move(codes);
  r.validate();
  return r;
}

Raster Raster::continuous(Bounds bounds, int rows, int cols,
                          std::vector<float> values) {
  Raster r;
  r.kind = RasterKind::continuous;
  r.bounds = bounds;
  r.rows = rows;
  r.cols = cols;
  r.values = std::move(values);
  r.validate();
  return r;
}

void Raster::validate() const {
  if (!(bounds.lat_min < bounds.lat_max) ||
      !(bounds.lon_min < bounds.lon_max)) {
    throw DataError("raster bounds must be well ordered");
  }
  if (rows <= 0 || cols <= 0) throw DataError("raster needs positive shape");
  std::size_t n = static_cast<std::size_t>(rows) * cols;
  if (kind == RasterKind::categorical) {
    if (codes.size() != n || !values.empty()) {
      throw ShapeMismatch("categorical raster payload size mismatch");
    }
  } else {
    if (values.size() != n || !codes.empty()) {
      throw ShapeMismatch("continuous raster payload size mismatch");
    }
  }
}

ClassSet ClassSet::default_17() {
  ClassSet s;
  for (int code = 1; code <= 17; ++code) {
    s.codes.push_back(static_cast<std::uint8_t>(code));
  }
  return s;
}

void ClassSet::validate() const {
  if (codes.empty()) throw DataError("class set must be non-empty");
  std::unordered_set<int> seen;
  for (auto c : codes) {
    if (!seen.insert(c).second) throw DataError("duplicate class code");
  }
}

int ClassSet::index_of(std::uint8_t code) const {
  for (std::size_t i = 0; i < codes.size(); ++i) {
    if (codes[i] == code) return static_cast<int>(i);
  }
  return -1;
}

}  // namespace ozbias
