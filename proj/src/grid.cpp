#include "ozbias/grid.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "ozbias/errors.hpp"

namespace ozbias {

namespace {

// Absorbs division roundoff so exact rational extents land on the true
// integer (e.g. 0.3 / 0.1 evaluates below 3).
constexpr double kFloorNudge = 1e-9;

int floor_cells(double extent, double resolution) {
  return static_cast<int>(std::floor(extent / resolution + kFloorNudge));
}

}  // namespace

GridSpec::GridSpec(double lat_min_, double lat_max_, double lon_min_,
                   double lon_max_, double resolution_,
                   std::optional<std::pair<int, int>> shape_override_)
    : lat_min(lat_min_),
      lat_max(lat_max_),
      lon_min(lon_min_),
      lon_max(lon_max_),
      resolution(resolution_),
      shape_override(shape_override_) {
  validate();
}

void GridSpec::validate() const {
  if (!(lat_min < lat_max) || !(lon_min < lon_max)) {
    throw DataError("grid bounds must be well ordered");
  }
  if (!(resolution > 0.0) || !std::isfinite(resolution)) {
    throw DataError("grid resolution must be positive");
  }
  if (shape_override &&
      (shape_override->first <= 0 || shape_override->second <= 0)) {
    throw DataError("shape override must be positive");
  }
  if (!shape_override &&
      (floor_cells(lat_max - lat_min, resolution) < 1 ||
       floor_cells(lon_max - lon_min, resolution) < 1)) {
    throw DataError("grid extent smaller than one cell");
  }
}

int GridSpec::rows() const {
  if (shape_override) return shape_override->first;
  return floor_cells(lat_max - lat_min, resolution);
}

int GridSpec::cols() const {
  if (shape_override) return shape_override->second;
  return floor_cells(lon_max - lon_min, resolution);
}

std::pair<int, int> GridSpec::cell_index(double lat, double lon) const {
  if (!(lat >= lat_min && lat < lat_max && lon >= lon_min && lon < lon_max)) {
    throw OutOfDomain("point (" + std::to_string(lat) + ", " +
                      std::to_string(lon) + ") outside grid bounds");
  }
  int row = floor_cells(lat - lat_min, resolution);
  int col = floor_cells(lon - lon_min, resolution);
  if (row < 0 || col < 0 || row >= rows() || col >= cols()) {
    throw OutOfDomain("point maps beyond grid shape");
  }
  return {row, col};
}

void GridSpec::cell_bounds(int row, int col, double& clat_min,
                           double& clat_max, double& clon_min,
                           double& clon_max) const {
  clat_min = lat_min + row * resolution;
  clat_max = lat_min + (row + 1) * resolution;
  clon_min = lon_min + col * resolution;
  clon_max = lon_min + (col + 1) * resolution;
}

GridStack::GridStack(GridSpec spec_, std::vector<std::string> channels_,
                     Date date_)
    : spec(std::move(spec_)), channels(std::move(channels_)), date(date_) {
  data.assign(channels.size() * plane_size(), 0.0);
  validate();
}

GridStack::GridStack(GridSpec spec_, std::vector<std::string> channels_,
                     Date date_, std::vector<double> data_)
    : spec(std::move(spec_)),
      channels(std::move(channels_)),
      data(std::move(data_)),
      date(date_) {
  validate();
}

std::size_t GridStack::plane_size() const {
  return static_cast<std::size_t>(spec.rows()) * spec.cols();
}

double& GridStack::at(int c, int r, int col) {
  return data[(static_cast<std::size_t>(c) * spec.rows() + r) * spec.cols() +
              col];
}

double GridStack::at(int c, int r, int col) const {
  return data[(static_cast<std::size_t>(c) * spec.rows() + r) * spec.cols() +
              col];
}

int GridStack::channel_index(const std::string& name) const {
  for (std::size_t i = 0; i < channels.size(); ++i) {
    if (channels[i] == name) return static_cast<int>(i);
  }
  return -1;
}

void GridStack::validate() const {
  spec.validate();
  if (channels.empty()) throw DataError("grid stack needs >= 1 channel");
  std::unordered_set<std::string> seen;
  for (const auto& name : channels) {
    if (!seen.insert(name).second) {
      throw DataError("duplicate channel name '" + name + "'");
    }
  }
  if (data.size() != channels.size() * plane_size()) {
    throw ShapeMismatch("grid stack data size does not match C x rows x cols");
  }
}

MaskedField::MaskedField(GridSpec spec_, Date date_)
    : spec(std::move(spec_)), date(date_) {
  std::size_t n = static_cast<std::size_t>(spec.rows()) * spec.cols();
  values.assign(n, 0.0);
  mask.assign(n, 0);
}

double& MaskedField::value(int r, int c) { return values[r * spec.cols() + c]; }
double MaskedField::value(int r, int c) const {
  return values[r * spec.cols() + c];
}
bool MaskedField::valid(int r, int c) const {
  return mask[r * spec.cols() + c] != 0;
}
void MaskedField::set(int r, int c, double v) {
  values[r * spec.cols() + c] = v;
  mask[r * spec.cols() + c] = 1;
}
void MaskedField::set_masked(int r, int c) {
  values[r * spec.cols() + c] = 0.0;
  mask[r * spec.cols() + c] = 0;
}

std::size_t MaskedField::valid_count() const {
  std::size_t n = 0;
  for (auto m : mask) n += m != 0;
  return n;
}

void MaskedField::validate() const {
  spec.validate();
  std::size_t n = static_cast<std::size_t>(spec.rows()) * spec.cols();
  if (values.size() != n || mask.size() != n) {
    throw ShapeMismatch("masked field arrays do not match grid shape");
  }
}

NormStats fit_normalizer(std::span<const GridStack> train_stacks) {
  if (train_stacks.empty()) throw EmptyInput("fit_normalizer needs >= 1 stack");
  const auto& channels = train_stacks.front().channels;
  for (const auto& s : train_stacks) {
    if (s.channels != channels) {
      throw ChannelMismatch("stacks passed to fit_normalizer differ");
    }
  }
  NormStats stats;
  int C = static_cast<int>(channels.size());
  stats.mean.assign(C, 0.0);
  stats.stddev.assign(C, 0.0);
  for (int c = 0; c < C; ++c) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& s : train_stacks) {
      const double* p = s.plane(c);
      std::size_t m = s.plane_size();
      for (std::size_t i = 0; i < m; ++i) sum += p[i];
      n += m;
    }
    double mean = sum / static_cast<double>(n);
    double sq = 0.0;
    for (const auto& s : train_stacks) {
      const double* p = s.plane(c);
      std::size_t m = s.plane_size();
      for (std::size_t i = 0; i < m; ++i) {
        double d = p[i] - mean;
        sq += d * d;
      }
    }
    double stddev = std::sqrt(sq / static_cast<double>(n));
    stats.mean[c] = mean;
    stats.stddev[c] = stddev < stats.epsilon ? 1.0 : stddev;
  }
  return stats;
}

GridStack apply_normalizer(const NormStats& stats, const GridStack& stack) {
  if (stats.mean.size() != stack.channels.size()) {
    throw ChannelMismatch("normalizer fitted for " +
                          std::to_string(stats.mean.size()) +
                          " channels, stack has " +
                          std::to_string(stack.channels.size()));
  }
  GridStack out(stack.spec, stack.channels, stack.date);
  std::size_t m = stack.plane_size();
  for (int c = 0; c < stack.channel_count(); ++c) {
    const double* src = stack.plane(c);
    double* dst = out.plane(c);
    double mean = stats.mean[c];
    double inv = 1.0 / stats.stddev[c];
    for (std::size_t i = 0; i < m; ++i) dst[i] = (src[i] - mean) * inv;
  }
  for (double v : out.data) {
    if (!std::isfinite(v)) throw DataError("non-finite value after z-scoring");
  }
  return out;
}

}  // namespace ozbias
