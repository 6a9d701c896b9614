#include "ozbias/synth.hpp"

#include <cmath>
#include <cstdio>

#include "ozbias/errors.hpp"
#include "ozbias/rng.hpp"

namespace ozbias {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Stream salts keep every random field independent of the others.
enum : std::uint64_t {
  kFieldStream = 1ULL << 32,
  kNoiseStream = 2ULL << 32,
  kO3Stream = 3ULL << 32,
  kStationStream = 4ULL << 32,
  kRasterStream = 5ULL << 32,
};

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Sum of four random low-frequency sinusoids, values O(1).
std::vector<double> smooth_field(int rows, int cols, std::mt19937& rng,
                                 int max_wave = 3) {
  std::vector<double> field(static_cast<std::size_t>(rows) * cols, 0.0);
  for (int j = 1; j <= 4; ++j) {
    double amp = 1.2 / j;
    double p = static_cast<double>(uniform_int(rng, max_wave + 1));
    double q = static_cast<double>(uniform_int(rng, max_wave + 1));
    double phase = uniform_range(rng, 0.0, 2.0 * kPi);
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) {
        field[static_cast<std::size_t>(r) * cols + c] +=
            amp * std::sin(2.0 * kPi *
                               (p * r / static_cast<double>(rows) +
                                q * c / static_cast<double>(cols)) +
                           phase);
      }
    }
  }
  return field;
}

// White noise smoothed by a separable Gaussian (clamped borders), rescaled
// to zero mean and the requested amplitude.
std::vector<double> correlated_noise(int rows, int cols, std::mt19937& rng,
                                     double corr_length, double amplitude) {
  std::size_t n = static_cast<std::size_t>(rows) * cols;
  std::vector<double> field(n, 0.0);
  if (amplitude == 0.0) return field;
  for (std::size_t i = 0; i < n; ++i) field[i] = normal01(rng);
  if (corr_length > 0.0) {
    int radius = static_cast<int>(std::ceil(3.0 * corr_length));
    std::vector<double> kernel(2 * radius + 1);
    double ksum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
      kernel[i + radius] = std::exp(-0.5 * (i / corr_length) * (i / corr_length));
      ksum += kernel[i + radius];
    }
    for (double& k : kernel) k /= ksum;
    std::vector<double> tmp(n, 0.0);
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) {
        double acc = 0.0;
        for (int i = -radius; i <= radius; ++i) {
          int cc = std::clamp(c + i, 0, cols - 1);
          acc += kernel[i + radius] * field[static_cast<std::size_t>(r) * cols + cc];
        }
        tmp[static_cast<std::size_t>(r) * cols + c] = acc;
      }
    }
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) {
        double acc = 0.0;
        for (int i = -radius; i <= radius; ++i) {
          int rr = std::clamp(r + i, 0, rows - 1);
          acc += kernel[i + radius] * tmp[static_cast<std::size_t>(rr) * cols + c];
        }
        field[static_cast<std::size_t>(r) * cols + c] = acc;
      }
    }
  }
  double mean = 0.0;
  for (double v : field) mean += v;
  mean /= static_cast<double>(n);
  double sq = 0.0;
  for (double v : field) sq += (v - mean) * (v - mean);
  double stddev = std::sqrt(sq / static_cast<double>(n));
  double scale = stddev > 0.0 ? amplitude / stddev : 0.0;
  for (double& v : field) v = (v - mean) * scale;
  return field;
}

void quantize_f32(std::vector<double>& values) {
  for (double& v : values) v = static_cast<float>(v);
}

Raster make_landcover_raster(const GridSpec& spec, std::uint64_t seed,
                             int px_per_cell) {
  int rows = spec.rows() * px_per_cell;
  int cols = spec.cols() * px_per_cell;
  Bounds b{spec.lat_min, spec.lat_min + spec.rows() * spec.resolution,
           spec.lon_min, spec.lon_min + spec.cols() * spec.resolution};
  auto rng = make_rng(seed, kRasterStream + 0);
  auto field = smooth_field(rows, cols, rng, 6);
  std::vector<std::uint8_t> codes(field.size());
  for (std::size_t i = 0; i < field.size(); ++i) {
    int code = 1 + static_cast<int>(std::floor(17.0 * logistic(2.0 * field[i])));
    codes[i] = static_cast<std::uint8_t>(std::clamp(code, 1, 17));
  }
  return Raster::categorical(b, rows, cols, std::move(codes));
}

Raster make_population_raster(const GridSpec& spec, std::uint64_t seed,
                              int px_per_cell) {
  int rows = spec.rows() * px_per_cell;
  int cols = spec.cols() * px_per_cell;
  Bounds b{spec.lat_min, spec.lat_min + spec.rows() * spec.resolution,
           spec.lon_min, spec.lon_min + spec.cols() * spec.resolution};
  auto rng = make_rng(seed, kRasterStream + 1);
  auto field = smooth_field(rows, cols, rng, 6);
  std::vector<float> values(field.size());
  for (std::size_t i = 0; i < field.size(); ++i) {
    values[i] = static_cast<float>(50.0 * std::exp(1.5 * field[i]));
  }
  return Raster::continuous(b, rows, cols, std::move(values));
}

}  // namespace

SynthResult synth_generate(const SynthOptions& opt) {
  opt.spec.validate();
  if (opt.n_days < 1) throw DataError("synth needs n_days >= 1");
  if (opt.n_stations < 1) throw DataError("synth needs n_stations >= 1");
  if (opt.experiment != 1 && opt.experiment != 2) {
    throw DataError("experiment must be 1 or 2");
  }
  if (opt.days_per_year < 1 || opt.days_per_year > 92) {
    throw DataError("days_per_year must be in [1, 92]");
  }

  int rows = opt.spec.rows();
  int cols = opt.spec.cols();
  std::size_t plane = static_cast<std::size_t>(rows) * cols;
  const auto& momo_names = momo_channel_names();

  SynthResult result;
  result.landcover_raster = make_landcover_raster(opt.spec, opt.seed, 8);
  result.population_raster = make_population_raster(opt.spec, opt.seed, 8);
  auto extraction =
      build_landuse_stack(result.landcover_raster, result.population_raster,
                          opt.spec, ClassSet::default_17());
  result.landuse = std::move(extraction.stack);

  // Fixed station cells across all days.
  auto station_rng = make_rng(opt.seed, kStationStream);
  int n_cells = rows * cols;
  int n_stations = std::min(opt.n_stations, n_cells);
  auto station_cells =
      sample_without_replacement(station_rng, n_cells, n_stations);

  std::vector<MaskedField> bias_fields;
  for (int d = 0; d < opt.n_days; ++d) {
    int year = opt.start_year + d / opt.days_per_year;
    Date date = Date::summer_day(year, d % opt.days_per_year);

    GridStack momo(opt.spec, momo_names, date);
    for (int ch = 0; ch < 16; ++ch) {
      auto rng = make_rng(opt.seed, kFieldStream + (static_cast<std::uint64_t>(d) << 8) + ch);
      auto field = smooth_field(rows, cols, rng);
      quantize_f32(field);
      std::copy(field.begin(), field.end(), momo.plane(ch));
    }

    // True bias from the (already f32-quantized) input channels.
    auto noise_rng = make_rng(opt.seed, kNoiseStream + d);
    auto g = correlated_noise(rows, cols, noise_rng, opt.noise_corr_length,
                              opt.noise_amplitude);
    std::vector<double> bias(plane);
    const double* x1 = momo.plane(0);
    const double* x2 = momo.plane(1);
    const double* x3 = momo.plane(2);
    const double* x4 = momo.plane(3);
    for (std::size_t i = 0; i < plane; ++i) {
      double b = 3.0 * x1[i];
      if (!opt.linear_only) {
        b += 2.0 * x2[i] * x3[i] - 4.0 * logistic(x4[i]);
      }
      bias[i] = b + g[i];
    }
    quantize_f32(bias);

    // Model ozone field; station observations are model minus true bias.
    auto o3_rng = make_rng(opt.seed, kO3Stream + d);
    auto o3 = smooth_field(rows, cols, o3_rng);
    for (double& v : o3) v = 60.0 + 5.0 * v;
    quantize_f32(o3);
    GridStack o3_stack(opt.spec, {"mda8_o3"}, date);
    std::copy(o3.begin(), o3.end(), o3_stack.plane(0));

    MaskedField target(opt.spec, date);
    for (int cell : station_cells) {
      int r = cell / cols;
      int c = cell % cols;
      target.set(r, c, bias[cell]);
      ObsRecord rec;
      char buf[16];
      std::snprintf(buf, sizeof(buf), "ST%04d", cell);
      rec.station_id = buf;
      rec.lat = opt.spec.cell_center_lat(r);
      rec.lon = opt.spec.cell_center_lon(c);
      rec.date = date;
      rec.o3_ppb = static_cast<float>(o3[cell] - bias[cell]);
      result.observations.records.push_back(std::move(rec));
    }

    result.momo_stacks.push_back(std::move(momo));
    result.o3_stacks.push_back(std::move(o3_stack));
    bias_fields.push_back(std::move(target));
  }

  std::optional<GridStack> landuse_opt;
  if (opt.experiment == 2) landuse_opt = result.landuse;
  result.dataset =
      assemble(result.momo_stacks, landuse_opt, bias_fields, opt.experiment);

  nlohmann::json truth;
  truth["kind"] = "synthetic";
  truth["seed"] = opt.seed;
  truth["bias_formula"] = opt.linear_only
                              ? "3*x1 + g"
                              : "3*x1 + 2*x2*x3 - 4*logistic(x4) + g";
  truth["bias_channels"] = {momo_names[0], momo_names[1], momo_names[2],
                            momo_names[3]};
  truth["noise_amplitude"] = opt.noise_amplitude;
  truth["noise_corr_length"] = opt.noise_corr_length;
  truth["linear_only"] = opt.linear_only;
  truth["n_stations"] = n_stations;
  truth["start_year"] = opt.start_year;
  truth["days_per_year"] = opt.days_per_year;
  truth["model_o3"] = "60 + 5*smooth_field";
  result.dataset.generator = truth;

  result.observations.validate();
  return result;
}

}  // namespace ozbias
