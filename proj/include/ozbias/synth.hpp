#pragma once

#include <cstdint>

#include "ozbias/dataset.hpp"
#include "ozbias/raster.hpp"
#include "ozbias/zonal.hpp"

namespace ozbias {

// Desk-scale synthetic substitute for the real model/station data. Inputs
// are smooth seeded random fields; the true bias is the documented function
//
//   b = 3*x1 + 2*x2*x3 - 4*logistic(x4) + g
//
// over the first four input channels, where g is a spatially correlated
// Gaussian field (amplitude 0 disables it). With linear_only set the bias
// collapses to the 3*x1 term plus g. Station cells are sampled uniformly
// without replacement and stay fixed across days.
struct SynthOptions {
  std::uint64_t seed = 0;
  GridSpec spec;
  int n_days = 1;
  int n_stations = 1;
  int experiment = 1;
  int start_year = 2015;
  int days_per_year = 92;  // summer days assigned per calendar year
  double noise_amplitude = 1.0;
  double noise_corr_length = 2.0;  // cells
  bool linear_only = false;
};

struct SynthResult {
  Dataset dataset;
  // Raw ingredients mirroring the real-data pipeline inputs.
  std::vector<GridStack> momo_stacks;  // 16 channels per day
  std::vector<GridStack> o3_stacks;    // 1 channel "mda8_o3" per day
  ObservationTable observations;
  GridStack landuse;  // 23 static channels
  Raster landcover_raster;
  Raster population_raster;
};

SynthResult synth_generate(const SynthOptions& opt);

}  // namespace ozbias
