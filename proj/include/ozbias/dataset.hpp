#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ozbias/grid.hpp"
#include "ozbias/observations.hpp"

#include <json.hpp>

namespace ozbias {

// The 16 MOMO-Chem input channels, in fixed order.
const std::vector<std::string>& momo_channel_names();

// Train/eval dataset: one input stack and one masked bias target per day.
// Experiment 1 carries the 16 MOMO channels; experiment 2 appends the 23
// land-use channels for 39 total.
struct Dataset {
  struct Day {
    Date date;
    GridStack stack;
    MaskedField target;  // bias, ppb
  };

  int experiment = 1;
  GridSpec spec;
  std::vector<std::string> channels;
  std::vector<Day> days;
  nlohmann::json generator;  // provenance, optional

  void validate() const;
};

// Mean of station o3 per cell for one date; mask true where any station
// reported. Stations outside the grid are ignored.
MaskedField grid_observations(const ObservationTable& obs,
                              const GridSpec& spec, Date date);

// bias = model - observation at observed cells; mask copied from obs.
MaskedField compute_bias(const MaskedField& model_o3, const MaskedField& obs);

Dataset assemble(const std::vector<GridStack>& momo_stacks,
                 const std::optional<GridStack>& landuse_stack,
                 const std::vector<MaskedField>& bias_fields, int experiment);

// eval = June-August days of eval_year; train = every other day.
struct TemporalSplit {
  Dataset train;
  Dataset eval;
};
TemporalSplit temporal_split(const Dataset& ds, int eval_year);

void save_dataset(const Dataset& ds, const std::string& dir);
Dataset load_dataset(const std::string& dir);

}  // namespace ozbias
