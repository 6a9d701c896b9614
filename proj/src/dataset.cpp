#include "ozbias/dataset.hpp"

#include <algorithm>
#include <filesystem>
#include <map>

#include "ozbias/errors.hpp"
#include "ozbias/io.hpp"

namespace fs = std::filesystem;

namespace ozbias {

const std::vector<std::string>& momo_channel_names() {
  static const std::vector<std::string> names = {
      "nh3",           "dms",
      "hno3",          "co",
      "brono2",        "temperature",
      "no2",           "pan",
      "hox_production", "surface_pressure",
      "ho2",           "pentyne",
      "so2",           "oh",
      "lw_flux_surface_clearsky", "olr_clearsky"};
  return names;
}

void Dataset::validate() const {
  if (experiment != 1 && experiment != 2) {
    throw DataError("experiment must be 1 or 2");
  }
  std::size_t expected = experiment == 1 ? 16 : 39;
  if (channels.size() != expected) {
    throw ChannelCountMismatch("experiment " + std::to_string(experiment) +
                               " needs " + std::to_string(expected) +
                               " channels, got " +
                               std::to_string(channels.size()));
  }
  for (const auto& day : days) {
    if (day.stack.spec != spec || day.target.spec != spec) {
      throw ShapeMismatch("dataset day " + day.date.to_string() +
                          " uses a different grid");
    }
    if (day.stack.channels != channels) {
      throw ChannelMismatch("dataset day " + day.date.to_string() +
                            " has different channels");
    }
    if (day.stack.date != day.date || day.target.date != day.date) {
      throw DateMismatch("dataset day " + day.date.to_string() +
                         " carries mismatched dates");
    }
    if (day.target.valid_count() == 0) {
      throw DataError("dataset day " + day.date.to_string() +
                      " has an empty target mask");
    }
  }
  for (std::size_t i = 1; i < days.size(); ++i) {
    if (!(days[i - 1].date < days[i].date)) {
      throw DataError("dataset days must be strictly ordered by date");
    }
  }
}

MaskedField grid_observations(const ObservationTable& obs,
                              const GridSpec& spec, Date date) {
  int rows = spec.rows();
  int cols = spec.cols();
  std::vector<double> sums(static_cast<std::size_t>(rows) * cols, 0.0);
  std::vector<long> counts(static_cast<std::size_t>(rows) * cols, 0);
  for (const auto& rec : obs.records) {
    if (rec.date != date) continue;
    int r, c;
    try {
      std::tie(r, c) = spec.cell_index(rec.lat, rec.lon);
    } catch (const OutOfDomain&) {
      continue;
    }
    sums[static_cast<std::size_t>(r) * cols + c] += rec.o3_ppb;
    counts[static_cast<std::size_t>(r) * cols + c] += 1;
  }
  MaskedField field(spec, date);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      long n = counts[static_cast<std::size_t>(r) * cols + c];
      if (n > 0) {
        field.set(r, c, sums[static_cast<std::size_t>(r) * cols + c] / n);
      }
    }
  }
  return field;
}

MaskedField compute_bias(const MaskedField& model_o3, const MaskedField& obs) {
  if (model_o3.spec.shape() != obs.spec.shape()) {
    throw ShapeMismatch("model and observation grids differ");
  }
  MaskedField bias(obs.spec, obs.date);
  int rows = obs.spec.rows();
  int cols = obs.spec.cols();
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (obs.valid(r, c)) {
        bias.set(r, c, model_o3.value(r, c) - obs.value(r, c));
      }
    }
  }
  return bias;
}

Dataset assemble(const std::vector<GridStack>& momo_stacks,
                 const std::optional<GridStack>& landuse_stack,
                 const std::vector<MaskedField>& bias_fields, int experiment) {
  if (experiment != 1 && experiment != 2) {
    throw DataError("experiment must be 1 or 2");
  }
  if (momo_stacks.empty()) throw EmptyInput("assemble needs >= 1 day");
  std::map<Date, const MaskedField*> bias_by_date;
  for (const auto& b : bias_fields) bias_by_date[b.date] = &b;
  if (bias_by_date.size() != bias_fields.size()) {
    throw DateMismatch("duplicate bias field dates");
  }

  Dataset ds;
  ds.experiment = experiment;
  ds.spec = momo_stacks.front().spec;
  if (experiment == 2) {
    if (!landuse_stack) {
      throw ChannelCountMismatch("experiment 2 requires a land-use stack");
    }
    if (landuse_stack->spec != ds.spec) {
      throw ShapeMismatch("land-use stack uses a different grid");
    }
  }

  std::vector<const GridStack*> ordered;
  for (const auto& s : momo_stacks) ordered.push_back(&s);
  std::sort(ordered.begin(), ordered.end(),
            [](const GridStack* a, const GridStack* b) {
              return a->date < b->date;
            });

  for (const GridStack* momo : ordered) {
    if (momo->channel_count() != 16) {
      throw ChannelCountMismatch("MOMO stacks must have 16 channels, got " +
                                 std::to_string(momo->channel_count()));
    }
    auto it = bias_by_date.find(momo->date);
    if (it == bias_by_date.end()) {
      throw DateMismatch("no bias field for " + momo->date.to_string());
    }
    Dataset::Day day;
    day.date = momo->date;
    day.target = *it->second;
    if (experiment == 1) {
      day.stack = *momo;
    } else {
      std::vector<std::string> channels = momo->channels;
      channels.insert(channels.end(), landuse_stack->channels.begin(),
                      landuse_stack->channels.end());
      std::vector<double> data = momo->data;
      data.insert(data.end(), landuse_stack->data.begin(),
                  landuse_stack->data.end());
      day.stack = GridStack(momo->spec, std::move(channels), momo->date,
                            std::move(data));
    }
    ds.days.push_back(std::move(day));
  }
  if (bias_by_date.size() != ds.days.size()) {
    throw DateMismatch("bias fields present for days without stacks");
  }
  ds.channels = ds.days.front().stack.channels;
  ds.validate();
  return ds;
}

TemporalSplit temporal_split(const Dataset& ds, int eval_year) {
  TemporalSplit split;
  split.train.experiment = split.eval.experiment = ds.experiment;
  split.train.spec = split.eval.spec = ds.spec;
  split.train.channels = split.eval.channels = ds.channels;
  split.train.generator = split.eval.generator = ds.generator;
  for (const auto& day : ds.days) {
    bool in_eval = day.date.year == eval_year && day.date.is_summer();
    (in_eval ? split.eval : split.train).days.push_back(day);
  }
  if (split.eval.days.empty()) {
    throw EmptyEval("no summer days in eval year " +
                    std::to_string(eval_year));
  }
  return split;
}

void save_dataset(const Dataset& ds, const std::string& dir) {
  ds.validate();
  fs::create_directories(dir);
  nlohmann::json manifest;
  manifest["format"] = "dataset";
  manifest["version"] = 1;
  manifest["experiment"] = ds.experiment;
  manifest["spec"] = spec_to_json(ds.spec);
  manifest["channels"] = ds.channels;
  manifest["days"] = nlohmann::json::array();
  for (const auto& day : ds.days) {
    std::string tag = day.date.to_string();
    std::string stack_name = "stack_" + tag + ".gstack";
    std::string target_name = "target_" + tag + ".mfield";
    write_gstack(day.stack, (fs::path(dir) / stack_name).string());
    write_mfield(day.target, (fs::path(dir) / target_name).string());
    manifest["days"].push_back(
        {{"date", tag}, {"stack", stack_name}, {"target", target_name}});
  }
  if (!ds.generator.is_null()) manifest["generator"] = ds.generator;
  write_text_file((fs::path(dir) / "manifest.json").string(),
                  manifest.dump(2) + "\n");
}

Dataset load_dataset(const std::string& dir) {
  fs::path root(dir);
  std::string manifest_text = read_text_file((root / "manifest.json").string());
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(manifest_text);
  } catch (const nlohmann::json::exception& e) {
    throw IoError("bad manifest in " + dir + ": " + e.what());
  }
  if (manifest.value("format", "") != "dataset") {
    throw IoError(dir + " does not contain a dataset manifest");
  }
  Dataset ds;
  ds.experiment = manifest.at("experiment").get<int>();
  ds.spec = spec_from_json(manifest.at("spec"));
  ds.channels = manifest.at("channels").get<std::vector<std::string>>();
  if (manifest.contains("generator")) ds.generator = manifest.at("generator");
  for (const auto& entry : manifest.at("days")) {
    Dataset::Day day;
    day.date = Date::parse(entry.at("date").get<std::string>());
    day.stack =
        read_gstack((root / entry.at("stack").get<std::string>()).string());
    day.target =
        read_mfield((root / entry.at("target").get<std::string>()).string());
    ds.days.push_back(std::move(day));
  }
  ds.validate();
  return ds;
}

}  // namespace ozbias
