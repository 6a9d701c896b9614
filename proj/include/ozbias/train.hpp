#pragma once

#include <string>
#include <vector>

#include "ozbias/dataset.hpp"
#include "ozbias/unet.hpp"

namespace ozbias {

// Serialized model: configuration, weights, the normalization fitted on the
// training days, and the per-epoch mean loss history.
struct ModelCheckpoint {
  UNetConfig config;
  std::vector<std::string> channels;
  NormStats norm;
  UNetParams<float> params;
  std::vector<double> history;
  double train_target_mean = 0.0;
};

// One optimizer step per day image, days visited in a seeded shuffled order
// per epoch. Deterministic for a fixed seed, independent of thread count.
ModelCheckpoint train_unet(const Dataset& train_ds, UNetConfig cfg);

// Prediction for one (raw, un-normalized) day stack.
std::vector<double> predict_unet(const ModelCheckpoint& ckpt,
                                 const GridStack& stack);

void save_checkpoint(const ModelCheckpoint& ckpt, const std::string& path);
ModelCheckpoint load_checkpoint(const std::string& path);

// Mean of target values over all valid cells of the dataset.
double dataset_target_mean(const Dataset& ds);

// Converts one stack to a [C, H, W] float tensor.
Tens<float> stack_to_tensor(const GridStack& stack);

}  // namespace ozbias
