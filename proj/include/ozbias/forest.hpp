#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ozbias/dataset.hpp"

namespace ozbias {

// Per-pixel regression sample: one feature vector, one bias target.
struct PixelSample {
  std::vector<double> features;
  double target = 0.0;
};

struct RFHyper {
  int n_trees = 100;
  int max_depth = 0;  // 0 = unlimited
  int min_samples_leaf = 3;
  int features_per_split = 0;  // 0 = ceil(p / 3)
  bool bootstrap = true;
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;  // leaf mean
  long count = 0;
  double importance = 0.0;  // count * impurity decrease, split nodes only

  bool is_leaf() const { return feature < 0; }
};

struct Tree {
  std::vector<TreeNode> nodes;  // pre-order, root at 0
};

struct Forest {
  RFHyper hyper;
  std::uint64_t seed = 0;
  int n_features = 0;
  std::vector<Tree> trees;
};

struct SplitChoice {
  int feature = -1;
  double threshold = 0.0;
  double decrease = 0.0;
};

// CART variance-reduction split: exhaustive scan over midpoints between
// consecutive distinct sorted values per feature. Ties break to the lower
// feature index, then the lower threshold. Samples go left when
// feature < threshold. Returns nullopt when no candidate has a positive
// decrease.
std::optional<SplitChoice> best_split(const std::vector<PixelSample>& samples,
                                      std::span<const int> feature_subset,
                                      int min_samples_leaf = 1);

// Trees train on seeded bootstrap resamples with per-node random feature
// subsets; per-tree generator streams make the result independent of
// scheduling.
Forest fit_forest(const std::vector<PixelSample>& samples, RFHyper hyper,
                  std::uint64_t seed);

double predict(const Forest& forest, std::span<const double> features);

// Impurity-based scores normalized to sum 1 (uniform when all are zero).
std::vector<double> feature_importance(const Forest& forest);

// Pixel samples from every mask-true cell of the dataset, in day order.
std::vector<PixelSample> dataset_to_samples(const Dataset& ds);

struct RFModel {
  RFHyper hyper;
  std::uint64_t seed = 0;
  std::vector<std::string> channels;
  double train_target_mean = 0.0;
  Forest forest;
};

RFModel train_rf(const Dataset& train_ds, RFHyper hyper, std::uint64_t seed);
std::vector<double> predict_rf(const RFModel& model, const GridStack& stack);

void save_rf(const RFModel& model, const std::string& path);
RFModel load_rf(const std::string& path);

}  // namespace ozbias
