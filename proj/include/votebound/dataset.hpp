#pragma once

#include <cstddef>
#include <vector>

#include "votebound/types.hpp"

namespace votebound {

struct Example {
  std::vector<double> features;
  Label target;
  double weight = 0.0;
};

/// A finite empirical distribution: weighted examples whose weights sum to 1.
/// Every probability in this library is an exact finite sum over a Dataset.
struct Dataset {
  LabelSpace label_space;
  int feature_dim = 0;
  std::vector<Example> examples;

  std::size_t size() const { return examples.size(); }

  /// Throws ConfigError when any structural invariant fails: empty dataset,
  /// weight sum off by more than 1e-12, feature length mismatch, or a target
  /// inconsistent with the label space.
  void validate() const;
};

/// Assembles and validates a dataset. Weights are normalized to sum to 1;
/// an empty weight vector means uniform.
Dataset make_dataset(const LabelSpace& space,
                     std::vector<std::vector<double>> features,
                     std::vector<Label> targets,
                     std::vector<double> weights = {});

}  // namespace votebound
