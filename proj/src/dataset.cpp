#include "votebound/dataset.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "compensated.hpp"

namespace votebound {

void Dataset::validate() const {
  label_space.validate();
  if (examples.empty()) throw ConfigError("dataset must be nonempty");
  if (feature_dim <= 0) {
    throw ConfigError("feature dimension must be positive, got " +
                      std::to_string(feature_dim));
  }
  detail::CompensatedSum weight_sum;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    const Example& e = examples[i];
    if (e.features.size() != static_cast<std::size_t>(feature_dim)) {
      throw ConfigError("example " + std::to_string(i) + " has " +
                        std::to_string(e.features.size()) +
                        " features, expected " + std::to_string(feature_dim));
    }
    if (!(e.weight >= 0.0)) {
      throw ConfigError("example " + std::to_string(i) +
                        " has negative weight");
    }
    if (!label_valid(e.target, label_space)) {
      throw ConfigError("example " + std::to_string(i) +
                        " target is inconsistent with the label space");
    }
    weight_sum.add(e.weight);
  }
  if (std::abs(weight_sum.value() - 1.0) > 1e-12) {
    throw ConfigError("example weights sum to " +
                      std::to_string(weight_sum.value()) +
                      ", expected 1 within 1e-12");
  }
}

Dataset make_dataset(const LabelSpace& space,
                     std::vector<std::vector<double>> features,
                     std::vector<Label> targets,
                     std::vector<double> weights) {
  if (features.size() != targets.size()) {
    throw ConfigError("feature rows and targets differ in length");
  }
  const std::size_t m = features.size();
  if (m == 0) throw ConfigError("dataset must be nonempty");
  if (weights.empty()) {
    weights.assign(m, 1.0 / static_cast<double>(m));
  } else {
    if (weights.size() != m) {
      throw ConfigError("weights and examples differ in length");
    }
    detail::CompensatedSum acc;
    for (double w : weights) {
      if (!(w >= 0.0)) throw ConfigError("weights must be nonnegative");
      acc.add(w);
    }
    const double sum = acc.value();
    if (sum <= 0.0) throw ConfigError("weights must not all be zero");
    // keep already-normalized weights verbatim so save/load round-trips
    if (std::abs(sum - 1.0) > 1e-12) {
      for (double& w : weights) w /= sum;
    }
  }

  Dataset dataset;
  dataset.label_space = space;
  dataset.feature_dim = static_cast<int>(features.front().size());
  dataset.examples.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    dataset.examples.push_back(
        Example{std::move(features[i]), std::move(targets[i]), weights[i]});
  }
  dataset.validate();
  return dataset;
}

}  // namespace votebound
