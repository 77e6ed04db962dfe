#pragma once

#include <string>
#include <vector>

#include "votebound/dataset.hpp"
#include "votebound/ensemble.hpp"

namespace vbtest {

using namespace votebound;

inline Label cls(int c) { return Label{c, {}}; }

inline Label bits(const std::string& s) {
  Label label;
  for (char c : s) label.bits.push_back(c == '1');
  return label;
}

inline Dataset mc_dataset(int q, const std::vector<int>& targets,
                          std::vector<double> weights = {}) {
  std::vector<std::vector<double>> features(targets.size(),
                                            std::vector<double>{0.0});
  std::vector<Label> labels;
  for (int t : targets) labels.push_back(cls(t));
  return make_dataset(LabelSpace{LabelKind::multiclass, q},
                      std::move(features), std::move(labels),
                      std::move(weights));
}

inline Dataset bin_dataset(const std::vector<int>& targets,
                           std::vector<double> weights = {}) {
  std::vector<std::vector<double>> features(targets.size(),
                                            std::vector<double>{0.0});
  std::vector<Label> labels;
  for (int t : targets) labels.push_back(cls(t));
  return make_dataset(LabelSpace{LabelKind::binary, 2}, std::move(features),
                      std::move(labels), std::move(weights));
}

inline Dataset ml_dataset(int q, const std::vector<std::string>& targets,
                          std::vector<double> weights = {}) {
  std::vector<std::vector<double>> features(targets.size(),
                                            std::vector<double>{0.0});
  std::vector<Label> labels;
  for (const auto& t : targets) labels.push_back(bits(t));
  return make_dataset(LabelSpace{LabelKind::multilabel, q},
                      std::move(features), std::move(labels),
                      std::move(weights));
}

inline Voter mc_table(const std::vector<int>& preds) {
  Voter v;
  v.kind = VoterKind::table;
  for (int p : preds) v.predictions.push_back(cls(p));
  return v;
}

inline Voter ml_table(const std::vector<std::string>& preds) {
  Voter v;
  v.kind = VoterKind::table;
  for (const auto& p : preds) v.predictions.push_back(bits(p));
  return v;
}

inline Voter real_table(const std::vector<double>& values) {
  Voter v;
  v.kind = VoterKind::realvalued_table;
  v.values = values;
  return v;
}

inline VoteProfile mc_profile(const std::vector<double>& g) {
  return VoteProfile{LabelKind::multiclass, g};
}

inline VoteProfile ml_profile(const std::vector<double>& conf) {
  return VoteProfile{LabelKind::multilabel, conf};
}

inline Posterior posterior(const std::vector<double>& w) {
  Posterior p{w};
  p.validate();
  return p;
}

}  // namespace vbtest
