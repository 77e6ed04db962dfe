#include "votebound/ensemble.hpp"

#include <cmath>
#include <string>

#include "compensated.hpp"

namespace votebound {

std::string to_string(VoterKind kind) {
  switch (kind) {
    case VoterKind::stump: return "stump";
    case VoterKind::table: return "table";
    case VoterKind::realvalued_table: return "realvalued-table";
  }
  return "unknown";
}

VoterKind voter_kind_from_string(const std::string& name) {
  if (name == "stump") return VoterKind::stump;
  if (name == "table") return VoterKind::table;
  if (name == "realvalued-table") return VoterKind::realvalued_table;
  throw ConfigError("unknown voter kind: " + name);
}

Label Voter::output(const Dataset& dataset, std::size_t i) const {
  switch (kind) {
    case VoterKind::stump: {
      const auto& x = dataset.examples.at(i).features;
      if (feature_index < 0 ||
          static_cast<std::size_t>(feature_index) >= x.size()) {
        throw ConfigError("stump feature index out of range");
      }
      return x[static_cast<std::size_t>(feature_index)] <= threshold ? left
                                                                     : right;
    }
    case VoterKind::table:
      return predictions.at(i);
    case VoterKind::realvalued_table:
      throw ConfigError(
          "realvalued-table voters have no class output; use real_output");
  }
  throw ConfigError("bad voter kind");
}

double Voter::real_output(const Dataset& dataset, std::size_t i) const {
  if (kind == VoterKind::realvalued_table) return values.at(i);
  return static_cast<double>(output(dataset, i).cls);
}

void Voter::validate(const LabelSpace& space,
                     std::size_t example_count) const {
  switch (kind) {
    case VoterKind::stump:
      if (!label_valid(left, space) || !label_valid(right, space)) {
        throw ConfigError("stump outputs are inconsistent with label space");
      }
      break;
    case VoterKind::table: {
      if (predictions.size() != example_count) {
        throw ConfigError("table voter has " +
                          std::to_string(predictions.size()) +
                          " predictions, expected one per example (" +
                          std::to_string(example_count) + ")");
      }
      for (const Label& p : predictions) {
        if (!label_valid(p, space)) {
          throw ConfigError(
              "table prediction is inconsistent with label space");
        }
      }
      break;
    }
    case VoterKind::realvalued_table: {
      if (space.kind != LabelKind::binary) {
        throw ConfigError("realvalued-table voters are binary only");
      }
      if (values.size() != example_count) {
        throw ConfigError("realvalued-table voter has " +
                          std::to_string(values.size()) +
                          " values, expected one per example (" +
                          std::to_string(example_count) + ")");
      }
      for (double v : values) {
        if (!(v >= -1.0 && v <= 1.0)) {
          throw ConfigError("real-valued predictions must lie in [-1,1]");
        }
      }
      break;
    }
  }
}

Posterior Posterior::uniform(std::size_t n) {
  Posterior p;
  p.weights.assign(n, 1.0 / static_cast<double>(n));
  return p;
}

void Posterior::validate() const {
  if (weights.empty()) throw ConfigError("posterior must be nonempty");
  detail::CompensatedSum sum;
  for (double w : weights) {
    if (!(w >= 0.0)) throw ConfigError("posterior weights must be >= 0");
    sum.add(w);
  }
  if (std::abs(sum.value() - 1.0) > 1e-12) {
    throw ConfigError("posterior weights sum to " +
                      std::to_string(sum.value()) +
                      ", expected 1 within 1e-12");
  }
}

void Ensemble::validate(const Dataset& dataset) const {
  label_space.validate();
  if (label_space.kind != dataset.label_space.kind ||
      label_space.class_count != dataset.label_space.class_count) {
    throw ConfigError("ensemble and dataset label spaces differ");
  }
  if (voters.empty()) throw ConfigError("ensemble has no voters");
  if (posterior.size() != voters.size()) {
    throw ConfigError("posterior length " + std::to_string(posterior.size()) +
                      " does not match voter count " +
                      std::to_string(voters.size()));
  }
  posterior.validate();
  for (const Voter& v : voters) v.validate(label_space, dataset.size());
}

std::vector<VoteProfile> aggregate(const Dataset& dataset,
                                   const std::vector<Voter>& voters,
                                   const Posterior& posterior) {
  if (posterior.size() != voters.size()) {
    throw ConfigError("posterior length " + std::to_string(posterior.size()) +
                      " does not match voter count " +
                      std::to_string(voters.size()));
  }
  posterior.validate();
  const LabelSpace& space = dataset.label_space;
  for (const Voter& v : voters) v.validate(space, dataset.size());

  const std::size_t m = dataset.size();
  const std::size_t q = static_cast<std::size_t>(space.class_count);
  std::vector<VoteProfile> profiles(m);

  for (std::size_t i = 0; i < m; ++i) {
    VoteProfile& profile = profiles[i];
    profile.kind = space.kind;
    switch (space.kind) {
      case LabelKind::binary: {
        double vote = 0.0;
        for (std::size_t j = 0; j < voters.size(); ++j) {
          vote += posterior.weights[j] * voters[j].real_output(dataset, i);
        }
        profile.values = {vote};
        break;
      }
      case LabelKind::multiclass: {
        profile.values.assign(q, 0.0);
        for (std::size_t j = 0; j < voters.size(); ++j) {
          const int c = voters[j].output(dataset, i).cls;
          profile.values[static_cast<std::size_t>(c - 1)] +=
              posterior.weights[j];
        }
        break;
      }
      case LabelKind::multilabel: {
        profile.values.assign(q, 0.0);
        for (std::size_t j = 0; j < voters.size(); ++j) {
          const BitVector& bits = voters[j].output(dataset, i).bits;
          for (std::size_t k = 0; k < q; ++k) {
            profile.values[k] += posterior.weights[j] * bits[k];
          }
        }
        break;
      }
    }
  }
  return profiles;
}

int predict_multiclass(const VoteProfile& profile) {
  if (profile.kind != LabelKind::multiclass) {
    throw ConfigError("predict_multiclass needs a multiclass profile");
  }
  std::size_t best = 0;
  for (std::size_t c = 1; c < profile.values.size(); ++c) {
    if (profile.values[c] > profile.values[best]) best = c;
  }
  return static_cast<int>(best) + 1;
}

BitVector predict_multilabel(const VoteProfile& profile) {
  if (profile.kind != LabelKind::multilabel) {
    throw ConfigError("predict_multilabel needs a multilabel profile");
  }
  BitVector bits(profile.values.size(), 0);
  for (std::size_t k = 0; k < profile.values.size(); ++k) {
    bits[k] = profile.values[k] > 0.5 ? 1 : 0;
  }
  return bits;
}

BitVector predict_multilabel_bruteforce(const VoteProfile& profile) {
  if (profile.kind != LabelKind::multilabel) {
    throw ConfigError("predict_multilabel needs a multilabel profile");
  }
  const std::size_t q = profile.values.size();
  if (q > 25) throw ConfigError("brute-force argmin limited to Q <= 25");
  const std::uint32_t count = 1u << q;
  std::uint32_t best = 0;
  double best_dist = 0.0;
  for (std::uint32_t cand = 0; cand < count; ++cand) {
    double dist = 0.0;
    for (std::size_t k = 0; k < q; ++k) {
      const double bit = (cand >> k) & 1u;
      const double diff = bit - profile.values[k];
      dist += diff * diff;
    }
    if (cand == 0 || dist < best_dist) {
      best = cand;
      best_dist = dist;
    }
  }
  BitVector bits(q, 0);
  for (std::size_t k = 0; k < q; ++k) bits[k] = (best >> k) & 1u;
  return bits;
}

double risk(const Dataset& dataset, const std::vector<double>& margins) {
  if (margins.size() != dataset.size()) {
    throw ConfigError("margin count " + std::to_string(margins.size()) +
                      " does not match example count " +
                      std::to_string(dataset.size()));
  }
  double p = 0.0;
  for (std::size_t i = 0; i < margins.size(); ++i) {
    if (margins[i] <= 0.0) p += dataset.examples[i].weight;
  }
  return p;
}

}  // namespace votebound
