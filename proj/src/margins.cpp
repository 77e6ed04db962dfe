#include "votebound/margins.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace votebound {

namespace {

void require_kind(const std::vector<VoteProfile>& profiles,
                  const Dataset& dataset, LabelKind kind, const char* op) {
  if (dataset.label_space.kind != kind) {
    throw ConfigError(std::string(op) + " requires a " +
                      to_string(kind) + " dataset, got " +
                      to_string(dataset.label_space.kind));
  }
  if (profiles.size() != dataset.size()) {
    throw ConfigError("profile count does not match example count");
  }
  for (const VoteProfile& p : profiles) {
    if (p.kind != kind) {
      throw ConfigError(std::string(op) + ": profile kind mismatch");
    }
  }
}

}  // namespace

MarginVector binary_margin(const std::vector<VoteProfile>& profiles,
                           const Dataset& dataset) {
  require_kind(profiles, dataset, LabelKind::binary, "binary_margin");
  MarginVector out;
  out.kind = MarginKind::binary;
  out.values.reserve(profiles.size());
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    const double y = dataset.examples[i].target.cls;
    out.values.push_back(y * profiles[i].scalar());
  }
  return out;
}

MarginVector multiclass_margin(const std::vector<VoteProfile>& profiles,
                               const Dataset& dataset) {
  require_kind(profiles, dataset, LabelKind::multiclass, "multiclass_margin");
  MarginVector out;
  out.kind = MarginKind::multiclass;
  out.values.reserve(profiles.size());
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    const auto& g = profiles[i].values;
    const std::size_t y = static_cast<std::size_t>(dataset.examples[i].target.cls - 1);
    double best_other = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < g.size(); ++c) {
      if (c != y && g[c] > best_other) best_other = g[c];
    }
    out.values.push_back(g[y] - best_other);
  }
  return out;
}

MarginVector strength_margin(const std::vector<VoteProfile>& profiles,
                             const Dataset& dataset, int c) {
  require_kind(profiles, dataset, LabelKind::multiclass, "strength_margin");
  if (c < 1 || c > dataset.label_space.class_count) {
    throw ConfigError("strength class " + std::to_string(c) +
                      " out of range 1.." +
                      std::to_string(dataset.label_space.class_count));
  }
  MarginVector out;
  out.kind = MarginKind::strength;
  out.strength_class = c;
  out.values.reserve(profiles.size());
  const std::size_t ci = static_cast<std::size_t>(c - 1);
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    const auto& g = profiles[i].values;
    const std::size_t y = static_cast<std::size_t>(dataset.examples[i].target.cls - 1);
    out.values.push_back(g[y] - g[ci]);
  }
  return out;
}

MarginVector omega_margin(const std::vector<VoteProfile>& profiles,
                          const Dataset& dataset, double omega) {
  require_kind(profiles, dataset, LabelKind::multiclass, "omega_margin");
  if (!(omega >= 1.0)) {
    throw ConfigError("omega must be >= 1, got " + std::to_string(omega));
  }
  const double threshold = 1.0 / omega;
  MarginVector out;
  out.kind = MarginKind::omega;
  out.omega = omega;
  out.values.reserve(profiles.size());
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    const std::size_t y = static_cast<std::size_t>(dataset.examples[i].target.cls - 1);
    out.values.push_back(profiles[i].values[y] - threshold);
  }
  return out;
}

namespace {

double label_score(const std::vector<double>& shifted, const BitVector& bits) {
  // shifted = confidence - 1/2; score = (candidate - 1/2) . shifted up to a
  // constant shared by all candidates, so candidate . shifted orders them.
  double s = 0.0;
  for (std::size_t k = 0; k < shifted.size(); ++k) {
    if (bits[k]) s += shifted[k];
  }
  return s;
}

double rival_best_enumerated(const std::vector<double>& shifted,
                             const BitVector& target) {
  const std::size_t q = shifted.size();
  if (q > 25) {
    throw ConfigError("rival enumeration limited to Q <= 25, got " +
                      std::to_string(q));
  }
  std::uint32_t target_index = 0;
  for (std::size_t k = 0; k < q; ++k) {
    if (target[k]) target_index |= 1u << k;
  }
  const std::uint32_t count = 1u << q;
  double best = -std::numeric_limits<double>::infinity();
  for (std::uint32_t cand = 0; cand < count; ++cand) {
    if (cand == target_index) continue;
    double s = 0.0;
    for (std::size_t k = 0; k < q; ++k) {
      if ((cand >> k) & 1u) s += shifted[k];
    }
    best = std::max(best, s);
  }
  return best;
}

// The unconstrained maximizer of candidate . shifted sets bit k iff
// shifted_k > 0. When the target itself is that unique maximizer, the best
// rival flips the cheapest coordinate; any zero coordinate makes another
// maximizer available at no cost.
double rival_best_closed(const std::vector<double>& shifted,
                         const BitVector& target) {
  double top = 0.0;
  double cheapest_flip = std::numeric_limits<double>::infinity();
  bool target_is_top = true;
  for (std::size_t k = 0; k < shifted.size(); ++k) {
    const double s = shifted[k];
    if (s > 0.0) top += s;
    if (s == 0.0) {
      cheapest_flip = 0.0;
      continue;
    }
    if ((s > 0.0) != (target[k] != 0)) target_is_top = false;
    cheapest_flip = std::min(cheapest_flip, std::abs(s));
  }
  if (!target_is_top) return top;
  return top - cheapest_flip;
}

}  // namespace

double best_rival_score(const std::vector<double>& confidence,
                        const BitVector& target, RivalSearch search) {
  if (confidence.size() != target.size()) {
    throw ConfigError("confidence and target lengths differ");
  }
  std::vector<double> shifted(confidence.size());
  for (std::size_t k = 0; k < confidence.size(); ++k) {
    shifted[k] = confidence[k] - 0.5;
  }
  const int q = static_cast<int>(confidence.size());
  switch (search) {
    case RivalSearch::enumerate:
      return rival_best_enumerated(shifted, target);
    case RivalSearch::closed_form:
      return rival_best_closed(shifted, target);
    case RivalSearch::automatic:
      return q <= kRivalEnumerationCutoff ? rival_best_enumerated(shifted, target)
                                          : rival_best_closed(shifted, target);
  }
  throw ConfigError("bad rival search mode");
}

MarginVector multilabel_margin(const std::vector<VoteProfile>& profiles,
                               const Dataset& dataset, RivalSearch search) {
  require_kind(profiles, dataset, LabelKind::multilabel, "multilabel_margin");
  MarginVector out;
  out.kind = MarginKind::multilabel;
  out.values.reserve(profiles.size());
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    const auto& conf = profiles[i].values;
    const BitVector& y = dataset.examples[i].target.bits;
    std::vector<double> shifted(conf.size());
    for (std::size_t k = 0; k < conf.size(); ++k) shifted[k] = conf[k] - 0.5;
    const double own = label_score(shifted, y);
    const double rival = best_rival_score(conf, y, search);
    out.values.push_back(own - rival);
  }
  return out;
}

double two_margin_at(const VoteProfile& profile, const Label& target,
                     int replaced_coordinate) {
  if (profile.kind != LabelKind::multilabel) {
    throw ConfigError("two_margin needs a multilabel profile");
  }
  const std::size_t q = profile.values.size();
  if (replaced_coordinate < 1 || static_cast<std::size_t>(replaced_coordinate) > q) {
    throw ConfigError("two_margin coordinate out of range");
  }
  const BitVector& y = target.bits;
  if (y.size() != q) throw ConfigError("target length does not match profile");
  const std::size_t r = static_cast<std::size_t>(replaced_coordinate - 1);
  double value = 0.0;
  for (std::size_t k = 0; k < q; ++k) {
    const double yk = static_cast<double>(y[k]);
    const double replaced = (k == r) ? 0.5 : yk;
    value += (profile.values[k] - replaced) * (yk - 0.5);
  }
  return value;
}

MarginVector two_margin(const std::vector<VoteProfile>& profiles,
                        const Dataset& dataset) {
  require_kind(profiles, dataset, LabelKind::multilabel, "two_margin");
  MarginVector out;
  out.kind = MarginKind::two_margin;
  out.values.reserve(profiles.size());
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    out.values.push_back(two_margin_at(profiles[i], dataset.examples[i].target, 1));
  }
  return out;
}

}  // namespace votebound
