#pragma once

#include <vector>

#include "votebound/dataset.hpp"
#include "votebound/ensemble.hpp"

namespace votebound {

enum class MarginKind { binary, multiclass, strength, omega, multilabel, two_margin };

/// One margin value per dataset example, in dataset order.
struct MarginVector {
  MarginKind kind = MarginKind::multiclass;
  std::vector<double> values;

  // context, set when applicable
  double omega = 0.0;
  int strength_class = 0;
};

/// y * E_{h~rho} h(x).
MarginVector binary_margin(const std::vector<VoteProfile>& profiles,
                           const Dataset& dataset);

/// g(x,y) - max_{c != y} g(x,c).
MarginVector multiclass_margin(const std::vector<VoteProfile>& profiles,
                               const Dataset& dataset);

/// g(x,y) - g(x,c) for a fixed class c in 1..Q.
MarginVector strength_margin(const std::vector<VoteProfile>& profiles,
                             const Dataset& dataset, int c);

/// g(x,y) - 1/omega, omega >= 1.
MarginVector omega_margin(const std::vector<VoteProfile>& profiles,
                          const Dataset& dataset, double omega);

/// How the best rival label vector is found in multilabel_margin.
enum class RivalSearch {
  automatic,   // enumerate up to the cutoff, closed form above it
  enumerate,   // explicit scan over all 2^Q - 1 rivals
  closed_form  // O(Q) reduction, equal to the scan (cross-checked in tests)
};

inline constexpr int kRivalEnumerationCutoff = 20;

/// Multilabel margin: with v = E h(x) - (1/2)1, the score of the target
/// minus the best rival score over all other label vectors.
MarginVector multilabel_margin(const std::vector<VoteProfile>& profiles,
                               const Dataset& dataset,
                               RivalSearch search = RivalSearch::automatic);

/// Best rival score max_{c != y} v . (c - (1/2)1) for one confidence vector;
/// exposed so the closed form can be checked against enumeration.
double best_rival_score(const std::vector<double>& confidence,
                        const BitVector& target, RivalSearch search);

/// 2-margin: (E h(x) - y_{i->1/2}) . (y - (1/2)1), where y_{i->1/2} is the
/// target with coordinate i replaced by 1/2 (i = 1 here; the value is
/// independent of i, a tested invariant). This signed-distance form is the
/// one whose positive sign certifies an exactly correct prediction; the
/// algebraic form v.y - (1/2)v.1 - (1/2)|y| - 1/4 evaluates exactly 1/2
/// lower (also pinned by tests).
MarginVector two_margin(const std::vector<VoteProfile>& profiles,
                        const Dataset& dataset);

/// Same, with an explicit replaced coordinate in 1..Q; used to assert the
/// i-invariance.
double two_margin_at(const VoteProfile& profile, const Label& target,
                     int replaced_coordinate);

}  // namespace votebound
