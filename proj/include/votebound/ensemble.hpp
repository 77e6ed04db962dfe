#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "votebound/dataset.hpp"
#include "votebound/types.hpp"

namespace votebound {

enum class VoterKind { stump, table, realvalued_table };

std::string to_string(VoterKind kind);
VoterKind voter_kind_from_string(const std::string& name);

/// A base predictor. Stumps threshold one feature; tables carry one
/// prediction per dataset example; realvalued tables carry a confidence in
/// [-1,1] per example and exist only for the binary margin path.
struct Voter {
  VoterKind kind = VoterKind::table;

  // stump
  int feature_index = 0;
  double threshold = 0.0;
  Label left;   // output when feature <= threshold
  Label right;  // output otherwise

  // table
  std::vector<Label> predictions;

  // realvalued-table
  std::vector<double> values;

  /// Class or bit-vector output on example `i` of `dataset`.
  Label output(const Dataset& dataset, std::size_t i) const;

  /// Binary vote in [-1,1] on example `i` (sign of the class output for
  /// deterministic voters, stored confidence for realvalued tables).
  double real_output(const Dataset& dataset, std::size_t i) const;

  /// Checks the voter against a label space and dataset size.
  void validate(const LabelSpace& space, std::size_t example_count) const;
};

/// Simplex weights over a voter set.
struct Posterior {
  std::vector<double> weights;

  static Posterior uniform(std::size_t n);

  std::size_t size() const { return weights.size(); }
  void validate() const;  // nonnegative, sums to 1 within 1e-12
};

struct Ensemble {
  LabelSpace label_space;
  std::vector<Voter> voters;
  Posterior posterior;

  void validate(const Dataset& dataset) const;
};

/// Aggregated vote mass on one example: Q entries summing to 1 for
/// multiclass, Q confidences in [0,1] for multilabel, one scalar in [-1,1]
/// for binary.
struct VoteProfile {
  LabelKind kind = LabelKind::multiclass;
  std::vector<double> values;

  double scalar() const { return values.at(0); }
};

/// Per-example vote profiles in dataset order. Multiclass entry c is
/// sum_j rho_j * I(h_j(x) = c); multilabel is the componentwise weighted
/// mean of bit vectors; binary is the weighted mean vote.
std::vector<VoteProfile> aggregate(const Dataset& dataset,
                                   const std::vector<Voter>& voters,
                                   const Posterior& posterior);

/// argmax_c g(x,c), ties broken toward the lowest class index.
int predict_multiclass(const VoteProfile& profile);

/// Coordinatewise thresholding of the confidence vector at 1/2 (bit 0 on an
/// exact tie). Equal to the squared-distance argmin over {0,1}^Q.
BitVector predict_multilabel(const VoteProfile& profile);

/// Exhaustive squared-distance argmin over all 2^Q candidates; first minimal
/// candidate in increasing binary order wins. Test oracle for
/// predict_multilabel.
BitVector predict_multilabel_bruteforce(const VoteProfile& profile);

/// P(margin <= 0) under the dataset weights; ties count as errors. This
/// margin-based definition is the canonical risk everywhere in the library.
double risk(const Dataset& dataset, const std::vector<double>& margins);

}  // namespace votebound
