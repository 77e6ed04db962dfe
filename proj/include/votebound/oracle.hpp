#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "votebound/bounds.hpp"
#include "votebound/dataset.hpp"
#include "votebound/ensemble.hpp"
#include "votebound/rng.hpp"

namespace votebound::oracle {

/// Recipe for one random small instance. Table voters predict the true
/// label with probability `voter_accuracy`, otherwise uniformly among the
/// other labels; the posterior is drawn flat on the simplex.
struct InstanceSpec {
  LabelKind kind = LabelKind::multiclass;
  int class_count = 3;
  int voter_count = 3;
  int example_count = 10;
  std::uint64_t seed = 0;
  double voter_accuracy = 0.8;

  void validate() const;
};

struct Instance {
  Dataset dataset;
  Ensemble ensemble;
};

/// Deterministic instance given the seed.
Instance generate(const InstanceSpec& spec);

struct Violation {
  std::uint64_t seed = 0;
  std::string property;
  double lhs = 0.0;
  double rhs = 0.0;
};

struct VerificationResult {
  std::string property;
  int trials = 0;
  int checked = 0;  // trials whose hypotheses held and were actually tested
  std::vector<Violation> violations;

  bool passed() const { return violations.empty(); }
};

/// Known property names accepted by verify().
const std::vector<std::string>& property_names();

struct VerifyOptions {
  int threads = 1;
  /// Self-test hook: flips every inequality so a healthy implementation is
  /// reported as violating. Proves the harness can detect failures.
  bool inject_bug = false;
};

/// Runs every spec and checks the named inequality exactly; all
/// probabilities are finite sums of dataset weights, so there is no sampling
/// error inside a trial. Inequalities allow 1e-9 slack for accumulated
/// rounding; exact-identity properties use 1e-12.
VerificationResult verify(const std::string& property,
                          const std::vector<InstanceSpec>& specs,
                          const VerifyOptions& options = {});

}  // namespace votebound::oracle
