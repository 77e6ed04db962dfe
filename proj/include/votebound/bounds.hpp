#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "votebound/dataset.hpp"
#include "votebound/ensemble.hpp"
#include "votebound/margins.hpp"

namespace votebound {

/// First and second statistical moments of a margin random variable under
/// the dataset distribution. mu1^2 <= mu2 always (Jensen).
struct MomentPair {
  double mu1 = 0.0;
  double mu2 = 0.0;

  double variance() const { return mu2 - mu1 * mu1; }
};

/// mu1 = sum w_i m_i, mu2 = sum w_i m_i^2, accumulated left to right.
MomentPair moments(const MarginVector& margins, const Dataset& dataset);
MomentPair moments(const std::vector<double>& margins, const Dataset& dataset);

/// 1 - mu1^2/mu2. Requires mu1 > 0 (strict, no epsilon slack); throws
/// BoundUndefined otherwise. mu2 = 0 with mu1 > 0 is impossible by Jensen
/// and reported as InvariantViolation.
double cbound(const MomentPair& m);

/// (Q-1) - sum_c mu1(S_c)^2/mu2(S_c). Requires mu1(S_c) > 0 for every class;
/// throws BoundUndefined naming the first offending class.
double strength_bound(const Dataset& dataset,
                      const std::vector<VoteProfile>& profiles);

/// sum_c P(S_c <= 0) - 1. Equals the risk exactly when Q = 2.
double union_bound(const Dataset& dataset,
                   const std::vector<VoteProfile>& profiles);

struct SandwichResult {
  double lower = 0.0;  // P(M_{rho,Q} <= 0)
  double risk = 0.0;   // P(M_rho <= 0)
  double upper = 0.0;  // P(M_{rho,2} <= 0)
};

/// The two-sided relation between the risk and the omega-margin tail
/// probabilities at omega = Q and omega = 2. Requires profiles that sum to 1
/// (deterministic voters); throws InvariantViolation otherwise, or when the
/// chain lower <= risk <= upper is observed broken.
SandwichResult sandwich(const Dataset& dataset,
                        const std::vector<VoteProfile>& profiles);

/// C-bound of the omega-margin: upper-bounds P(M_{rho,omega} <= 0), which at
/// omega = 2 upper-bounds the risk.
double omega_cbound(const Dataset& dataset,
                    const std::vector<VoteProfile>& profiles, double omega);

/// C-bound of the multilabel 2-margin: upper-bounds P(two_margin <= 0),
/// which upper-bounds the exact-match risk.
double multilabel_cbound(const Dataset& dataset,
                         const std::vector<VoteProfile>& profiles);

struct BoundEntry {
  bool defined = false;
  bool applicable = false;  // variant applies to this label kind
  double value = 0.0;       // raw theorem value (theorem5 may exceed 1)
  double clipped = 0.0;     // min(1, value), display only
  std::string reason;       // set when applicable but undefined

  static BoundEntry inapplicable();
  static BoundEntry undefined(std::string why);
  static BoundEntry ok(double v);
};

struct ReportSettings {
  double omega = 2.0;
  std::uint64_t seed = 0;
};

/// Everything the CLI serializes for one (dataset, ensemble, settings)
/// triple. Bounds with failed preconditions are marked undefined, never
/// silently clipped.
struct BoundReport {
  LabelKind kind = LabelKind::multiclass;
  int class_count = 0;
  ReportSettings settings;

  double risk = 0.0;

  BoundEntry theorem1;       // binary C-bound
  BoundEntry theorem4;       // multiclass C-bound
  BoundEntry theorem5;       // strength bound
  BoundEntry theorem6;       // omega C-bound at settings.omega
  BoundEntry theorem7;       // multilabel C-bound
  BoundEntry eq2_union;      // union bound
  BoundEntry theorem3_lower; // P(M_{rho,Q} <= 0)
  BoundEntry theorem3_upper; // P(M_{rho,2} <= 0)

  std::optional<double> p_margin_q_leq0;
  std::optional<double> p_margin_2_leq0;
  std::optional<double> p_two_margin_leq0;

  /// Moments per margin family ("binary", "multiclass", "omega", "omega2",
  /// "omegaQ", "multilabel", "twoMargin").
  std::map<std::string, MomentPair> moment_families;
  std::vector<MomentPair> strength_moments;  // per class, multiclass only
};

BoundReport full_report(const Dataset& dataset, const Ensemble& ensemble,
                        const ReportSettings& settings);

}  // namespace votebound
