#include "votebound/bounds.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace votebound {

MomentPair moments(const std::vector<double>& margins, const Dataset& dataset) {
  if (margins.size() != dataset.size()) {
    throw ConfigError("margin count " + std::to_string(margins.size()) +
                      " does not match example count " +
                      std::to_string(dataset.size()));
  }
  MomentPair m;
  for (std::size_t i = 0; i < margins.size(); ++i) {
    const double w = dataset.examples[i].weight;
    m.mu1 += w * margins[i];
    m.mu2 += w * margins[i] * margins[i];
  }
  if (m.mu2 < 0.0 || m.mu1 * m.mu1 > m.mu2 + 1e-12) {
    throw InvariantViolation("moment pair breaks Jensen: mu1=" +
                             std::to_string(m.mu1) +
                             " mu2=" + std::to_string(m.mu2));
  }
  return m;
}

MomentPair moments(const MarginVector& margins, const Dataset& dataset) {
  return moments(margins.values, dataset);
}

double cbound(const MomentPair& m) {
  if (!(m.mu1 > 0.0)) {
    throw BoundUndefined("C-bound requires mu1 > 0, got mu1 = " +
                         std::to_string(m.mu1));
  }
  if (!(m.mu2 > 0.0)) {
    throw InvariantViolation("mu2 = 0 with mu1 > 0 is impossible (Jensen)");
  }
  return 1.0 - (m.mu1 * m.mu1) / m.mu2;
}

double strength_bound(const Dataset& dataset,
                      const std::vector<VoteProfile>& profiles) {
  const int q = dataset.label_space.class_count;
  double ratio_sum = 0.0;
  for (int c = 1; c <= q; ++c) {
    const MomentPair m = moments(strength_margin(profiles, dataset, c), dataset);
    if (!(m.mu1 > 0.0)) {
      throw BoundUndefined("strength bound requires mu1(S_c) > 0 for every "
                           "class; class " + std::to_string(c) +
                           " has mu1 = " + std::to_string(m.mu1));
    }
    ratio_sum += (m.mu1 * m.mu1) / m.mu2;
  }
  return static_cast<double>(q - 1) - ratio_sum;
}

double union_bound(const Dataset& dataset,
                   const std::vector<VoteProfile>& profiles) {
  const int q = dataset.label_space.class_count;
  double total = 0.0;
  for (int c = 1; c <= q; ++c) {
    const MarginVector s = strength_margin(profiles, dataset, c);
    total += risk(dataset, s.values);
  }
  return total - 1.0;
}

SandwichResult sandwich(const Dataset& dataset,
                        const std::vector<VoteProfile>& profiles) {
  if (dataset.label_space.kind != LabelKind::multiclass) {
    throw ConfigError("sandwich requires a multiclass dataset");
  }
  // The left inequality's proof averages g over the Q-1 wrong classes, which
  // needs the vote mass to be a distribution.
  for (const VoteProfile& p : profiles) {
    double sum = 0.0;
    for (double v : p.values) sum += v;
    if (std::abs(sum - 1.0) > 1e-9) {
      throw InvariantViolation("vote profile sums to " + std::to_string(sum) +
                               "; deterministic voters required");
    }
  }
  const int q = dataset.label_space.class_count;
  SandwichResult r;
  r.lower = risk(dataset, omega_margin(profiles, dataset, q).values);
  r.risk = risk(dataset, multiclass_margin(profiles, dataset).values);
  r.upper = risk(dataset, omega_margin(profiles, dataset, 2.0).values);
  if (r.lower > r.risk + 1e-12 || r.risk > r.upper + 1e-12) {
    throw InvariantViolation("sandwich chain broken: " +
                             std::to_string(r.lower) + " <= " +
                             std::to_string(r.risk) + " <= " +
                             std::to_string(r.upper));
  }
  return r;
}

double omega_cbound(const Dataset& dataset,
                    const std::vector<VoteProfile>& profiles, double omega) {
  return cbound(moments(omega_margin(profiles, dataset, omega), dataset));
}

double multilabel_cbound(const Dataset& dataset,
                         const std::vector<VoteProfile>& profiles) {
  const MarginVector two = two_margin(profiles, dataset);
  const double bound = cbound(moments(two, dataset));
  const double exact_risk =
      risk(dataset, multilabel_margin(profiles, dataset).values);
  const double p_two = risk(dataset, two.values);
  if (exact_risk > p_two + 1e-12 || p_two > bound + 1e-12) {
    throw InvariantViolation("multilabel chain broken: risk " +
                             std::to_string(exact_risk) + ", P(two<=0) " +
                             std::to_string(p_two) + ", bound " +
                             std::to_string(bound));
  }
  return bound;
}

BoundEntry BoundEntry::inapplicable() {
  BoundEntry e;
  e.applicable = false;
  return e;
}

BoundEntry BoundEntry::undefined(std::string why) {
  BoundEntry e;
  e.applicable = true;
  e.defined = false;
  e.reason = std::move(why);
  return e;
}

BoundEntry BoundEntry::ok(double v) {
  BoundEntry e;
  e.applicable = true;
  e.defined = true;
  e.value = v;
  e.clipped = std::min(1.0, v);
  return e;
}

namespace {

template <typename Fn>
BoundEntry guarded(Fn&& fn) {
  try {
    return BoundEntry::ok(fn());
  } catch (const BoundUndefined& e) {
    return BoundEntry::undefined(e.what());
  }
}

}  // namespace

BoundReport full_report(const Dataset& dataset, const Ensemble& ensemble,
                        const ReportSettings& settings) {
  ensemble.validate(dataset);
  if (!(settings.omega >= 1.0)) {
    throw ConfigError("omega must be >= 1, got " +
                      std::to_string(settings.omega));
  }

  BoundReport report;
  report.kind = dataset.label_space.kind;
  report.class_count = dataset.label_space.class_count;
  report.settings = settings;
  report.theorem1 = BoundEntry::inapplicable();
  report.theorem4 = BoundEntry::inapplicable();
  report.theorem5 = BoundEntry::inapplicable();
  report.theorem6 = BoundEntry::inapplicable();
  report.theorem7 = BoundEntry::inapplicable();
  report.eq2_union = BoundEntry::inapplicable();
  report.theorem3_lower = BoundEntry::inapplicable();
  report.theorem3_upper = BoundEntry::inapplicable();

  const auto profiles = aggregate(dataset, ensemble.voters, ensemble.posterior);

  switch (report.kind) {
    case LabelKind::binary: {
      const MarginVector m = binary_margin(profiles, dataset);
      const MomentPair mom = moments(m, dataset);
      report.risk = risk(dataset, m.values);
      report.moment_families["binary"] = mom;
      report.theorem1 = guarded([&] { return cbound(mom); });
      break;
    }
    case LabelKind::multiclass: {
      const int q = dataset.label_space.class_count;
      const MarginVector m = multiclass_margin(profiles, dataset);
      report.risk = risk(dataset, m.values);
      report.moment_families["multiclass"] = moments(m, dataset);
      report.moment_families["omega"] =
          moments(omega_margin(profiles, dataset, settings.omega), dataset);
      report.moment_families["omega2"] =
          moments(omega_margin(profiles, dataset, 2.0), dataset);
      report.moment_families["omegaQ"] =
          moments(omega_margin(profiles, dataset, q), dataset);
      for (int c = 1; c <= q; ++c) {
        report.strength_moments.push_back(
            moments(strength_margin(profiles, dataset, c), dataset));
      }
      report.theorem4 =
          guarded([&] { return cbound(report.moment_families["multiclass"]); });
      report.theorem5 = guarded([&] { return strength_bound(dataset, profiles); });
      report.theorem6 =
          guarded([&] { return omega_cbound(dataset, profiles, settings.omega); });
      report.eq2_union = BoundEntry::ok(union_bound(dataset, profiles));
      const SandwichResult sw = sandwich(dataset, profiles);
      report.theorem3_lower = BoundEntry::ok(sw.lower);
      report.theorem3_upper = BoundEntry::ok(sw.upper);
      report.p_margin_q_leq0 = sw.lower;
      report.p_margin_2_leq0 = sw.upper;
      break;
    }
    case LabelKind::multilabel: {
      const MarginVector m = multilabel_margin(profiles, dataset);
      const MarginVector two = two_margin(profiles, dataset);
      report.risk = risk(dataset, m.values);
      report.moment_families["multilabel"] = moments(m, dataset);
      report.moment_families["twoMargin"] = moments(two, dataset);
      report.p_two_margin_leq0 = risk(dataset, two.values);
      report.theorem7 =
          guarded([&] { return multilabel_cbound(dataset, profiles); });
      break;
    }
  }
  return report;
}

}  // namespace votebound
