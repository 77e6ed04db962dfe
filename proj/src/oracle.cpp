#include "votebound/oracle.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <mutex>
#include <thread>

#include "votebound/margins.hpp"

namespace votebound::oracle {

namespace {

constexpr double kIneqTol = 1e-9;   // absorbs accumulated rounding
constexpr double kExactTol = 1e-12; // exact-identity properties

}  // namespace

void InstanceSpec::validate() const {
  if (kind == LabelKind::binary) {
    if (class_count != 2) throw ConfigError("binary instances fix Q to 2");
  } else if (kind == LabelKind::multilabel) {
    if (class_count < 2 || class_count > 6) {
      throw ConfigError("multilabel enumeration requires 2 <= Q <= 6, got " +
                        std::to_string(class_count));
    }
  } else if (class_count < 2) {
    throw ConfigError("multiclass instances require Q >= 2");
  }
  if (voter_count < 1) throw ConfigError("voter count must be >= 1");
  if (example_count < 1) throw ConfigError("example count must be >= 1");
  if (!(voter_accuracy >= 0.0 && voter_accuracy <= 1.0)) {
    throw ConfigError("voter accuracy must lie in [0,1]");
  }
}

Instance generate(const InstanceSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  const int q = spec.class_count;
  const int m = spec.example_count;
  const int n = spec.voter_count;

  std::vector<Label> targets(m);
  for (auto& t : targets) {
    switch (spec.kind) {
      case LabelKind::binary:
        t.cls = rng.uniform_int(0, 1) ? 1 : -1;
        break;
      case LabelKind::multiclass:
        t.cls = rng.uniform_int(1, q);
        break;
      case LabelKind::multilabel:
        t.bits.resize(q);
        for (auto& b : t.bits) b = static_cast<std::uint8_t>(rng.uniform_int(0, 1));
        break;
    }
  }

  std::vector<std::vector<double>> features(m);
  for (auto& f : features) f = {rng.uniform01(), rng.uniform01()};

  std::vector<Voter> voters(n);
  for (auto& voter : voters) {
    voter.kind = VoterKind::table;
    voter.predictions.resize(m);
    for (int i = 0; i < m; ++i) {
      const Label& y = targets[i];
      Label& p = voter.predictions[i];
      const bool correct = rng.uniform01() < spec.voter_accuracy;
      switch (spec.kind) {
        case LabelKind::binary:
          p.cls = correct ? y.cls : -y.cls;
          break;
        case LabelKind::multiclass: {
          if (correct) {
            p.cls = y.cls;
          } else {
            const int k = rng.uniform_int(1, q - 1);
            p.cls = k >= y.cls ? k + 1 : k;
          }
          break;
        }
        case LabelKind::multilabel: {
          p.bits = y.bits;
          if (!correct) {
            // uniform over the 2^Q - 1 other label vectors via a nonzero flip mask
            const int mask = rng.uniform_int(1, (1 << q) - 1);
            for (int k = 0; k < q; ++k) p.bits[k] ^= (mask >> k) & 1;
          }
          break;
        }
      }
    }
  }

  Posterior posterior;
  posterior.weights = rng.simplex(static_cast<std::size_t>(n));

  Instance inst;
  inst.dataset = make_dataset(LabelSpace{spec.kind, q}, std::move(features),
                              std::move(targets));
  inst.ensemble = Ensemble{LabelSpace{spec.kind, q}, std::move(voters),
                           std::move(posterior)};
  inst.ensemble.validate(inst.dataset);
  return inst;
}

namespace {

struct TrialOutcome {
  bool checked = false;
  std::vector<Violation> violations;
};

struct Checker {
  const InstanceSpec& spec;
  bool inject_bug;
  TrialOutcome out{};

  // Records a violation of lhs <= rhs + tol; with the bug injected the test
  // is flipped so healthy code trips it.
  void leq(const std::string& name, double lhs, double rhs, double tol) {
    const bool violated = inject_bug ? !(lhs > rhs + tol) : (lhs > rhs + tol);
    if (violated) out.violations.push_back({spec.seed, name, lhs, rhs});
  }
  void close(const std::string& name, double lhs, double rhs, double tol) {
    const bool violated =
        inject_bug ? !(std::abs(lhs - rhs) > tol) : (std::abs(lhs - rhs) > tol);
    if (violated) out.violations.push_back({spec.seed, name, lhs, rhs});
  }
};

TrialOutcome trial_cbound_dominates_risk(const InstanceSpec& spec, bool inject) {
  Checker chk{spec, inject};
  const Instance inst = generate(spec);
  const auto profiles =
      aggregate(inst.dataset, inst.ensemble.voters, inst.ensemble.posterior);
  const MarginVector m = spec.kind == LabelKind::binary
                             ? binary_margin(profiles, inst.dataset)
                             : multiclass_margin(profiles, inst.dataset);
  const MomentPair mom = moments(m, inst.dataset);
  if (mom.mu1 > 0.0) {
    chk.out.checked = true;
    chk.leq("cbound-dominates-risk", risk(inst.dataset, m.values), cbound(mom),
            kIneqTol);
  }
  return chk.out;
}

TrialOutcome trial_sandwich(const InstanceSpec& spec, bool inject) {
  Checker chk{spec, inject};
  const Instance inst = generate(spec);
  const auto profiles =
      aggregate(inst.dataset, inst.ensemble.voters, inst.ensemble.posterior);
  const int q = inst.dataset.label_space.class_count;
  const double lower =
      risk(inst.dataset, omega_margin(profiles, inst.dataset, q).values);
  const double mid =
      risk(inst.dataset, multiclass_margin(profiles, inst.dataset).values);
  const double upper =
      risk(inst.dataset, omega_margin(profiles, inst.dataset, 2.0).values);
  chk.out.checked = true;
  chk.leq("sandwich/lower", lower, mid, kIneqTol);
  chk.leq("sandwich/upper", mid, upper, kIneqTol);
  return chk.out;
}

TrialOutcome trial_union_bound(const InstanceSpec& spec, bool inject) {
  Checker chk{spec, inject};
  const Instance inst = generate(spec);
  const auto profiles =
      aggregate(inst.dataset, inst.ensemble.voters, inst.ensemble.posterior);
  const double r =
      risk(inst.dataset, multiclass_margin(profiles, inst.dataset).values);
  const double ub = union_bound(inst.dataset, profiles);
  chk.out.checked = true;
  chk.leq("union-bound", r, ub, kIneqTol);
  if (inst.dataset.label_space.class_count == 2) {
    chk.close("union-bound/equality-q2", r, ub, kExactTol);
  }
  return chk.out;
}

TrialOutcome trial_strength_bound(const InstanceSpec& spec, bool inject) {
  Checker chk{spec, inject};
  const Instance inst = generate(spec);
  const auto profiles =
      aggregate(inst.dataset, inst.ensemble.voters, inst.ensemble.posterior);
  const int q = inst.dataset.label_space.class_count;
  bool hypotheses = true;
  for (int c = 1; c <= q && hypotheses; ++c) {
    const MomentPair m =
        moments(strength_margin(profiles, inst.dataset, c), inst.dataset);
    hypotheses = m.mu1 > 0.0;
  }
  if (hypotheses) {
    chk.out.checked = true;
    const double r =
        risk(inst.dataset, multiclass_margin(profiles, inst.dataset).values);
    chk.leq("strength-bound", r, strength_bound(inst.dataset, profiles),
            kIneqTol);
  }
  return chk.out;
}

TrialOutcome trial_omega_cbound(const InstanceSpec& spec, bool inject) {
  Checker chk{spec, inject};
  const Instance inst = generate(spec);
  const auto profiles =
      aggregate(inst.dataset, inst.ensemble.voters, inst.ensemble.posterior);
  const int q = inst.dataset.label_space.class_count;
  for (double omega : {2.0, 3.0, static_cast<double>(q)}) {
    const MarginVector m = omega_margin(profiles, inst.dataset, omega);
    const MomentPair mom = moments(m, inst.dataset);
    if (!(mom.mu1 > 0.0)) continue;
    chk.out.checked = true;
    const double bound = cbound(mom);
    chk.leq("omega-cbound", risk(inst.dataset, m.values), bound, kIneqTol);
    if (omega == 2.0) {
      const double r =
          risk(inst.dataset, multiclass_margin(profiles, inst.dataset).values);
      chk.leq("omega-cbound/risk-omega2", r, bound, kIneqTol);
    }
  }
  return chk.out;
}

TrialOutcome trial_multilabel_cbound(const InstanceSpec& spec, bool inject) {
  Checker chk{spec, inject};
  const Instance inst = generate(spec);
  const auto profiles =
      aggregate(inst.dataset, inst.ensemble.voters, inst.ensemble.posterior);
  const MarginVector two = two_margin(profiles, inst.dataset);
  const MomentPair mom = moments(two, inst.dataset);
  if (mom.mu1 > 0.0) {
    chk.out.checked = true;
    const double bound = cbound(mom);
    const double r = risk(
        inst.dataset, multilabel_margin(profiles, inst.dataset).values);
    const double p_two = risk(inst.dataset, two.values);
    chk.leq("multilabel-cbound/risk-vs-tail", r, p_two, kIneqTol);
    chk.leq("multilabel-cbound/tail-vs-bound", p_two, bound, kIneqTol);
  }
  return chk.out;
}

// Random confidence vectors in [0,1]^Q with random targets; no ensemble is
// needed for the two geometric properties.
VoteProfile random_confidence(Rng& rng, int q, Label& target) {
  target.bits.resize(q);
  for (auto& b : target.bits) b = static_cast<std::uint8_t>(rng.uniform_int(0, 1));
  VoteProfile p;
  p.kind = LabelKind::multilabel;
  p.values.resize(q);
  for (auto& v : p.values) v = rng.uniform01();
  return p;
}

TrialOutcome trial_two_margin_implies_correct(const InstanceSpec& spec,
                                              bool inject) {
  Checker chk{spec, inject};
  Rng rng(spec.seed);
  const int q = spec.class_count;
  for (int i = 0; i < spec.example_count; ++i) {
    Label target;
    VoteProfile p = random_confidence(rng, q, target);
    if (i % 2 == 1) {
      // pull the confidence toward the target so the positive-margin branch
      // of the implication fires often
      for (int k = 0; k < q; ++k) {
        const double u = 0.8 + 0.2 * rng.uniform01();
        p.values[k] = 0.5 + (target.bits[k] ? u : -u) / 2.0;
      }
    }
    const double two = two_margin_at(p, target, 1);
    if (!(two > 0.0)) continue;
    chk.out.checked = true;
    const bool exhaustive_ok = predict_multilabel_bruteforce(p) == target.bits;
    const bool threshold_ok = predict_multilabel(p) == target.bits;
    const bool good = exhaustive_ok && threshold_ok;
    if (inject ? good : !good) {
      chk.out.violations.push_back(
          {spec.seed, "two-margin-implies-correct", two, 0.0});
    }
  }
  return chk.out;
}

TrialOutcome trial_two_margin_i_invariance(const InstanceSpec& spec,
                                           bool inject) {
  Checker chk{spec, inject};
  Rng rng(spec.seed);
  const int q = spec.class_count;
  chk.out.checked = true;
  for (int i = 0; i < spec.example_count; ++i) {
    Label target;
    const VoteProfile p = random_confidence(rng, q, target);
    double lo = two_margin_at(p, target, 1);
    double hi = lo;
    for (int r = 2; r <= q; ++r) {
      const double v = two_margin_at(p, target, r);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    chk.close("two-margin-i-invariance", hi, lo, kExactTol);
  }
  return chk.out;
}

TrialOutcome trial_binary_collapse(const InstanceSpec& spec, bool inject) {
  if (spec.class_count != 2 || spec.kind != LabelKind::multiclass) {
    throw ConfigError("binary-collapse requires multiclass instances with Q=2");
  }
  Checker chk{spec, inject};
  const Instance inst = generate(spec);
  const auto profiles =
      aggregate(inst.dataset, inst.ensemble.voters, inst.ensemble.posterior);
  const MarginVector mc = multiclass_margin(profiles, inst.dataset);
  const MarginVector om2 = omega_margin(profiles, inst.dataset, 2.0);
  chk.out.checked = true;
  for (std::size_t i = 0; i < mc.values.size(); ++i) {
    chk.close("binary-collapse/margin-identity", mc.values[i],
              2.0 * om2.values[i], kExactTol);
  }
  const double lower =
      risk(inst.dataset, omega_margin(profiles, inst.dataset, 2).values);
  const double mid = risk(inst.dataset, mc.values);
  const double upper = risk(inst.dataset, om2.values);
  chk.close("binary-collapse/probs-lower", lower, mid, kExactTol);
  chk.close("binary-collapse/probs-upper", mid, upper, kExactTol);
  return chk.out;
}

TrialOutcome trial_cantelli_base(const InstanceSpec& spec, bool inject) {
  Checker chk{spec, inject};
  Rng rng(spec.seed);
  const int support = std::max(2, spec.example_count);
  std::vector<double> z(support);
  for (auto& v : z) v = 2.0 * rng.uniform01() - 1.0;
  const std::vector<double> p = rng.simplex(static_cast<std::size_t>(support));
  double mu1 = 0.0;
  for (int i = 0; i < support; ++i) mu1 += p[i] * z[i];
  if (mu1 < 0.0) {
    for (auto& v : z) v = -v;
    mu1 = -mu1;
  }
  if (!(mu1 > 0.0)) return chk.out;  // exact zero mean, hypothesis fails
  chk.out.checked = true;
  double mu2 = 0.0;
  double tail = 0.0;
  for (int i = 0; i < support; ++i) {
    mu2 += p[i] * z[i] * z[i];
    if (z[i] <= 0.0) tail += p[i];
  }
  const double var = mu2 - mu1 * mu1;
  const double cantelli = var / (var + mu1 * mu1);
  chk.leq("cantelli-base", tail, cantelli, kIneqTol);
  chk.close("cantelli-base/cbound-identity", cantelli, 1.0 - mu1 * mu1 / mu2,
            kExactTol);
  return chk.out;
}

using TrialFn = TrialOutcome (*)(const InstanceSpec&, bool);

TrialFn trial_for(const std::string& property) {
  if (property == "cbound-dominates-risk") return &trial_cbound_dominates_risk;
  if (property == "sandwich") return &trial_sandwich;
  if (property == "union-bound") return &trial_union_bound;
  if (property == "strength-bound") return &trial_strength_bound;
  if (property == "omega-cbound") return &trial_omega_cbound;
  if (property == "multilabel-cbound") return &trial_multilabel_cbound;
  if (property == "two-margin-implies-correct")
    return &trial_two_margin_implies_correct;
  if (property == "two-margin-i-invariance")
    return &trial_two_margin_i_invariance;
  if (property == "binary-collapse") return &trial_binary_collapse;
  if (property == "cantelli-base") return &trial_cantelli_base;
  throw ConfigError("unknown property: " + property);
}

}  // namespace

const std::vector<std::string>& property_names() {
  static const std::vector<std::string> names = {
      "cbound-dominates-risk",
      "sandwich",
      "union-bound",
      "strength-bound",
      "omega-cbound",
      "multilabel-cbound",
      "two-margin-implies-correct",
      "two-margin-i-invariance",
      "binary-collapse",
      "cantelli-base",
  };
  return names;
}

VerificationResult verify(const std::string& property,
                          const std::vector<InstanceSpec>& specs,
                          const VerifyOptions& options) {
  const TrialFn fn = trial_for(property);
  for (const InstanceSpec& spec : specs) spec.validate();

  std::vector<TrialOutcome> outcomes(specs.size());
  const int threads =
      std::min<int>(std::max(1, options.threads), static_cast<int>(specs.size()));
  std::vector<std::string> errors;
  std::mutex errors_mutex;

  auto run_range = [&](std::size_t begin, std::size_t step) {
    for (std::size_t i = begin; i < specs.size(); i += step) {
      try {
        outcomes[i] = fn(specs[i], options.inject_bug);
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(errors_mutex);
        errors.emplace_back(e.what());
      }
    }
  };

  if (threads <= 1) {
    run_range(0, 1);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back(run_range, static_cast<std::size_t>(t),
                        static_cast<std::size_t>(threads));
    }
    for (auto& th : pool) th.join();
  }
  if (!errors.empty()) {
    throw InvariantViolation("verification trial failed: " + errors.front());
  }

  VerificationResult result;
  result.property = property;
  result.trials = static_cast<int>(specs.size());
  for (const TrialOutcome& out : outcomes) {
    result.checked += out.checked ? 1 : 0;
    result.violations.insert(result.violations.end(), out.violations.begin(),
                             out.violations.end());
  }
  return result;
}

}  // namespace votebound::oracle
