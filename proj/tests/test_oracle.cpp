#include <doctest.h>

#include "helpers.hpp"
#include "votebound/bounds.hpp"
#include "votebound/oracle.hpp"

using namespace votebound;
using oracle::InstanceSpec;
using oracle::VerifyOptions;

namespace {

std::vector<InstanceSpec> small_campaign(LabelKind kind, int q_lo, int q_hi,
                                         int trials, std::uint64_t base) {
  std::vector<InstanceSpec> specs;
  for (int t = 0; t < trials; ++t) {
    InstanceSpec spec;
    spec.kind = kind;
    spec.class_count = q_lo + t % (q_hi - q_lo + 1);
    spec.voter_count = 1 + t % 6;
    spec.example_count = 1 + (t * 7) % 30;
    spec.voter_accuracy = 0.5 + 0.1 * (t % 5);
    spec.seed = base + static_cast<std::uint64_t>(t) * 1000003ULL;
    specs.push_back(spec);
  }
  return specs;
}

}  // namespace

TEST_CASE("generate is deterministic in the seed") {
  const InstanceSpec spec{LabelKind::multiclass, 4, 5, 12, 4242, 0.7};
  const auto a = oracle::generate(spec);
  const auto b = oracle::generate(spec);
  REQUIRE(a.dataset.size() == b.dataset.size());
  for (std::size_t i = 0; i < a.dataset.size(); ++i) {
    CHECK(a.dataset.examples[i].target == b.dataset.examples[i].target);
    CHECK(a.dataset.examples[i].features == b.dataset.examples[i].features);
  }
  CHECK(a.ensemble.posterior.weights == b.ensemble.posterior.weights);
  for (std::size_t j = 0; j < a.ensemble.voters.size(); ++j) {
    CHECK(a.ensemble.voters[j].predictions == b.ensemble.voters[j].predictions);
  }
}

TEST_CASE("perfect voters produce zero risk and zero defined bounds") {
  for (LabelKind kind :
       {LabelKind::binary, LabelKind::multiclass, LabelKind::multilabel}) {
    InstanceSpec spec{kind, kind == LabelKind::binary ? 2 : 3, 4, 10, 9, 1.0};
    const auto inst = oracle::generate(spec);
    const BoundReport r =
        full_report(inst.dataset, inst.ensemble, ReportSettings{});
    CHECK(r.risk == 0.0);
    for (const BoundEntry* e :
         {&r.theorem1, &r.theorem4, &r.theorem5, &r.theorem6, &r.theorem7,
          &r.eq2_union, &r.theorem3_lower, &r.theorem3_upper}) {
      if (e->applicable && e->defined) {
        CHECK(e->value == doctest::Approx(0.0).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("single-voter instances get the trivial posterior") {
  const InstanceSpec spec{LabelKind::multiclass, 3, 1, 5, 21, 0.5};
  const auto inst = oracle::generate(spec);
  CHECK(inst.ensemble.posterior.weights == std::vector<double>{1.0});
}

TEST_CASE("instance specs are validated") {
  CHECK_THROWS_AS(
      oracle::generate(InstanceSpec{LabelKind::multilabel, 7, 3, 5, 1, 0.5}),
      ConfigError);
  CHECK_THROWS_AS(
      oracle::generate(InstanceSpec{LabelKind::multiclass, 3, 0, 5, 1, 0.5}),
      ConfigError);
  CHECK_THROWS_AS(
      oracle::generate(InstanceSpec{LabelKind::multiclass, 3, 3, 0, 1, 0.5}),
      ConfigError);
  CHECK_THROWS_AS(
      oracle::generate(InstanceSpec{LabelKind::multiclass, 3, 3, 5, 1, 1.5}),
      ConfigError);
  CHECK_THROWS_AS(
      oracle::generate(InstanceSpec{LabelKind::binary, 3, 3, 5, 1, 0.5}),
      ConfigError);
}

TEST_CASE("every named property passes at smoke scale") {
  for (const std::string& property : oracle::property_names()) {
    const bool multilabel = property == "multilabel-cbound" ||
                            property == "two-margin-implies-correct" ||
                            property == "two-margin-i-invariance";
    const bool q2 = property == "binary-collapse";
    const auto specs = small_campaign(
        multilabel ? LabelKind::multilabel : LabelKind::multiclass,
        q2 ? 2 : 2, q2 ? 2 : (multilabel ? 6 : 5), 60, 31337);
    const auto result = oracle::verify(property, specs);
    INFO(property);
    CHECK(result.passed());
    CHECK(result.trials == 60);
    CHECK(result.checked > 0);
  }
}

TEST_CASE("unknown properties are rejected") {
  CHECK_THROWS_AS(oracle::verify("no-such-property", {}), ConfigError);
}

TEST_CASE("the injected-bug self test trips every property") {
  VerifyOptions options;
  options.inject_bug = true;
  for (const std::string& property : oracle::property_names()) {
    const bool multilabel = property == "multilabel-cbound" ||
                            property == "two-margin-implies-correct" ||
                            property == "two-margin-i-invariance";
    const bool q2 = property == "binary-collapse";
    const auto specs = small_campaign(
        multilabel ? LabelKind::multilabel : LabelKind::multiclass,
        q2 ? 2 : 2, q2 ? 2 : (multilabel ? 6 : 5), 40, 999);
    const auto result = oracle::verify(property, specs, options);
    INFO(property);
    CHECK_FALSE(result.passed());
    for (const auto& v : result.violations) CHECK(v.seed != 0);
  }
}

TEST_CASE("verification is identical across thread counts") {
  const auto specs = small_campaign(LabelKind::multiclass, 2, 5, 80, 5150);
  VerifyOptions serial, parallel;
  parallel.threads = 4;
  const auto a = oracle::verify("sandwich", specs, serial);
  const auto b = oracle::verify("sandwich", specs, parallel);
  CHECK(a.trials == b.trials);
  CHECK(a.checked == b.checked);
  CHECK(a.violations.size() == b.violations.size());
}
