#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "votebound/margins.hpp"
#include "votebound/oracle.hpp"
#include "votebound/rng.hpp"

using namespace votebound;
using vbtest::bin_dataset;
using vbtest::bits;
using vbtest::mc_dataset;
using vbtest::mc_table;
using vbtest::ml_dataset;
using vbtest::ml_profile;
using vbtest::posterior;
using vbtest::real_table;

namespace {

// Multiclass instance whose single profile is exactly g, built from one
// voter per class weighted by g.
std::pair<Dataset, std::vector<VoteProfile>> profile_instance(
    const std::vector<double>& g, int target) {
  Dataset d = mc_dataset(static_cast<int>(g.size()), {target});
  std::vector<Voter> voters;
  for (int c = 1; c <= static_cast<int>(g.size()); ++c) {
    voters.push_back(mc_table({c}));
  }
  auto profiles = aggregate(d, voters, posterior(g));
  return {std::move(d), std::move(profiles)};
}

}  // namespace

TEST_CASE("binary margin is y times the expected vote") {
  {
    const Dataset d = bin_dataset({1});
    const auto profiles = aggregate(d, {real_table({1.0})}, posterior({1.0}));
    CHECK(binary_margin(profiles, d).values[0] == 1.0);
  }
  {
    const Dataset d = bin_dataset({-1});
    const auto profiles = aggregate(d, {real_table({0.4})}, posterior({1.0}));
    CHECK(binary_margin(profiles, d).values[0] == doctest::Approx(-0.4));
  }
  const Dataset mc = mc_dataset(2, {1});
  CHECK_THROWS_AS(binary_margin({vbtest::mc_profile({1.0, 0.0})}, mc),
                  ConfigError);
}

TEST_CASE("sign voters mapped to two classes tie the binary margin to the "
          "omega margin") {
  Rng rng(2024);
  for (int trial = 0; trial < 50; ++trial) {
    const int m = rng.uniform_int(1, 12);
    const int n = rng.uniform_int(1, 6);
    std::vector<int> signs(m);
    for (auto& s : signs) s = rng.uniform_int(0, 1) ? 1 : -1;

    std::vector<int> bin_targets = signs;
    std::vector<int> mc_targets(m);
    for (int i = 0; i < m; ++i) mc_targets[i] = signs[i] > 0 ? 1 : 2;

    std::vector<Voter> bin_voters(n), mc_voters(n);
    for (int j = 0; j < n; ++j) {
      bin_voters[j].kind = VoterKind::table;
      mc_voters[j].kind = VoterKind::table;
      for (int i = 0; i < m; ++i) {
        const int s = rng.uniform_int(0, 1) ? 1 : -1;
        bin_voters[j].predictions.push_back(vbtest::cls(s));
        mc_voters[j].predictions.push_back(vbtest::cls(s > 0 ? 1 : 2));
      }
    }
    const auto rho = posterior(rng.simplex(static_cast<std::size_t>(n)));

    const Dataset bd = bin_dataset(bin_targets);
    const Dataset md = mc_dataset(2, mc_targets);
    const auto bin_m = binary_margin(aggregate(bd, bin_voters, rho), bd);
    const auto omega2 =
        omega_margin(aggregate(md, mc_voters, rho), md, 2.0);
    for (int i = 0; i < m; ++i) {
      CHECK(std::abs(bin_m.values[i] - 2.0 * omega2.values[i]) <= 1e-12);
    }
  }
}

TEST_CASE("multiclass margin subtracts the best rival mass") {
  {
    const auto [d, profiles] = profile_instance({0.5, 0.3, 0.2}, 1);
    CHECK(multiclass_margin(profiles, d).values[0] == doctest::Approx(0.2));
  }
  {
    const auto [d, profiles] = profile_instance({1.0, 0.0, 0.0}, 1);
    CHECK(multiclass_margin(profiles, d).values[0] == 1.0);
  }
  {
    const auto [d, profiles] =
        profile_instance({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}, 2);
    CHECK(multiclass_margin(profiles, d).values[0] == 0.0);
  }
}

TEST_CASE("strength margin compares the true class against a fixed class") {
  const auto [d, profiles] = profile_instance({0.5, 0.3, 0.2}, 1);
  CHECK(strength_margin(profiles, d, 3).values[0] == doctest::Approx(0.3));
  CHECK(strength_margin(profiles, d, 1).values[0] == 0.0);
  CHECK_THROWS_AS(strength_margin(profiles, d, 4), ConfigError);
  CHECK_THROWS_AS(strength_margin(profiles, d, 0), ConfigError);

  const auto [d2, profiles2] = profile_instance({0.2, 0.8, 0.0}, 1);
  CHECK(strength_margin(profiles2, d2, 2).values[0] == doctest::Approx(-0.6));
}

TEST_CASE("omega margin thresholds the true-class mass") {
  {
    const auto [d, profiles] = profile_instance({0.5, 0.5, 0.0}, 1);
    CHECK(omega_margin(profiles, d, 2.0).values[0] == 0.0);
  }
  {
    const auto [d, profiles] = profile_instance({1.0, 0.0, 0.0}, 1);
    CHECK(omega_margin(profiles, d, 2.0).values[0] == 0.5);
  }
  {
    const auto [d, profiles] =
        profile_instance({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}, 1);
    CHECK(omega_margin(profiles, d, 3.0).values[0] == 0.0);
  }
  const auto [d, profiles] = profile_instance({1.0, 0.0, 0.0}, 1);
  CHECK_THROWS_AS(omega_margin(profiles, d, 0.5), ConfigError);
}

TEST_CASE("a positive multiclass margin is equivalent to a unique argmax") {
  Rng rng(606);
  for (int trial = 0; trial < 60; ++trial) {
    const oracle::InstanceSpec spec{LabelKind::multiclass, 3, 4, 12,
                                    7000 + static_cast<std::uint64_t>(trial),
                                    0.6};
    const auto inst = oracle::generate(spec);
    const auto profiles =
        aggregate(inst.dataset, inst.ensemble.voters, inst.ensemble.posterior);
    const MarginVector m = multiclass_margin(profiles, inst.dataset);
    for (std::size_t i = 0; i < m.values.size(); ++i) {
      const auto& g = profiles[i].values;
      const std::size_t y =
          static_cast<std::size_t>(inst.dataset.examples[i].target.cls - 1);
      if (m.values[i] > 0.0) {
        CHECK(predict_multiclass(profiles[i]) ==
              inst.dataset.examples[i].target.cls);
        for (std::size_t c = 0; c < g.size(); ++c) {
          if (c != y) CHECK(g[y] > g[c]);
        }
      } else {
        bool tied_or_beaten = false;
        for (std::size_t c = 0; c < g.size(); ++c) {
          if (c != y && g[c] >= g[y]) tied_or_beaten = true;
        }
        CHECK(tied_or_beaten);
      }
    }
  }
}

TEST_CASE("omega margin grows pointwise with omega") {
  Rng rng(7);
  for (int trial = 0; trial < 40; ++trial) {
    const oracle::InstanceSpec spec{LabelKind::multiclass, 4, 5, 10,
                                    5000 + static_cast<std::uint64_t>(trial),
                                    0.7};
    const auto inst = oracle::generate(spec);
    const auto profiles =
        aggregate(inst.dataset, inst.ensemble.voters, inst.ensemble.posterior);
    const double w1 = 1.0 + 3.0 * rng.uniform01();
    const double w2 = w1 + 3.0 * rng.uniform01();
    const auto m1 = omega_margin(profiles, inst.dataset, w1);
    const auto m2 = omega_margin(profiles, inst.dataset, w2);
    for (std::size_t i = 0; i < m1.values.size(); ++i) {
      CHECK(m2.values[i] >= m1.values[i]);
    }
    const auto mq = omega_margin(profiles, inst.dataset, 4.0);
    const auto mtwo = omega_margin(profiles, inst.dataset, 2.0);
    for (std::size_t i = 0; i < mq.values.size(); ++i) {
      CHECK(mq.values[i] >= mtwo.values[i]);
    }
  }
}

TEST_CASE("multilabel margin agrees with rival enumeration") {
  const Dataset d = ml_dataset(2, {"10"});
  const auto profiles = std::vector<VoteProfile>{ml_profile({0.9, 0.2})};
  CHECK(multilabel_margin(profiles, d).values[0] == doctest::Approx(0.3));
  // all-half confidence zeroes every dot product
  const auto half = std::vector<VoteProfile>{ml_profile({0.5, 0.5})};
  CHECK(multilabel_margin(half, d).values[0] == 0.0);
}

TEST_CASE("perfect confidence gives a strictly positive multilabel margin") {
  Rng rng(31);
  for (int q = 2; q <= 6; ++q) {
    for (int t = 0; t < 50; ++t) {
      std::string target;
      std::vector<double> conf;
      for (int k = 0; k < q; ++k) {
        const bool one = rng.uniform_int(0, 1) == 1;
        target.push_back(one ? '1' : '0');
        conf.push_back(one ? 1.0 : 0.0);
      }
      const Dataset d = ml_dataset(q, {target});
      const auto profiles = std::vector<VoteProfile>{ml_profile(conf)};
      CHECK(multilabel_margin(profiles, d).values[0] > 0.0);
    }
  }
}

TEST_CASE("closed-form rival search equals enumeration") {
  Rng rng(555);
  for (int q = 2; q <= 6; ++q) {
    for (int t = 0; t < 400; ++t) {
      Label target;
      std::vector<double> conf(q);
      for (int k = 0; k < q; ++k) {
        target.bits.push_back(static_cast<std::uint8_t>(rng.uniform_int(0, 1)));
        conf[k] = rng.uniform01();
      }
      if (t % 4 == 0) conf[rng.uniform_int(0, q - 1)] = 0.5;  // zero weight
      if (t % 7 == 0) {
        for (int k = 0; k < q; ++k) conf[k] = target.bits[k] ? 1.0 : 0.0;
      }
      const double a = best_rival_score(conf, target.bits, RivalSearch::enumerate);
      const double b = best_rival_score(conf, target.bits, RivalSearch::closed_form);
      CHECK(a == doctest::Approx(b).epsilon(1e-12));
    }
  }
}

TEST_CASE("two margin: direct evaluation and i-invariance") {
  const VoteProfile p = ml_profile({0.9, 0.2});
  const Label target = bits("10");
  CHECK(two_margin_at(p, target, 1) == doctest::Approx(0.1));
  CHECK(two_margin_at(p, target, 2) == doctest::Approx(0.1));

  Rng rng(91);
  for (int q = 2; q <= 6; ++q) {
    for (int t = 0; t < 300; ++t) {
      Label tgt;
      std::vector<double> conf(q);
      for (int k = 0; k < q; ++k) {
        tgt.bits.push_back(static_cast<std::uint8_t>(rng.uniform_int(0, 1)));
        conf[k] = rng.uniform01();
      }
      const VoteProfile prof = ml_profile(conf);
      const double first = two_margin_at(prof, tgt, 1);
      for (int r = 2; r <= q; ++r) {
        CHECK(std::abs(two_margin_at(prof, tgt, r) - first) <= 1e-12);
      }
    }
  }
}

TEST_CASE("two margin at all-half confidence is -(Q-1)/4") {
  Rng rng(92);
  for (int q = 2; q <= 6; ++q) {
    const std::vector<double> conf(q, 0.5);
    for (int t = 0; t < 20; ++t) {
      Label tgt;
      for (int k = 0; k < q; ++k) {
        tgt.bits.push_back(static_cast<std::uint8_t>(rng.uniform_int(0, 1)));
      }
      const double expected = -static_cast<double>(q - 1) / 4.0;
      CHECK(two_margin_at(ml_profile(conf), tgt, 1) == expected);
    }
  }
}

TEST_CASE("the two printed forms of the 2-margin differ by exactly one half") {
  // algebraic form: v.y - (1/2) v.1 - (1/2) |y| - 1/4  (see margins.hpp)
  Rng rng(93);
  for (int q = 2; q <= 6; ++q) {
    for (int t = 0; t < 200; ++t) {
      Label tgt;
      std::vector<double> conf(q);
      double vy = 0.0, v1 = 0.0, ysum = 0.0;
      for (int k = 0; k < q; ++k) {
        const auto b = static_cast<std::uint8_t>(rng.uniform_int(0, 1));
        tgt.bits.push_back(b);
        conf[k] = rng.uniform01();
        vy += b ? conf[k] : 0.0;
        v1 += conf[k];
        ysum += b;
      }
      const double algebraic = vy - 0.5 * v1 - 0.5 * ysum - 0.25;
      const double geometric = two_margin_at(ml_profile(conf), tgt, 1);
      CHECK(geometric - algebraic == doctest::Approx(0.5).epsilon(1e-12));
    }
  }
}

TEST_CASE("a positive two margin certifies the multilabel prediction") {
  Rng rng(94);
  int positives = 0;
  for (int q = 2; q <= 6; ++q) {
    for (int t = 0; t < 500; ++t) {
      Label tgt;
      std::vector<double> conf(q);
      for (int k = 0; k < q; ++k) {
        tgt.bits.push_back(static_cast<std::uint8_t>(rng.uniform_int(0, 1)));
        const double u = 0.8 + 0.2 * rng.uniform01();
        conf[k] = 0.5 + (tgt.bits[k] ? u : -u) / 2.0;
        if (t % 2 == 0) conf[k] = rng.uniform01();  // plain uniform half
      }
      const VoteProfile prof = ml_profile(conf);
      if (two_margin_at(prof, tgt, 1) > 0.0) {
        ++positives;
        CHECK(predict_multilabel(prof) == tgt.bits);
        CHECK(predict_multilabel_bruteforce(prof) == tgt.bits);
      }
    }
  }
  CHECK(positives > 100);  // the antecedent actually fired
}

TEST_CASE("margin values stay inside their ranges") {
  for (std::uint64_t seed = 50; seed < 70; ++seed) {
    const oracle::InstanceSpec mc{LabelKind::multiclass, 4, 5, 15, seed, 0.6};
    const auto inst = oracle::generate(mc);
    const auto profiles =
        aggregate(inst.dataset, inst.ensemble.voters, inst.ensemble.posterior);
    for (double v : multiclass_margin(profiles, inst.dataset).values) {
      CHECK(v >= -1.0);
      CHECK(v <= 1.0);
    }
    for (int c = 1; c <= 4; ++c) {
      for (double v : strength_margin(profiles, inst.dataset, c).values) {
        CHECK(v >= -1.0);
        CHECK(v <= 1.0);
      }
    }
    const double omega = 2.0 + (seed % 3);
    for (double v : omega_margin(profiles, inst.dataset, omega).values) {
      CHECK(v >= -1.0 / omega);
      CHECK(v <= 1.0 - 1.0 / omega);
    }

    const oracle::InstanceSpec ml{LabelKind::multilabel, 4, 5, 15, seed, 0.6};
    const auto mlinst = oracle::generate(ml);
    const auto mlprofiles = aggregate(mlinst.dataset, mlinst.ensemble.voters,
                                      mlinst.ensemble.posterior);
    for (double v : multilabel_margin(mlprofiles, mlinst.dataset).values) {
      CHECK(std::isfinite(v));
      CHECK(std::abs(v) <= 4.0);
    }
    for (double v : two_margin(mlprofiles, mlinst.dataset).values) {
      CHECK(std::isfinite(v));
      CHECK(std::abs(v) <= 4.0);
    }
  }
}

TEST_CASE("margin operations reject the wrong label space") {
  const Dataset ml = ml_dataset(2, {"10"});
  const auto mlp = std::vector<VoteProfile>{ml_profile({0.9, 0.2})};
  CHECK_THROWS_AS(multiclass_margin(mlp, ml), ConfigError);
  CHECK_THROWS_AS(strength_margin(mlp, ml, 1), ConfigError);
  CHECK_THROWS_AS(omega_margin(mlp, ml, 2.0), ConfigError);

  const auto [mc, mcp] = profile_instance({0.6, 0.4}, 1);
  CHECK_THROWS_AS(multilabel_margin(mcp, mc), ConfigError);
  CHECK_THROWS_AS(two_margin(mcp, mc), ConfigError);
}
