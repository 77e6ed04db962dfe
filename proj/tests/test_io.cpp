#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "helpers.hpp"
#include "votebound/io.hpp"
#include "votebound/oracle.hpp"

using namespace votebound;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("votebound-test-" + std::to_string(std::rand()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const {
    return (path / name).string();
  }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  REQUIRE(out);
  out << content;
}

}  // namespace

TEST_CASE("dataset CSV round trip preserves the instance") {
  TempDir tmp;
  const oracle::InstanceSpec spec{LabelKind::multiclass, 3, 3, 8, 7, 0.8};
  const auto inst = oracle::generate(spec);
  const std::string path = tmp.file("d.csv");
  io::save_dataset_csv(path, inst.dataset);
  const Dataset loaded = io::load_dataset_csv(path, inst.dataset.label_space);
  REQUIRE(loaded.size() == inst.dataset.size());
  CHECK(loaded.feature_dim == inst.dataset.feature_dim);
  for (std::size_t i = 0; i < loaded.size(); ++i) {
    CHECK(loaded.examples[i].target == inst.dataset.examples[i].target);
    CHECK(loaded.examples[i].features == inst.dataset.examples[i].features);
    CHECK(loaded.examples[i].weight == inst.dataset.examples[i].weight);
  }
}

TEST_CASE("multilabel and binary labels round trip through CSV") {
  TempDir tmp;
  for (LabelKind kind : {LabelKind::binary, LabelKind::multilabel}) {
    const oracle::InstanceSpec spec{kind, kind == LabelKind::binary ? 2 : 4,
                                    2, 6, 11, 0.9};
    const auto inst = oracle::generate(spec);
    const std::string path = tmp.file("d2.csv");
    io::save_dataset_csv(path, inst.dataset);
    const Dataset loaded = io::load_dataset_csv(path, inst.dataset.label_space);
    for (std::size_t i = 0; i < loaded.size(); ++i) {
      CHECK(loaded.examples[i].target == inst.dataset.examples[i].target);
    }
  }
}

TEST_CASE("CSV weights are renormalized, absent weights are uniform") {
  TempDir tmp;
  const LabelSpace space{LabelKind::multiclass, 2};
  spit(tmp.file("w.csv"), "f0,label,weight\n0.1,1,2\n0.2,2,2\n");
  const Dataset with = io::load_dataset_csv(tmp.file("w.csv"), space);
  CHECK(with.examples[0].weight == 0.5);
  CHECK(with.examples[1].weight == 0.5);

  spit(tmp.file("u.csv"), "f0,label\n0.1,1\n0.2,2\n0.3,1\n0.4,2\n");
  const Dataset uniform = io::load_dataset_csv(tmp.file("u.csv"), space);
  for (const auto& e : uniform.examples) CHECK(e.weight == 0.25);
}

TEST_CASE("CSV parse failures name the line") {
  TempDir tmp;
  const LabelSpace space{LabelKind::multiclass, 3};

  spit(tmp.file("bad.csv"), "f0,label\n0.1,1\nnot-a-number,2\n");
  CHECK_THROWS_WITH_AS(io::load_dataset_csv(tmp.file("bad.csv"), space),
                       doctest::Contains("line 3"), ParseError);

  spit(tmp.file("range.csv"), "f0,label\n0.1,9\n");
  CHECK_THROWS_WITH_AS(io::load_dataset_csv(tmp.file("range.csv"), space),
                       doctest::Contains("line 2"), ParseError);

  spit(tmp.file("nolabel.csv"), "f0,f1\n0.1,0.2\n");
  CHECK_THROWS_AS(io::load_dataset_csv(tmp.file("nolabel.csv"), space),
                  ParseError);

  spit(tmp.file("short.csv"), "f0,label\n0.1\n");
  CHECK_THROWS_WITH_AS(io::load_dataset_csv(tmp.file("short.csv"), space),
                       doctest::Contains("line 2"), ParseError);

  spit(tmp.file("empty.csv"), "f0,label\n");
  CHECK_THROWS_AS(io::load_dataset_csv(tmp.file("empty.csv"), space),
                  ParseError);

  const LabelSpace ml{LabelKind::multilabel, 3};
  spit(tmp.file("bits.csv"), "f0,label\n0.1,10\n");
  CHECK_THROWS_WITH_AS(io::load_dataset_csv(tmp.file("bits.csv"), ml),
                       doctest::Contains("line 2"), ParseError);
}

TEST_CASE("ensemble JSON round trip, uniform posterior when absent") {
  TempDir tmp;
  const oracle::InstanceSpec spec{LabelKind::multilabel, 3, 4, 6, 13, 0.7};
  const auto inst = oracle::generate(spec);
  const std::string path = tmp.file("e.json");
  io::save_ensemble_json(path, inst.ensemble);
  const Ensemble loaded = io::load_ensemble_json(path, &inst.dataset);
  CHECK(loaded.posterior.weights == inst.ensemble.posterior.weights);
  for (std::size_t j = 0; j < loaded.voters.size(); ++j) {
    CHECK(loaded.voters[j].predictions == inst.ensemble.voters[j].predictions);
  }

  spit(tmp.file("nopost.json"), R"({
    "labelSpace": {"kind": "multiclass", "Q": 3},
    "voters": [
      {"kind": "table", "predictions": [1, 2]},
      {"kind": "stump", "featureIndex": 0, "threshold": 0.5,
       "leftClass": 1, "rightClass": 3}
    ]
  })");
  const Ensemble uniform = io::load_ensemble_json(tmp.file("nopost.json"));
  CHECK(uniform.posterior.weights == std::vector<double>{0.5, 0.5});
  CHECK(uniform.voters[1].kind == VoterKind::stump);
  CHECK(uniform.voters[1].right == vbtest::cls(3));
}

TEST_CASE("ensemble JSON rejects malformed documents") {
  TempDir tmp;
  spit(tmp.file("trunc.json"), "{\"labelSpace\": ");
  CHECK_THROWS_AS(io::load_ensemble_json(tmp.file("trunc.json")), ConfigError);

  spit(tmp.file("novoters.json"),
       R"({"labelSpace": {"kind": "multiclass", "Q": 3}, "voters": []})");
  CHECK_THROWS_AS(io::load_ensemble_json(tmp.file("novoters.json")),
                  ConfigError);

  spit(tmp.file("badsimplex.json"), R"({
    "labelSpace": {"kind": "multiclass", "Q": 3},
    "voters": [{"kind": "table", "predictions": [1]}],
    "posterior": [0.7]
  })");
  CHECK_THROWS_WITH_AS(io::load_ensemble_json(tmp.file("badsimplex.json")),
                       doctest::Contains("sum"), ConfigError);

  spit(tmp.file("badreal.json"), R"({
    "labelSpace": {"kind": "binary", "Q": 2},
    "voters": [{"kind": "realvalued-table", "predictions": [1.5]}]
  })");
  const Dataset bd = vbtest::bin_dataset({1});
  CHECK_THROWS_WITH_AS(io::load_ensemble_json(tmp.file("badreal.json"), &bd),
                       doctest::Contains("[-1,1]"), ConfigError);
}

TEST_CASE("reports carry explicit undefined markers for every variant") {
  const Dataset d = vbtest::bin_dataset({1, -1});
  const Ensemble e{d.label_space, {vbtest::real_table({0.8, -0.6})},
                   Posterior::uniform(1)};
  const BoundReport report = full_report(d, e, ReportSettings{});
  const io::json doc = io::report_to_json(report);
  for (const char* key :
       {"theorem1", "theorem4", "theorem5", "theorem6", "theorem7",
        "eq2-union", "theorem3-lower", "theorem3-upper"}) {
    REQUIRE(doc["bounds"].contains(key));
    const auto& entry = doc["bounds"][key];
    CHECK((entry["status"] == "ok" || entry["status"] == "undefined"));
  }
  CHECK(doc["bounds"]["theorem1"]["status"] == "ok");
  CHECK(doc["bounds"]["theorem4"]["status"] == "undefined");
  CHECK(doc["marginProbabilities"]["pMarginQLeq0"] == "undefined");

  const std::string csv = io::report_to_csv(report);
  CHECK(csv.find("theorem4,undefined") != std::string::npos);
  CHECK(csv.find("risk,") != std::string::npos);
}

TEST_CASE("report serialization is stable within a process") {
  const oracle::InstanceSpec spec{LabelKind::multiclass, 4, 5, 14, 77, 0.7};
  const auto inst = oracle::generate(spec);
  const BoundReport r1 = full_report(inst.dataset, inst.ensemble, {});
  const BoundReport r2 = full_report(inst.dataset, inst.ensemble, {});
  CHECK(io::report_to_json(r1).dump() == io::report_to_json(r2).dump());
  CHECK(io::report_to_csv(r1) == io::report_to_csv(r2));
}

TEST_CASE("atomic writes replace the target in one step") {
  TempDir tmp;
  const std::string path = tmp.file("out.txt");
  io::write_text_atomic(path, "first");
  CHECK(slurp(path) == "first");
  io::write_text_atomic(path, "second");
  CHECK(slurp(path) == "second");
  CHECK_FALSE(fs::exists(path + ".tmp"));
}
