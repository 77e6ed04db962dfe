#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "votebound/io.hpp"
#include "votebound/minimizer.hpp"
#include "votebound/oracle.hpp"
#include "votebound/rng.hpp"
#include "votebound/version.hpp"

namespace {

using namespace votebound;

std::uint64_t env_seed(std::uint64_t fallback) {
  if (const char* s = std::getenv("VOTEBOUND_SEED")) {
    return std::strtoull(s, nullptr, 10);
  }
  return fallback;
}

int env_threads(int fallback) {
  if (const char* s = std::getenv("VOTEBOUND_THREADS")) {
    const long v = std::strtol(s, nullptr, 10);
    if (v >= 1) return static_cast<int>(v);
  }
  return fallback;
}

void emit(const std::string& content, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << content;
    if (content.empty() || content.back() != '\n') std::cout << '\n';
  } else {
    io::write_text_atomic(out_path, content);
  }
}

bool any_undefined_bound(const BoundReport& report) {
  for (const BoundEntry* e :
       {&report.theorem1, &report.theorem4, &report.theorem5, &report.theorem6,
        &report.theorem7, &report.eq2_union, &report.theorem3_lower,
        &report.theorem3_upper}) {
    if (e->applicable && !e->defined) return true;
  }
  return false;
}

struct ComputeArgs {
  std::string dataset_path;
  std::string ensemble_path;
  double omega = 2.0;
  std::string out;
  std::string format = "json";
};

int run_compute(const ComputeArgs& args) {
  const Ensemble ensemble = io::load_ensemble_json(args.ensemble_path);
  const Dataset dataset =
      io::load_dataset_csv(args.dataset_path, ensemble.label_space);
  ensemble.validate(dataset);

  ReportSettings settings;
  settings.omega = args.omega;
  settings.seed = env_seed(0);
  const BoundReport report = full_report(dataset, ensemble, settings);

  if (args.format == "csv") {
    emit(io::report_to_csv(report), args.out);
  } else {
    emit(io::report_to_json(report).dump(2) + "\n", args.out);
  }
  return any_undefined_bound(report) ? 2 : 0;
}

struct VerifyArgs {
  std::string property = "all";
  int trials = 1000;
  std::uint64_t seed = 7;
  bool seed_given = false;
  std::string q_range = "2..5";
  int threads = 0;
  std::string out;
  bool inject_bug = false;
};

std::pair<int, int> parse_q_range(const std::string& text) {
  const auto pos = text.find("..");
  try {
    if (pos == std::string::npos) {
      const int q = std::stoi(text);
      return {q, q};
    }
    const int lo = std::stoi(text.substr(0, pos));
    const int hi = std::stoi(text.substr(pos + 2));
    if (lo < 2 || hi < lo) throw ConfigError("");
    return {lo, hi};
  } catch (...) {
    throw ConfigError("bad --q-range '" + text + "', expected e.g. 2..5");
  }
}

// Per-trial spec derivation: everything is a pure function of the trial seed
// and the property's ranges, so a violation is reproducible from the
// recorded seed alone.
oracle::InstanceSpec campaign_spec(const std::string& property,
                                   std::uint64_t trial_seed, int q_lo,
                                   int q_hi) {
  Rng params(trial_seed ^ 0xa5a5a5a5a5a5a5a5ULL);
  oracle::InstanceSpec spec;
  spec.seed = trial_seed;
  const bool multilabel = property == "multilabel-cbound" ||
                          property == "two-margin-implies-correct" ||
                          property == "two-margin-i-invariance";
  if (property == "binary-collapse") {
    spec.kind = LabelKind::multiclass;
    spec.class_count = 2;
  } else if (multilabel) {
    spec.kind = LabelKind::multilabel;
    spec.class_count = params.uniform_int(std::max(2, q_lo), std::min(6, std::max(2, q_hi)));
  } else {
    spec.kind = LabelKind::multiclass;
    spec.class_count = params.uniform_int(q_lo, q_hi);
  }
  spec.voter_count = params.uniform_int(1, 8);
  spec.example_count = params.uniform_int(1, 50);
  static constexpr double kAccuracies[] = {0.5, 0.65, 0.8, 0.9, 0.95};
  spec.voter_accuracy = kAccuracies[params.uniform_int(0, 4)];
  return spec;
}

std::vector<oracle::InstanceSpec> build_campaign(const std::string& property,
                                                 int trials,
                                                 std::uint64_t base_seed,
                                                 int q_lo, int q_hi) {
  std::vector<oracle::InstanceSpec> specs;
  specs.reserve(static_cast<std::size_t>(trials));
  Rng seeder(base_seed);
  for (int t = 0; t < trials; ++t) {
    specs.push_back(campaign_spec(property, seeder.next_u64(), q_lo, q_hi));
  }
  return specs;
}

int run_verify(const VerifyArgs& args) {
  const auto [q_lo, q_hi] = parse_q_range(args.q_range);
  const std::uint64_t seed = args.seed_given ? args.seed : env_seed(args.seed);

  std::vector<std::string> properties;
  if (args.property == "all") {
    properties = oracle::property_names();
  } else {
    properties = {args.property};
  }

  oracle::VerifyOptions options;
  options.threads = args.threads > 0 ? args.threads : env_threads(1);
  options.inject_bug = args.inject_bug;

  io::json results = io::json::array();
  bool all_passed = true;
  for (const std::string& property : properties) {
    const auto specs =
        build_campaign(property, args.trials, seed, q_lo, q_hi);
    const auto result = oracle::verify(property, specs, options);
    all_passed = all_passed && result.passed();
    io::json entry = io::verification_to_json(result);
    entry["seed"] = seed;
    entry["qRange"] = {{"lo", q_lo}, {"hi", q_hi}};
    results.push_back(std::move(entry));
    std::cerr << (result.passed() ? "[pass] " : "[FAIL] ") << property << ": "
              << result.trials << " trials, " << result.checked
              << " checked, " << result.violations.size() << " violations\n";
  }

  if (!args.out.empty()) {
    io::write_text_atomic(args.out, results.dump(2) + "\n");
  } else if (properties.size() == 1) {
    std::cout << results.front().dump(2) << "\n";
  } else {
    std::cout << results.dump(2) << "\n";
  }
  return all_passed ? 0 : 1;
}

struct MinimizeArgs {
  std::string dataset_path;
  std::string ensemble_path;
  double omega = 2.0;
  int grid = 20;
  double tol = 1e-8;
  int max_iters = 10000;
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::string out;
};

std::string report_path_for(const std::string& out) {
  const auto pos = out.rfind(".json");
  if (pos != std::string::npos && pos == out.size() - 5) {
    return out.substr(0, pos) + ".report.json";
  }
  return out + ".report.json";
}

int run_minimize(const MinimizeArgs& args) {
  const Ensemble ensemble = io::load_ensemble_json(args.ensemble_path);
  const Dataset dataset =
      io::load_dataset_csv(args.dataset_path, ensemble.label_space);
  ensemble.validate(dataset);
  if (dataset.label_space.kind != LabelKind::multiclass) {
    throw ConfigError("minimize requires a multiclass dataset");
  }

  MinimizeConfig config;
  config.omega = args.omega;
  config.grid_points = args.grid;
  config.tolerance = args.tol;
  config.max_iterations = args.max_iters;
  config.seed = args.seed_given ? args.seed : env_seed(args.seed);

  MinimizeResult result;
  try {
    result = minimize(dataset, ensemble.voters, config);
  } catch (const BoundUndefined& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return 2;
  }

  Ensemble learned = ensemble;
  learned.posterior = result.posterior;
  ReportSettings settings;
  settings.omega = args.omega;
  settings.seed = config.seed;
  const BoundReport report = full_report(dataset, learned, settings);

  const std::string result_text =
      io::minimize_result_to_json(result, config).dump(2) + "\n";
  const std::string report_text = io::report_to_json(report).dump(2) + "\n";
  if (args.out.empty()) {
    std::cout << result_text;
    std::cout << report_text;
  } else {
    io::write_text_atomic(args.out, result_text);
    io::write_text_atomic(report_path_for(args.out), report_text);
  }
  return 0;
}

struct GenArgs {
  std::string kind = "multiclass";
  int q = 3;
  int voters = 3;
  int examples = 10;
  double accuracy = 0.8;
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::string out_prefix;
};

int run_gen(const GenArgs& args) {
  oracle::InstanceSpec spec;
  spec.kind = label_kind_from_string(args.kind);
  spec.class_count = spec.kind == LabelKind::binary ? 2 : args.q;
  spec.voter_count = args.voters;
  spec.example_count = args.examples;
  spec.voter_accuracy = args.accuracy;
  spec.seed = args.seed_given ? args.seed : env_seed(args.seed);
  const oracle::Instance inst = oracle::generate(spec);
  io::save_dataset_csv(args.out_prefix + ".csv", inst.dataset);
  io::save_ensemble_json(args.out_prefix + ".json", inst.ensemble);
  std::cerr << "wrote " << args.out_prefix << ".csv and " << args.out_prefix
            << ".json\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"votebound: margins, moments, and C-bound variants for "
               "weighted majority votes"};
  app.set_version_flag("--version", std::string(votebound::kVersion));
  app.require_subcommand(1);

  ComputeArgs compute_args;
  CLI::App* compute = app.add_subcommand(
      "compute", "Compute risk, margin moments, and every applicable bound");
  compute->add_option("dataset", compute_args.dataset_path, "dataset CSV")
      ->required();
  compute->add_option("ensemble", compute_args.ensemble_path, "ensemble JSON")
      ->required();
  compute->add_option("--omega", compute_args.omega,
                      "omega for the omega-margin bound (>= 1)");
  compute->add_option("--out", compute_args.out, "output path (default stdout)");
  compute->add_option("--format", compute_args.format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}));

  VerifyArgs verify_args;
  CLI::App* verify = app.add_subcommand(
      "verify", "Brute-force verification campaign over random instances");
  verify->add_option("--property", verify_args.property,
                     "property name or 'all'");
  verify->add_option("--trials", verify_args.trials, "trials per property")
      ->check(CLI::PositiveNumber);
  verify->add_option("--seed", verify_args.seed, "campaign seed");
  verify->add_option("--q-range", verify_args.q_range, "class range, e.g. 2..5");
  verify->add_option("--threads", verify_args.threads,
                     "worker threads (default VOTEBOUND_THREADS or 1)");
  verify->add_option("--out", verify_args.out, "write the JSON result here");
  verify->add_flag("--inject-bug", verify_args.inject_bug)->group("");

  MinimizeArgs minimize_args;
  CLI::App* minimize = app.add_subcommand(
      "minimize", "Learn a posterior minimizing the omega-margin C-bound");
  minimize->add_option("dataset", minimize_args.dataset_path, "dataset CSV")
      ->required();
  minimize->add_option("ensemble", minimize_args.ensemble_path,
                       "ensemble JSON (voter pool)")
      ->required();
  minimize->add_option("--omega", minimize_args.omega, "omega (>= 1)");
  minimize->add_option("--grid", minimize_args.grid, "first-moment grid size");
  minimize->add_option("--tol", minimize_args.tol, "objective tolerance");
  minimize->add_option("--max-iters", minimize_args.max_iters,
                       "iteration cap per grid point");
  minimize->add_option("--out", minimize_args.out,
                       "result path; the learned-posterior report goes to "
                       "<out>.report.json");

  GenArgs gen_args;
  CLI::App* gen = app.add_subcommand(
      "gen", "Generate a matched synthetic dataset/ensemble pair");
  gen->add_option("--kind", gen_args.kind, "binary, multiclass, or multilabel")
      ->check(CLI::IsMember({"binary", "multiclass", "multilabel"}));
  gen->add_option("--q", gen_args.q, "class count Q");
  gen->add_option("--voters", gen_args.voters, "voter count")
      ->check(CLI::PositiveNumber);
  gen->add_option("--examples", gen_args.examples, "example count")
      ->check(CLI::PositiveNumber);
  gen->add_option("--accuracy", gen_args.accuracy,
                  "per-example voter accuracy in [0,1]");
  gen->add_option("--out-prefix", gen_args.out_prefix,
                  "output prefix for .csv and .json")
      ->required();

  // distinguish "flag absent" from "flag given as its default"
  auto* verify_seed = verify->get_option("--seed");
  auto* minimize_seed =
      minimize->add_option("--seed", minimize_args.seed, "solver seed");
  auto* gen_seed = gen->add_option("--seed", gen_args.seed, "instance seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  verify_args.seed_given = verify_seed->count() > 0;
  minimize_args.seed_given = minimize_seed->count() > 0;
  gen_args.seed_given = gen_seed->count() > 0;

  try {
    if (compute->parsed()) return run_compute(compute_args);
    if (verify->parsed()) return run_verify(verify_args);
    if (minimize->parsed()) return run_minimize(minimize_args);
    if (gen->parsed()) return run_gen(gen_args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
