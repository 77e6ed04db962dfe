#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "votebound/bounds.hpp"
#include "votebound/dataset.hpp"
#include "votebound/ensemble.hpp"
#include "votebound/io.hpp"
#include "votebound/margins.hpp"
#include "votebound/minimizer.hpp"
#include "votebound/oracle.hpp"
#include "votebound/version.hpp"

namespace py = pybind11;
using namespace votebound;

namespace {

Label label_from_py(const py::object& obj, const LabelSpace& space) {
  Label label;
  if (space.kind == LabelKind::multilabel) {
    if (py::isinstance<py::str>(obj)) {
      const std::string s = obj.cast<std::string>();
      for (char c : s) {
        if (c != '0' && c != '1') throw ConfigError("bitstring must be 0/1");
        label.bits.push_back(c == '1');
      }
    } else {
      for (const auto& b : obj.cast<std::vector<int>>()) {
        label.bits.push_back(b ? 1 : 0);
      }
    }
  } else {
    label.cls = obj.cast<int>();
  }
  if (!label_valid(label, space)) {
    throw ConfigError("label is inconsistent with the label space");
  }
  return label;
}

py::object label_to_py(const Label& label, LabelKind kind) {
  if (kind == LabelKind::multilabel) {
    std::vector<int> bits(label.bits.begin(), label.bits.end());
    return py::cast(bits);
  }
  return py::cast(label.cls);
}

std::vector<Label> labels_from_py(const py::sequence& seq,
                                  const LabelSpace& space) {
  std::vector<Label> labels;
  labels.reserve(seq.size());
  for (const auto& obj : seq) {
    labels.push_back(label_from_py(py::reinterpret_borrow<py::object>(obj), space));
  }
  return labels;
}

}  // namespace

PYBIND11_MODULE(_votebound, m) {
  m.doc() = "Margins, margin moments, and C-bound variants for weighted "
            "majority votes";
  m.attr("__version__") = kVersion;

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<BoundUndefined>(m, "BoundUndefined", PyExc_ArithmeticError);
  py::register_exception<InvariantViolation>(m, "InvariantViolation",
                                             PyExc_RuntimeError);

  py::enum_<LabelKind>(m, "LabelKind")
      .value("binary", LabelKind::binary)
      .value("multiclass", LabelKind::multiclass)
      .value("multilabel", LabelKind::multilabel);

  py::class_<LabelSpace>(m, "LabelSpace")
      .def(py::init([](LabelKind kind, int q) {
             LabelSpace space{kind, kind == LabelKind::binary ? 2 : q};
             space.validate();
             return space;
           }),
           py::arg("kind"), py::arg("q") = 2)
      .def_readonly("kind", &LabelSpace::kind)
      .def_readonly("q", &LabelSpace::class_count);

  py::class_<Dataset>(m, "Dataset")
      .def_property_readonly("size", &Dataset::size)
      .def_readonly("feature_dim", &Dataset::feature_dim)
      .def_property_readonly(
          "label_space", [](const Dataset& d) { return d.label_space; })
      .def_property_readonly("weights",
                             [](const Dataset& d) {
                               std::vector<double> w;
                               for (const auto& e : d.examples)
                                 w.push_back(e.weight);
                               return w;
                             })
      .def_property_readonly("targets", [](const Dataset& d) {
        py::list out;
        for (const auto& e : d.examples)
          out.append(label_to_py(e.target, d.label_space.kind));
        return out;
      });

  m.def(
      "make_dataset",
      [](const LabelSpace& space, std::vector<std::vector<double>> features,
         const py::sequence& targets, std::vector<double> weights) {
        return make_dataset(space, std::move(features),
                            labels_from_py(targets, space), std::move(weights));
      },
      py::arg("space"), py::arg("features"), py::arg("targets"),
      py::arg("weights") = std::vector<double>{});

  py::class_<Voter>(m, "Voter");

  m.def(
      "table_voter",
      [](const LabelSpace& space, const py::sequence& predictions) {
        Voter v;
        v.kind = VoterKind::table;
        v.predictions = labels_from_py(predictions, space);
        return v;
      },
      py::arg("space"), py::arg("predictions"));
  m.def(
      "stump_voter",
      [](const LabelSpace& space, int feature_index, double threshold,
         const py::object& left, const py::object& right) {
        Voter v;
        v.kind = VoterKind::stump;
        v.feature_index = feature_index;
        v.threshold = threshold;
        v.left = label_from_py(left, space);
        v.right = label_from_py(right, space);
        return v;
      },
      py::arg("space"), py::arg("feature_index"), py::arg("threshold"),
      py::arg("left"), py::arg("right"));
  m.def(
      "realvalued_table_voter",
      [](std::vector<double> values) {
        Voter v;
        v.kind = VoterKind::realvalued_table;
        v.values = std::move(values);
        return v;
      },
      py::arg("values"));

  py::class_<Posterior>(m, "Posterior")
      .def(py::init([](std::vector<double> weights) {
             Posterior p{std::move(weights)};
             p.validate();
             return p;
           }),
           py::arg("weights"))
      .def_static("uniform", &Posterior::uniform, py::arg("n"))
      .def_readonly("weights", &Posterior::weights);

  py::class_<Ensemble>(m, "Ensemble")
      .def(py::init([](const LabelSpace& space, std::vector<Voter> voters,
                       const Posterior& posterior) {
             return Ensemble{space, std::move(voters), posterior};
           }),
           py::arg("space"), py::arg("voters"), py::arg("posterior"))
      .def_property_readonly(
          "label_space", [](const Ensemble& e) { return e.label_space; })
      .def_property_readonly("voters",
                             [](const Ensemble& e) { return e.voters; })
      .def_property_readonly(
          "posterior", [](const Ensemble& e) { return e.posterior; });

  py::class_<VoteProfile>(m, "VoteProfile")
      .def_readonly("kind", &VoteProfile::kind)
      .def_readonly("values", &VoteProfile::values);

  m.def("aggregate", &aggregate, py::arg("dataset"), py::arg("voters"),
        py::arg("posterior"));
  m.def("predict_multiclass", &predict_multiclass, py::arg("profile"));
  m.def(
      "predict_multilabel",
      [](const VoteProfile& p) {
        const BitVector bits = predict_multilabel(p);
        return std::vector<int>(bits.begin(), bits.end());
      },
      py::arg("profile"));
  m.def(
      "predict_multilabel_bruteforce",
      [](const VoteProfile& p) {
        const BitVector bits = predict_multilabel_bruteforce(p);
        return std::vector<int>(bits.begin(), bits.end());
      },
      py::arg("profile"));
  m.def("risk", &risk, py::arg("dataset"), py::arg("margins"));

  py::class_<MarginVector>(m, "MarginVector")
      .def_readonly("values", &MarginVector::values)
      .def_readonly("omega", &MarginVector::omega)
      .def_readonly("strength_class", &MarginVector::strength_class);

  py::enum_<RivalSearch>(m, "RivalSearch")
      .value("automatic", RivalSearch::automatic)
      .value("enumerate", RivalSearch::enumerate)
      .value("closed_form", RivalSearch::closed_form);

  m.def("binary_margin", &binary_margin, py::arg("profiles"), py::arg("dataset"));
  m.def("multiclass_margin", &multiclass_margin, py::arg("profiles"),
        py::arg("dataset"));
  m.def("strength_margin", &strength_margin, py::arg("profiles"),
        py::arg("dataset"), py::arg("c"));
  m.def("omega_margin", &omega_margin, py::arg("profiles"), py::arg("dataset"),
        py::arg("omega"));
  m.def("multilabel_margin", &multilabel_margin, py::arg("profiles"),
        py::arg("dataset"), py::arg("search") = RivalSearch::automatic);
  m.def("two_margin", &two_margin, py::arg("profiles"), py::arg("dataset"));

  py::class_<MomentPair>(m, "MomentPair")
      .def_readonly("mu1", &MomentPair::mu1)
      .def_readonly("mu2", &MomentPair::mu2)
      .def_property_readonly("variance", &MomentPair::variance);

  m.def("moments",
        py::overload_cast<const MarginVector&, const Dataset&>(&moments),
        py::arg("margins"), py::arg("dataset"));
  m.def("cbound", &cbound, py::arg("moments"));
  m.def("strength_bound", &strength_bound, py::arg("dataset"),
        py::arg("profiles"));
  m.def("union_bound", &union_bound, py::arg("dataset"), py::arg("profiles"));
  m.def(
      "sandwich",
      [](const Dataset& d, const std::vector<VoteProfile>& p) {
        const SandwichResult r = sandwich(d, p);
        return py::make_tuple(r.lower, r.risk, r.upper);
      },
      py::arg("dataset"), py::arg("profiles"));
  m.def("omega_cbound", &omega_cbound, py::arg("dataset"), py::arg("profiles"),
        py::arg("omega"));
  m.def("multilabel_cbound", &multilabel_cbound, py::arg("dataset"),
        py::arg("profiles"));

  m.def(
      "full_report_json",
      [](const Dataset& dataset, const Ensemble& ensemble, double omega,
         std::uint64_t seed) {
        ReportSettings settings{omega, seed};
        return io::report_to_json(full_report(dataset, ensemble, settings))
            .dump();
      },
      py::arg("dataset"), py::arg("ensemble"), py::arg("omega") = 2.0,
      py::arg("seed") = 0);

  py::class_<MinimizeResult>(m, "MinimizeResult")
      .def_property_readonly(
          "posterior", [](const MinimizeResult& r) { return r.posterior; })
      .def_readonly("mu", &MinimizeResult::mu)
      .def_readonly("mu1", &MinimizeResult::mu1)
      .def_readonly("mu2", &MinimizeResult::mu2)
      .def_readonly("bound", &MinimizeResult::bound)
      .def_readonly("iterations", &MinimizeResult::iterations)
      .def_readonly("converged", &MinimizeResult::converged)
      .def_readonly("infeasible_grid", &MinimizeResult::infeasible_grid);

  m.def(
      "minimize",
      [](const Dataset& dataset, const std::vector<Voter>& voters,
         double omega, int grid_points, int max_iterations, double tolerance,
         std::uint64_t seed) {
        MinimizeConfig config;
        config.omega = omega;
        config.grid_points = grid_points;
        config.max_iterations = max_iterations;
        config.tolerance = tolerance;
        config.seed = seed;
        return minimize(dataset, voters, config);
      },
      py::arg("dataset"), py::arg("voters"), py::arg("omega") = 2.0,
      py::arg("grid_points") = 20, py::arg("max_iterations") = 10000,
      py::arg("tolerance") = 1e-8, py::arg("seed") = 0);

  py::class_<oracle::InstanceSpec>(m, "InstanceSpec")
      .def(py::init([](LabelKind kind, int q, int voters, int examples,
                       std::uint64_t seed, double accuracy) {
             oracle::InstanceSpec spec{kind, q, voters, examples, seed,
                                       accuracy};
             spec.validate();
             return spec;
           }),
           py::arg("kind"), py::arg("q"), py::arg("voters"),
           py::arg("examples"), py::arg("seed"), py::arg("accuracy") = 0.8)
      .def_readonly("seed", &oracle::InstanceSpec::seed);

  m.def(
      "generate",
      [](const oracle::InstanceSpec& spec) {
        oracle::Instance inst = oracle::generate(spec);
        return py::make_tuple(std::move(inst.dataset), std::move(inst.ensemble));
      },
      py::arg("spec"));

  py::class_<oracle::VerificationResult>(m, "VerificationResult")
      .def_readonly("property", &oracle::VerificationResult::property)
      .def_readonly("trials", &oracle::VerificationResult::trials)
      .def_readonly("checked", &oracle::VerificationResult::checked)
      .def_property_readonly("passed", &oracle::VerificationResult::passed)
      .def_property_readonly("violations",
                             [](const oracle::VerificationResult& r) {
                               py::list out;
                               for (const auto& v : r.violations) {
                                 out.append(py::make_tuple(v.seed, v.property,
                                                           v.lhs, v.rhs));
                               }
                               return out;
                             });

  m.def("property_names", [] { return oracle::property_names(); });
  m.def(
      "verify",
      [](const std::string& property,
         const std::vector<oracle::InstanceSpec>& specs, int threads) {
        oracle::VerifyOptions options;
        options.threads = threads;
        return oracle::verify(property, specs, options);
      },
      py::arg("property"), py::arg("specs"), py::arg("threads") = 1);

  m.def(
      "load_dataset_csv",
      [](const std::string& path, const LabelSpace& space) {
        return io::load_dataset_csv(path, space);
      },
      py::arg("path"), py::arg("space"));
  m.def("save_dataset_csv", &io::save_dataset_csv, py::arg("path"),
        py::arg("dataset"));
  m.def(
      "load_ensemble_json",
      [](const std::string& path) { return io::load_ensemble_json(path); },
      py::arg("path"));
  m.def("save_ensemble_json", &io::save_ensemble_json, py::arg("path"),
        py::arg("ensemble"));
}
