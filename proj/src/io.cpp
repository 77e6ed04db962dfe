#include "votebound/io.hpp"

#include <cerrno>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "votebound/version.hpp"

namespace votebound::io {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(trim(field));
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

double parse_double_field(const std::string& text, int line, int column) {
  const std::string t = trim(text);
  if (t.empty()) throw ParseError("empty numeric field", line, column);
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(t.c_str(), &end);
  if (errno != 0 || end == t.c_str() || *end != '\0') {
    throw ParseError("cannot parse '" + t + "' as a number", line, column);
  }
  return v;
}

long parse_int_field(const std::string& text, int line, int column) {
  const std::string t = trim(text);
  long v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc{} || ptr != t.data() + t.size()) {
    throw ParseError("cannot parse '" + t + "' as an integer", line, column);
  }
  return v;
}

Label parse_label_field(const std::string& text, const LabelSpace& space,
                        int line, int column) {
  const std::string t = trim(text);
  Label label;
  switch (space.kind) {
    case LabelKind::binary: {
      if (t == "+1" || t == "1") {
        label.cls = 1;
      } else if (t == "-1") {
        label.cls = -1;
      } else {
        throw ParseError("binary label must be +1 or -1, got '" + t + "'",
                         line, column);
      }
      break;
    }
    case LabelKind::multiclass: {
      const long v = parse_int_field(t, line, column);
      if (v < 1 || v > space.class_count) {
        throw ParseError("class label " + std::to_string(v) +
                         " outside 1.." + std::to_string(space.class_count),
                         line, column);
      }
      label.cls = static_cast<int>(v);
      break;
    }
    case LabelKind::multilabel: {
      if (t.size() != static_cast<std::size_t>(space.class_count)) {
        throw ParseError("bitstring label must have exactly " +
                         std::to_string(space.class_count) + " characters",
                         line, column);
      }
      label.bits.reserve(t.size());
      for (char c : t) {
        if (c != '0' && c != '1') {
          throw ParseError("bitstring label may contain only 0 and 1", line,
                           column);
        }
        label.bits.push_back(c == '1');
      }
      break;
    }
  }
  return label;
}

}  // namespace

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

Dataset load_dataset_csv(const std::string& path, const LabelSpace& space) {
  space.validate();
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open dataset file: " + path);

  std::string line;
  if (!std::getline(in, line)) throw ParseError("missing header", 1);
  const auto header = split_csv_line(line);

  int label_col = -1;
  int weight_col = -1;
  std::vector<int> feature_cols;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == "label") {
      label_col = static_cast<int>(c);
    } else if (header[c] == "weight") {
      weight_col = static_cast<int>(c);
    } else {
      feature_cols.push_back(static_cast<int>(c));
    }
  }
  if (label_col < 0) throw ParseError("header has no 'label' column", 1);
  if (feature_cols.empty()) {
    throw ParseError("header has no feature columns", 1);
  }

  std::vector<std::vector<double>> features;
  std::vector<Label> targets;
  std::vector<double> weights;
  bool has_weights = weight_col >= 0;

  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      throw ParseError("expected " + std::to_string(header.size()) +
                       " fields, got " + std::to_string(fields.size()),
                       line_no);
    }
    std::vector<double> row;
    row.reserve(feature_cols.size());
    for (int c : feature_cols) {
      row.push_back(parse_double_field(fields[c], line_no, c + 1));
    }
    features.push_back(std::move(row));
    targets.push_back(
        parse_label_field(fields[label_col], space, line_no, label_col + 1));
    if (has_weights) {
      const double w =
          parse_double_field(fields[weight_col], line_no, weight_col + 1);
      if (w < 0.0) throw ParseError("weight must be nonnegative", line_no,
                                    weight_col + 1);
      weights.push_back(w);
    }
  }
  if (features.empty()) throw ParseError("dataset has no example rows", line_no);
  return make_dataset(space, std::move(features), std::move(targets),
                      std::move(weights));
}

std::string dataset_to_csv(const Dataset& dataset) {
  std::ostringstream out;
  for (int j = 0; j < dataset.feature_dim; ++j) out << 'f' << j << ',';
  out << "label,weight\n";
  for (const Example& e : dataset.examples) {
    for (double f : e.features) out << format_double(f) << ',';
    out << to_string(e.target, dataset.label_space) << ','
        << format_double(e.weight) << '\n';
  }
  return out.str();
}

void save_dataset_csv(const std::string& path, const Dataset& dataset) {
  write_text_atomic(path, dataset_to_csv(dataset));
}

namespace {

Label label_from_json(const json& j, const LabelSpace& space) {
  Label label;
  if (space.kind == LabelKind::multilabel) {
    if (!j.is_string()) {
      throw ConfigError("multilabel predictions must be bitstrings");
    }
    const std::string s = j.get<std::string>();
    if (s.size() != static_cast<std::size_t>(space.class_count)) {
      throw ConfigError("bitstring '" + s + "' must have exactly " +
                        std::to_string(space.class_count) + " characters");
    }
    for (char c : s) {
      if (c != '0' && c != '1') {
        throw ConfigError("bitstring may contain only 0 and 1");
      }
      label.bits.push_back(c == '1');
    }
    return label;
  }
  if (!j.is_number_integer()) {
    throw ConfigError("class predictions must be integers");
  }
  label.cls = j.get<int>();
  if (!label_valid(label, space)) {
    throw ConfigError("prediction " + std::to_string(label.cls) +
                      " is inconsistent with the label space");
  }
  return label;
}

json label_to_json(const Label& label, const LabelSpace& space) {
  if (space.kind == LabelKind::multilabel) {
    return to_string(label, space);
  }
  return label.cls;
}

}  // namespace

Ensemble load_ensemble_json(const std::string& path, const Dataset* dataset) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open ensemble file: " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("ensemble file " + path + ": " + e.what());
  }

  Ensemble ensemble;
  if (!doc.contains("labelSpace")) {
    throw ConfigError("ensemble file lacks a labelSpace object");
  }
  const json& ls = doc["labelSpace"];
  ensemble.label_space.kind =
      label_kind_from_string(ls.value("kind", std::string{}));
  ensemble.label_space.class_count =
      ensemble.label_space.kind == LabelKind::binary ? 2 : ls.value("Q", 0);
  ensemble.label_space.validate();

  if (!doc.contains("voters") || !doc["voters"].is_array() ||
      doc["voters"].empty()) {
    throw ConfigError("ensemble file needs a nonempty voters array");
  }
  for (const json& jv : doc["voters"]) {
    Voter voter;
    voter.kind = voter_kind_from_string(jv.value("kind", std::string{}));
    switch (voter.kind) {
      case VoterKind::stump:
        voter.feature_index = jv.value("featureIndex", 0);
        voter.threshold = jv.value("threshold", 0.0);
        if (!jv.contains("leftClass") || !jv.contains("rightClass")) {
          throw ConfigError("stump voter needs leftClass and rightClass");
        }
        voter.left = label_from_json(jv["leftClass"], ensemble.label_space);
        voter.right = label_from_json(jv["rightClass"], ensemble.label_space);
        break;
      case VoterKind::table: {
        if (!jv.contains("predictions") || !jv["predictions"].is_array()) {
          throw ConfigError("table voter needs a predictions array");
        }
        for (const json& jp : jv["predictions"]) {
          voter.predictions.push_back(
              label_from_json(jp, ensemble.label_space));
        }
        break;
      }
      case VoterKind::realvalued_table: {
        if (!jv.contains("predictions") || !jv["predictions"].is_array()) {
          throw ConfigError("realvalued-table voter needs a predictions array");
        }
        for (const json& jp : jv["predictions"]) {
          if (!jp.is_number()) {
            throw ConfigError("real-valued predictions must be numbers");
          }
          voter.values.push_back(jp.get<double>());
        }
        break;
      }
    }
    ensemble.voters.push_back(std::move(voter));
  }

  if (doc.contains("posterior") && !doc["posterior"].is_null()) {
    if (!doc["posterior"].is_array()) {
      throw ConfigError("posterior must be an array of weights");
    }
    for (const json& jw : doc["posterior"]) {
      ensemble.posterior.weights.push_back(jw.get<double>());
    }
  } else {
    ensemble.posterior = Posterior::uniform(ensemble.voters.size());
  }

  if (ensemble.posterior.size() != ensemble.voters.size()) {
    throw ConfigError("posterior length " +
                      std::to_string(ensemble.posterior.size()) +
                      " does not match voter count " +
                      std::to_string(ensemble.voters.size()));
  }
  ensemble.posterior.validate();
  if (dataset != nullptr) ensemble.validate(*dataset);
  return ensemble;
}

json ensemble_to_json(const Ensemble& ensemble) {
  json doc;
  doc["labelSpace"] = {{"kind", to_string(ensemble.label_space.kind)},
                       {"Q", ensemble.label_space.class_count}};
  json voters = json::array();
  for (const Voter& v : ensemble.voters) {
    json jv;
    jv["kind"] = to_string(v.kind);
    switch (v.kind) {
      case VoterKind::stump:
        jv["featureIndex"] = v.feature_index;
        jv["threshold"] = v.threshold;
        jv["leftClass"] = label_to_json(v.left, ensemble.label_space);
        jv["rightClass"] = label_to_json(v.right, ensemble.label_space);
        break;
      case VoterKind::table: {
        json preds = json::array();
        for (const Label& p : v.predictions) {
          preds.push_back(label_to_json(p, ensemble.label_space));
        }
        jv["predictions"] = std::move(preds);
        break;
      }
      case VoterKind::realvalued_table:
        jv["predictions"] = v.values;
        break;
    }
    voters.push_back(std::move(jv));
  }
  doc["voters"] = std::move(voters);
  doc["posterior"] = ensemble.posterior.weights;
  return doc;
}

void save_ensemble_json(const std::string& path, const Ensemble& ensemble) {
  write_text_atomic(path, ensemble_to_json(ensemble).dump(2) + "\n");
}

namespace {

json bound_entry_to_json(const BoundEntry& entry) {
  if (!entry.applicable) {
    return json{{"status", "undefined"},
                {"reason", "not applicable to this label kind"}};
  }
  if (!entry.defined) {
    return json{{"status", "undefined"}, {"reason", entry.reason}};
  }
  return json{{"status", "ok"},
              {"value", entry.value},
              {"clipped", entry.clipped}};
}

json moment_to_json(const MomentPair& m) {
  return json{{"mu1", m.mu1}, {"mu2", m.mu2}};
}

json probability_or_undefined(const std::optional<double>& p) {
  if (p.has_value()) return *p;
  return "undefined";
}

}  // namespace

json report_to_json(const BoundReport& report) {
  json doc;
  doc["version"] = kVersion;
  doc["settings"] = {{"kind", to_string(report.kind)},
                     {"Q", report.class_count},
                     {"omega", report.settings.omega},
                     {"seed", report.settings.seed}};
  doc["risk"] = report.risk;
  doc["marginProbabilities"] = {
      {"pMarginQLeq0", probability_or_undefined(report.p_margin_q_leq0)},
      {"pMargin2Leq0", probability_or_undefined(report.p_margin_2_leq0)},
      {"pTwoMarginLeq0", probability_or_undefined(report.p_two_margin_leq0)}};

  json moments_json;
  for (const auto& [family, m] : report.moment_families) {
    moments_json[family] = moment_to_json(m);
  }
  if (!report.strength_moments.empty()) {
    json strength = json::array();
    for (const MomentPair& m : report.strength_moments) {
      strength.push_back(moment_to_json(m));
    }
    moments_json["strength"] = std::move(strength);
  }
  doc["moments"] = std::move(moments_json);

  doc["bounds"] = {{"theorem1", bound_entry_to_json(report.theorem1)},
                   {"theorem4", bound_entry_to_json(report.theorem4)},
                   {"theorem5", bound_entry_to_json(report.theorem5)},
                   {"theorem6", bound_entry_to_json(report.theorem6)},
                   {"theorem7", bound_entry_to_json(report.theorem7)},
                   {"eq2-union", bound_entry_to_json(report.eq2_union)},
                   {"theorem3-lower", bound_entry_to_json(report.theorem3_lower)},
                   {"theorem3-upper", bound_entry_to_json(report.theorem3_upper)}};
  return doc;
}

namespace {

void csv_row(std::ostringstream& out, const std::string& key,
             const std::string& value) {
  out << key << ',' << value << '\n';
}

std::string bound_entry_csv(const BoundEntry& entry) {
  return entry.applicable && entry.defined ? format_double(entry.value)
                                           : "undefined";
}

}  // namespace

std::string report_to_csv(const BoundReport& report) {
  std::ostringstream out;
  out << "key,value\n";
  csv_row(out, "version", kVersion);
  csv_row(out, "kind", to_string(report.kind));
  csv_row(out, "Q", std::to_string(report.class_count));
  csv_row(out, "omega", format_double(report.settings.omega));
  csv_row(out, "seed", std::to_string(report.settings.seed));
  csv_row(out, "risk", format_double(report.risk));
  auto prob = [&](const char* key, const std::optional<double>& p) {
    csv_row(out, key, p.has_value() ? format_double(*p) : "undefined");
  };
  prob("pMarginQLeq0", report.p_margin_q_leq0);
  prob("pMargin2Leq0", report.p_margin_2_leq0);
  prob("pTwoMarginLeq0", report.p_two_margin_leq0);
  for (const auto& [family, m] : report.moment_families) {
    csv_row(out, "mu1." + family, format_double(m.mu1));
    csv_row(out, "mu2." + family, format_double(m.mu2));
  }
  for (std::size_t c = 0; c < report.strength_moments.size(); ++c) {
    csv_row(out, "mu1.strength" + std::to_string(c + 1),
            format_double(report.strength_moments[c].mu1));
    csv_row(out, "mu2.strength" + std::to_string(c + 1),
            format_double(report.strength_moments[c].mu2));
  }
  csv_row(out, "theorem1", bound_entry_csv(report.theorem1));
  csv_row(out, "theorem4", bound_entry_csv(report.theorem4));
  csv_row(out, "theorem5", bound_entry_csv(report.theorem5));
  csv_row(out, "theorem6", bound_entry_csv(report.theorem6));
  csv_row(out, "theorem7", bound_entry_csv(report.theorem7));
  csv_row(out, "eq2-union", bound_entry_csv(report.eq2_union));
  csv_row(out, "theorem3-lower", bound_entry_csv(report.theorem3_lower));
  csv_row(out, "theorem3-upper", bound_entry_csv(report.theorem3_upper));
  return out.str();
}

json verification_to_json(const oracle::VerificationResult& result) {
  json doc;
  doc["version"] = kVersion;
  doc["property"] = result.property;
  doc["trials"] = result.trials;
  doc["checked"] = result.checked;
  doc["passed"] = result.passed();
  json violations = json::array();
  for (const auto& v : result.violations) {
    violations.push_back({{"seed", v.seed},
                          {"property", v.property},
                          {"lhs", v.lhs},
                          {"rhs", v.rhs}});
  }
  doc["violations"] = std::move(violations);
  return doc;
}

json minimize_result_to_json(const MinimizeResult& result,
                             const MinimizeConfig& config) {
  json doc;
  doc["version"] = kVersion;
  doc["settings"] = {{"omega", config.omega},
                     {"gridPoints", config.grid_points},
                     {"maxIterations", config.max_iterations},
                     {"tolerance", config.tolerance},
                     {"seed", config.seed}};
  doc["posterior"] = result.posterior.weights;
  doc["mu"] = result.mu;
  doc["mu1"] = result.mu1;
  doc["mu2"] = result.mu2;
  doc["bound"] = result.bound;
  doc["iterations"] = result.iterations;
  doc["converged"] = result.converged;
  doc["infeasibleGrid"] = result.infeasible_grid;
  return doc;
}

void write_text_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write file: " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw ConfigError("write failed: " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw ConfigError("cannot rename " + tmp.string() + " to " + path + ": " +
                      ec.message());
  }
}

}  // namespace votebound::io
