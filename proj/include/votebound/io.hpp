#pragma once

#include <string>
#include <vector>

#include <json.hpp>  // vendored nlohmann/json

#include "votebound/bounds.hpp"
#include "votebound/dataset.hpp"
#include "votebound/ensemble.hpp"
#include "votebound/minimizer.hpp"
#include "votebound/oracle.hpp"

namespace votebound::io {

using json = nlohmann::ordered_json;

/// CSV with a header; feature columns, a `label` column (class index,
/// +1/-1, or a Q-character bitstring, leftmost = label 1) and an optional
/// nonnegative `weight` column, renormalized to sum 1.
Dataset load_dataset_csv(const std::string& path, const LabelSpace& space);
std::string dataset_to_csv(const Dataset& dataset);
void save_dataset_csv(const std::string& path, const Dataset& dataset);

/// JSON document with labelSpace, voters and an optional posterior
/// (uniform when absent). Table voters are validated against the dataset
/// length when one is supplied.
Ensemble load_ensemble_json(const std::string& path,
                            const Dataset* dataset = nullptr);
json ensemble_to_json(const Ensemble& ensemble);
void save_ensemble_json(const std::string& path, const Ensemble& ensemble);

json report_to_json(const BoundReport& report);
std::string report_to_csv(const BoundReport& report);

json verification_to_json(const oracle::VerificationResult& result);
json minimize_result_to_json(const MinimizeResult& result,
                             const MinimizeConfig& config);

/// Full-precision decimal rendering (round-trips to the same double).
std::string format_double(double value);

/// Writes through a temp file in the same directory, then renames.
void write_text_atomic(const std::string& path, const std::string& content);

}  // namespace votebound::io
