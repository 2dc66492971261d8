#pragma once

// JSON readers and writers. Readers validate every invariant and name the
// file and field on failure. Infinite reals are written as the string "inf".

#include <json.hpp>

#include <string>
#include <string_view>

#include "msa/bounds.hpp"
#include "msa/core.hpp"
#include "msa/experiments.hpp"
#include "msa/fitting.hpp"
#include "msa/suites.hpp"

namespace msa::io {

using nlohmann::json;

/// Parses a file; syntax errors report line and column.
json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const json& value);

/// {"support": [string...], "probs": [number...]}
Dist dist_from_json(const json& j, std::string_view where);
/// {"support": [string...], "values": [number...], "range_bound": number}
Hypothesis hypothesis_from_json(const json& j, std::string_view where);
/// [number...] or {"weights": [number...]}
SimplexWeights weights_from_json(const json& j, std::string_view where);

Dist read_dist(const std::string& path);
Hypothesis read_hypothesis(const std::string& path);
SimplexWeights read_weights(const std::string& path);

json real_to_json(double v);
json to_json(const Dist& d);
json to_json(const Hypothesis& h);
json to_json(const SimplexWeights& w);
json to_json(const FitResult& r);
json to_json(const RobustFitResult& r);
json to_json(const AdversarialTarget& r);
json to_json(const BoundReport& r);
json to_json(const NormBoundCert& c);
json suite_summary(const SuiteResult& r);
json to_json(const ExperimentResult& r);

}  // namespace msa::io
