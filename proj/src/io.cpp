#include "msa/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace msa::io {

namespace {

[[noreturn]] void fail(std::string_view where, std::string_view message) {
  throw InputError(std::string(where) + ": " + std::string(message));
}

const json& field(const json& j, const char* name, std::string_view where) {
  if (!j.is_object()) fail(where, "expected a JSON object");
  const auto it = j.find(name);
  if (it == j.end()) fail(where, std::string("missing field '") + name + "'");
  return *it;
}

std::vector<std::string> string_array(const json& j, std::string_view where, const char* name) {
  if (!j.is_array()) fail(where, std::string("field '") + name + "' must be an array of strings");
  std::vector<std::string> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_string()) fail(where, std::string(name) + "[" + std::to_string(i) + "] is not a string");
    out.push_back(j[i].get<std::string>());
  }
  return out;
}

std::vector<double> number_array(const json& j, std::string_view where, const char* name) {
  if (!j.is_array()) fail(where, std::string("field '") + name + "' must be an array of numbers");
  std::vector<double> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) fail(where, std::string(name) + "[" + std::to_string(i) + "] is not a number");
    out.push_back(j[i].get<double>());
  }
  return out;
}

/// Rewraps constructor errors with the location.
template <class Make>
auto located(std::string_view where, Make&& make) {
  try {
    return make();
  } catch (const InputError& e) {
    fail(where, e.what());
  }
}

std::pair<std::size_t, std::size_t> line_col(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

}  // namespace

json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(path, "cannot open file");
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_col(text, e.byte);
    fail(path + ":" + std::to_string(line) + ":" + std::to_string(col), "invalid JSON");
  }
}

void write_json_file(const std::string& path, const json& value) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(path, "cannot open file for writing");
  out << value.dump(2) << '\n';
}

Dist dist_from_json(const json& j, std::string_view where) {
  auto points = string_array(field(j, "support", where), where, "support");
  auto probs = number_array(field(j, "probs", where), where, "probs");
  return located(where, [&] { return Dist(make_support(std::move(points)), std::move(probs)); });
}

Hypothesis hypothesis_from_json(const json& j, std::string_view where) {
  auto points = string_array(field(j, "support", where), where, "support");
  auto values = number_array(field(j, "values", where), where, "values");
  double range_bound = 1.0;
  if (j.contains("range_bound")) {
    if (!j["range_bound"].is_number()) fail(where, "field 'range_bound' must be a number");
    range_bound = j["range_bound"].get<double>();
  }
  return located(where,
                 [&] { return Hypothesis(make_support(std::move(points)), std::move(values), range_bound); });
}

SimplexWeights weights_from_json(const json& j, std::string_view where) {
  const json& arr = j.is_object() ? field(j, "weights", where) : j;
  auto w = number_array(arr, where, "weights");
  return located(where, [&] { return SimplexWeights(std::move(w)); });
}

Dist read_dist(const std::string& path) { return dist_from_json(read_json_file(path), path); }
Hypothesis read_hypothesis(const std::string& path) { return hypothesis_from_json(read_json_file(path), path); }
SimplexWeights read_weights(const std::string& path) { return weights_from_json(read_json_file(path), path); }

json real_to_json(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  return v;
}

json to_json(const Dist& d) {
  return {{"support", d.support()->points()}, {"probs", d.probs()}};
}

json to_json(const Hypothesis& h) {
  return {{"support", h.support()->points()}, {"values", h.values()}, {"range_bound", h.range_bound()}};
}

json to_json(const SimplexWeights& w) { return json(w.values()); }

json to_json(const FitResult& r) {
  return {{"weights", to_json(r.weights)},
          {"objective_bits", real_to_json(r.objective_bits)},
          {"iterations", r.iterations},
          {"converged", r.converged},
          {"gap_bits", real_to_json(r.gap_bits)}};
}

json to_json(const RobustFitResult& r) {
  return {{"weights", to_json(r.weights)},
          {"eta", r.eta},
          {"worst_source_loss", r.worst_source_loss},
          {"eps", r.eps},
          {"delta", r.delta},
          {"reached_target", r.reached_target},
          {"iterations", r.iterations}};
}

json to_json(const AdversarialTarget& r) {
  return {{"p", to_json(r.p)},
          {"r_factor", r.r_factor},
          {"delta_alpha", r.delta_alpha},
          {"eps", r.eps},
          {"realized_divergence_bits", real_to_json(r.realized_divergence_bits)},
          {"realized_loss", r.realized_loss},
          {"predicted_loss", r.predicted_loss}};
}

json to_json(const BoundReport& r) {
  return {{"theorem_id", to_string(r.theorem_id)},
          {"bound_value", real_to_json(r.bound_value)},
          {"measured_value", real_to_json(r.measured_value)},
          {"margin", real_to_json(r.margin)},
          {"holds", r.holds},
          {"vacuous", r.vacuous},
          {"inputs_digest", r.inputs_digest}};
}

json to_json(const NormBoundCert& c) {
  return {{"rho", real_to_json(c.rho)},
          {"r", real_to_json(c.r)},
          {"holds", c.holds},
          {"worst_point", c.worst_point},
          {"worst_ratio", real_to_json(c.worst_ratio)}};
}

json suite_summary(const SuiteResult& r) {
  return {{"suite", r.suite}, {"trials", r.trials}, {"violations", r.violations}, {"vacuous", r.vacuous}};
}

json to_json(const ExperimentResult& r) {
  json rows = json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"lambda", row.lambda},
                    {"mse", row.mse},
                    {"divergence_bits", real_to_json(row.divergence_bits)},
                    {"thm2_bound", real_to_json(row.thm2_bound)}});
  return {{"rows", rows},
          {"argmin_mse", r.argmin_mse},
          {"argmin_div", r.argmin_div},
          {"rank_correlation", r.rank_correlation},
          {"min_divergence_bits", real_to_json(r.min_divergence_bits)}};
}

}  // namespace msa::io
