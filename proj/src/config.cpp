#include "hmmar/config.hpp"

#include <fstream>
#include <set>

#include "hmmar/filters.hpp"

namespace hmmar {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::set<std::string>& allowed,
                    const std::string& where) {
  for (const auto& item : obj.items()) {
    if (!allowed.count(item.key())) {
      throw ConfigError(where.empty() ? item.key() : where + "." + item.key(), "unknown key");
    }
  }
}

double number_at(const json& v, const std::string& field) {
  if (!v.is_number()) throw ConfigError(field, "expected a number");
  return v.get<double>();
}

std::size_t count_at(const json& v, const std::string& field) {
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw ConfigError(field, "expected a non-negative integer");
  }
  return v.get<std::size_t>();
}

Vector vector_at(const json& v, const std::string& field) {
  if (!v.is_array()) throw ConfigError(field, "expected an array of numbers");
  Vector out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) {
    out[static_cast<Eigen::Index>(i)] = number_at(v[i], field + "[" + std::to_string(i) + "]");
  }
  return out;
}

}  // namespace

Mode parse_mode(const std::string& text) {
  if (text == "optimal") return Mode::optimal;
  if (text == "nonparametric") return Mode::nonparametric;
  if (text == "both") return Mode::both;
  throw ConfigError("mode", "expected optimal, nonparametric or both");
}

std::string to_string(Mode mode) {
  switch (mode) {
    case Mode::optimal: return "optimal";
    case Mode::nonparametric: return "nonparametric";
    case Mode::both: return "both";
  }
  return "both";
}

SwitchingArModel model_from_json(const json& doc) {
  if (!doc.is_object()) throw ConfigError("model", "expected an object");
  reject_unknown(doc, {"transition", "states", "initial_dist"}, "model");
  if (!doc.contains("transition")) throw ConfigError("model.transition", "missing");
  if (!doc.contains("states")) throw ConfigError("model.states", "missing");

  const json& rows = doc["transition"];
  if (!rows.is_array() || rows.size() < 2) {
    throw ConfigError("model.transition", "expected at least two rows");
  }
  const auto m = static_cast<Eigen::Index>(rows.size());
  Matrix p(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const std::string field = "model.transition[" + std::to_string(i) + "]";
    const Vector row = vector_at(rows[static_cast<std::size_t>(i)], field);
    if (row.size() != m) throw ConfigError(field, "row length differs from number of rows");
    p.row(i) = row.transpose();
  }

  const json& states = doc["states"];
  if (!states.is_array()) throw ConfigError("model.states", "expected an array");
  std::vector<ArStateParams> params;
  for (std::size_t k = 0; k < states.size(); ++k) {
    const std::string field = "model.states[" + std::to_string(k) + "]";
    const json& st = states[k];
    if (!st.is_object()) throw ConfigError(field, "expected an object");
    reject_unknown(st, {"mu", "a", "b"}, field);
    for (const char* key : {"mu", "a", "b"}) {
      if (!st.contains(key)) throw ConfigError(field + "." + key, "missing");
    }
    ArStateParams ap;
    ap.mu = number_at(st["mu"], field + ".mu");
    ap.a = vector_at(st["a"], field + ".a");
    ap.b = number_at(st["b"], field + ".b");
    if (!(ap.b > 0.0)) throw ConfigError(field + ".b", "must be positive");
    params.push_back(std::move(ap));
  }
  if (params.size() != rows.size()) {
    throw ConfigError("model.states", "count differs from transition matrix size");
  }
  for (std::size_t k = 1; k < params.size(); ++k) {
    if (params[k].order() != params[0].order()) {
      throw ConfigError("model.states[" + std::to_string(k) + "].a", "AR order differs from state 1");
    }
  }

  std::optional<Vector> init;
  if (doc.contains("initial_dist")) init = vector_at(doc["initial_dist"], "model.initial_dist");

  try {
    TransitionMatrix t(std::move(p));
    return SwitchingArModel(std::move(t), std::move(params), std::move(init));
  } catch (const std::invalid_argument& e) {
    throw ConfigError("model", e.what());
  } catch (const std::domain_error& e) {
    throw ConfigError("model.transition", e.what());
  }
}

ExperimentConfig experiment_config_from_json(const json& doc) {
  if (!doc.is_object()) throw ConfigError("<root>", "expected an object");
  reject_unknown(doc,
                 {"model", "n_total", "eval_window", "tau", "stride", "repeats", "seed", "burn_in",
                  "mode"},
                 "");
  if (!doc.contains("model")) throw ConfigError("model", "missing");

  ExperimentConfig cfg{model_from_json(doc["model"])};
  if (doc.contains("n_total")) cfg.n_total = count_at(doc["n_total"], "n_total");
  if (doc.contains("eval_window")) {
    const json& w = doc["eval_window"];
    if (!w.is_array() || w.size() != 2) throw ConfigError("eval_window", "expected [n_lo, n_hi]");
    cfg.eval_lo = count_at(w[0], "eval_window[0]");
    cfg.eval_hi = count_at(w[1], "eval_window[1]");
  }
  if (doc.contains("tau")) cfg.tau = count_at(doc["tau"], "tau");
  if (doc.contains("stride")) cfg.stride = count_at(doc["stride"], "stride");
  if (doc.contains("repeats")) cfg.repeats = count_at(doc["repeats"], "repeats");
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned() && !(doc["seed"].is_number_integer() &&
                                                doc["seed"].get<long long>() >= 0)) {
      throw ConfigError("seed", "expected an unsigned 64-bit integer");
    }
    cfg.seed = doc["seed"].get<std::uint64_t>();
  }
  if (doc.contains("burn_in")) cfg.burn_in = count_at(doc["burn_in"], "burn_in");
  if (doc.contains("mode")) {
    if (!doc["mode"].is_string()) throw ConfigError("mode", "expected a string");
    cfg.mode = parse_mode(doc["mode"].get<std::string>());
  }
  validate(cfg);
  return cfg;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", "cannot open " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("<file>", std::string("malformed JSON: ") + e.what());
  }
  return experiment_config_from_json(doc);
}

void validate(const ExperimentConfig& c) {
  if (c.model.num_states() < 2) throw ConfigError("model.transition", "need at least two states");
  if (c.tau < 1) throw ConfigError("tau", "must be at least 1");
  if (c.stride < 1) throw ConfigError("stride", "must be at least 1");
  if (c.repeats < 1) throw ConfigError("repeats", "must be at least 1");
  if (c.n_total < 1) throw ConfigError("n_total", "must be at least 1");
  const std::size_t warmup = nonparametric_warmup(c.model.ar_order(), c.tau);
  if (c.eval_lo <= warmup) {
    throw ConfigError("eval_window", "start must exceed the warm-up threshold " +
                                         std::to_string(warmup));
  }
  if (c.eval_hi < c.eval_lo) throw ConfigError("eval_window", "end precedes start");
  if (c.eval_hi > c.n_total) throw ConfigError("eval_window", "end exceeds n_total");
}

}  // namespace hmmar
