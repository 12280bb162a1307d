#pragma once

#include <json.hpp>

#include <array>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "morl/env/gridworld.hpp"
#include "morl/env/objectworld.hpp"
#include "morl/env/pendulum.hpp"
#include "morl/error.hpp"
#include "morl/harness/suites.hpp"

namespace morl::cli {

using nlohmann::json;

enum class ExperimentKind { kGridworldLiving, kGridworldNegative, kGridworldPositive, kObjectworld, kPendulum, kVerifyBounds };

inline constexpr std::array<std::pair<ExperimentKind, const char*>, 6> kKindNames{{
    {ExperimentKind::kGridworldLiving, "gridworld-living"},
    {ExperimentKind::kGridworldNegative, "gridworld-negative"},
    {ExperimentKind::kGridworldPositive, "gridworld-positive"},
    {ExperimentKind::kObjectworld, "objectworld"},
    {ExperimentKind::kPendulum, "pendulum"},
    {ExperimentKind::kVerifyBounds, "verify-bounds"},
}};

inline std::string to_string(ExperimentKind k) {
  for (const auto& [kind, name] : kKindNames) {
    if (kind == k) return name;
  }
  return "?";
}

inline ExperimentKind parse_kind(const std::string& s) {
  for (const auto& [kind, name] : kKindNames) {
    if (s == name) return kind;
  }
  std::string known;
  for (const auto& [kind, name] : kKindNames) known += (known.empty() ? "" : ", ") + std::string(name);
  throw InvalidArgument("unknown experiment kind '" + s + "' (expected one of " + known + ")");
}

inline bool is_gridworld_sweep(ExperimentKind k) {
  return k == ExperimentKind::kGridworldLiving || k == ExperimentKind::kGridworldNegative ||
         k == ExperimentKind::kGridworldPositive;
}

/// Fully resolved experiment description. Every field has a default, so an
/// empty document is a valid config for any kind.
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::kGridworldLiving;
  std::uint64_t seed = 0;
  std::filesystem::path out_dir;

  GridworldSpec gridworld;
  ObjectworldSpec objectworld;
  PendulumSpec pendulum;

  harness::GpSettings gp;
  std::vector<double> train;
  std::vector<double> eval;
  double solver_tol = 1e-9;
  harness::PendulumSampling sampling;
  std::size_t episodes = 5;
  std::size_t pairs = 100;

  /// Canonical echo of every resolved value; also the provenance string.
  json effective;
};

namespace detail {

/// Reads known keys from one object and rejects anything left over.
class SectionReader {
 public:
  SectionReader(const json& doc, std::string section) : section_(std::move(section)) {
    if (doc.contains(section_)) {
      obj_ = doc.at(section_);
      if (!obj_.is_object()) throw InvalidArgument("config section '" + section_ + "' must be an object");
    } else {
      obj_ = json::object();
    }
  }

  template <class T>
  void read(const std::string& key, T& dst) {
    seen_.insert(key);
    if (!obj_.contains(key)) return;
    try {
      dst = obj_.at(key).get<T>();
    } catch (const json::exception&) {
      throw InvalidArgument("config key '" + section_ + "." + key + "' has the wrong type");
    }
  }

  void read_cell(const std::string& key, Cell& dst) {
    std::array<int, 2> rc{dst.row, dst.col};
    read(key, rc);
    dst = {rc[0], rc[1]};
  }

  bool has(const std::string& key) const { return obj_.contains(key); }

  void read_cells(const std::string& key, std::vector<Cell>& dst) {
    seen_.insert(key);
    if (!obj_.contains(key)) return;
    std::vector<std::array<int, 2>> v;
    read(key, v);
    dst.clear();
    for (const auto& rc : v) dst.push_back({rc[0], rc[1]});
  }

  void finish() const {
    for (const auto& [key, value] : obj_.items()) {
      if (!seen_.count(key)) throw InvalidArgument("unknown config key '" + section_ + "." + key + "'");
    }
  }

 private:
  std::string section_;
  json obj_;
  std::set<std::string> seen_;
};

inline json cell_json(Cell c) { return json::array({c.row, c.col}); }

inline json spec_json(const GridworldSpec& s) {
  json walls = json::array();
  for (const auto& w : s.walls) walls.push_back(cell_json(w));
  return {{"n", s.n},
          {"walls", walls},
          {"positive_terminal", cell_json(s.positive_terminal)},
          {"positive_reward", s.positive_reward},
          {"negative_terminal", cell_json(s.negative_terminal)},
          {"negative_reward", s.negative_reward},
          {"start", cell_json(s.start)},
          {"living_reward", s.living_reward},
          {"slip_prob", s.slip_prob},
          {"gamma", s.gamma}};
}

inline json spec_json(const ObjectworldSpec& s) {
  return {{"n", s.n},
          {"n_objects", s.n_objects},
          {"n_colors", s.n_colors},
          {"positive_reward", s.positive_reward},
          {"negative_reward", s.negative_reward},
          {"outer0_radius", s.outer0_radius},
          {"outer1_radius", s.outer1_radius},
          {"slip_prob", s.slip_prob},
          {"gamma", s.gamma}};
}

inline json spec_json(const PendulumSpec& s) {
  return {{"theta_bins", s.theta_bins},       {"thetadot_bins", s.thetadot_bins},
          {"dt", s.dt},                       {"gravity", s.gravity},
          {"mass", s.mass},                   {"length", s.length},
          {"max_speed", s.max_speed},         {"max_torque", s.max_torque},
          {"n_torques", s.n_torques},         {"episode_limit", s.episode_limit},
          {"gamma", s.gamma},                 {"weights", s.weights}};
}

inline void read_spec(SectionReader& r, GridworldSpec& s) {
  r.read("n", s.n);
  r.read_cells("walls", s.walls);
  r.read_cell("positive_terminal", s.positive_terminal);
  r.read("positive_reward", s.positive_reward);
  r.read_cell("negative_terminal", s.negative_terminal);
  r.read("negative_reward", s.negative_reward);
  r.read_cell("start", s.start);
  r.read("living_reward", s.living_reward);
  r.read("slip_prob", s.slip_prob);
  r.read("gamma", s.gamma);
}

inline void read_spec(SectionReader& r, ObjectworldSpec& s) {
  r.read("n", s.n);
  r.read("n_objects", s.n_objects);
  r.read("n_colors", s.n_colors);
  r.read("positive_reward", s.positive_reward);
  r.read("negative_reward", s.negative_reward);
  r.read("outer0_radius", s.outer0_radius);
  r.read("outer1_radius", s.outer1_radius);
  r.read("slip_prob", s.slip_prob);
  r.read("gamma", s.gamma);
}

inline void read_spec(SectionReader& r, PendulumSpec& s) {
  r.read("theta_bins", s.theta_bins);
  r.read("thetadot_bins", s.thetadot_bins);
  r.read("dt", s.dt);
  r.read("gravity", s.gravity);
  r.read("mass", s.mass);
  r.read("length", s.length);
  r.read("max_speed", s.max_speed);
  r.read("max_torque", s.max_torque);
  r.read("n_torques", s.n_torques);
  r.read("episode_limit", s.episode_limit);
  r.read("gamma", s.gamma);
  r.read("weights", s.weights);
}

inline harness::GridworldAxis gridworld_axis(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::kGridworldNegative: return harness::GridworldAxis::kNegative;
    case ExperimentKind::kGridworldPositive: return harness::GridworldAxis::kPositive;
    default: return harness::GridworldAxis::kLiving;
  }
}

/// Per-kind defaults applied before the document is read.
inline void apply_kind_defaults(ExperimentConfig& c) {
  if (is_gridworld_sweep(c.kind)) {
    const auto v = harness::default_gridworld_values(gridworld_axis(c.kind));
    c.train = v.train;
    c.eval = v.eval;
  } else if (c.kind == ExperimentKind::kObjectworld) {
    c.train = {0.5, 0.9, 1.0};
    c.eval = {0.6, 0.7, 0.8};
    // Several cells share a feature vector, which an isotropic scale with
    // near-zero noise cannot accommodate.
    c.gp.noise_variance = 1e-4;
    c.gp.per_dimension = true;
  } else if (c.kind == ExperimentKind::kPendulum) {
    c.train = {0.1, 0.01, 0.0001};
    c.eval = {0.001};
    c.gp.noise_variance = 1e-6;
  }
}

}  // namespace detail

/// Sets a dotted key ("gp.noise_variance") in a config document. The value is
/// parsed as JSON when possible, otherwise kept as a string.
inline void set_dotted(json& doc, const std::string& key, const std::string& value) {
  if (key.empty()) throw InvalidArgument("empty override key");
  json parsed;
  try {
    parsed = json::parse(value);
  } catch (const json::exception&) {
    parsed = value;
  }
  json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const auto part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (part.empty()) throw InvalidArgument("malformed override key '" + key + "'");
    if (!node->is_object()) throw InvalidArgument("override key '" + key + "' crosses a non-object value");
    if (dot == std::string::npos) {
      (*node)[part] = parsed;
      return;
    }
    node = &(*node)[part];
    if (node->is_null()) *node = json::object();
    start = dot + 1;
  }
}

inline json load_document(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open config file " + path.string());
  try {
    return json::parse(in, nullptr, true, true);
  } catch (const json::exception& e) {
    throw InvalidArgument("malformed config file " + path.string() + ": " + e.what());
  }
}

/// Resolves a document into a typed config. `kind_arg` wins over the
/// document's "kind" only when they agree; a conflict is an error.
inline ExperimentConfig resolve_config(const json& doc, const std::optional<std::string>& kind_arg) {
  if (!doc.is_object()) throw InvalidArgument("config document must be an object");
  static const std::set<std::string> top{"kind", "seed", "environment", "gp", "sweep", "output"};
  for (const auto& [key, value] : doc.items()) {
    if (!top.count(key)) throw InvalidArgument("unknown config key '" + key + "'");
  }

  std::optional<std::string> kind_name = kind_arg;
  if (doc.contains("kind")) {
    if (!doc.at("kind").is_string()) throw InvalidArgument("config key 'kind' must be a string");
    const auto k = doc.at("kind").get<std::string>();
    if (kind_name && *kind_name != k) {
      throw InvalidArgument("experiment kind '" + *kind_name + "' conflicts with config kind '" + k + "'");
    }
    kind_name = k;
  }
  if (!kind_name) throw InvalidArgument("no experiment kind given");

  ExperimentConfig c;
  c.kind = parse_kind(*kind_name);
  detail::apply_kind_defaults(c);

  if (doc.contains("seed")) {
    const auto& seed = doc.at("seed");
    if (!seed.is_number_integer() || (!seed.is_number_unsigned() && seed.get<std::int64_t>() < 0)) {
      throw InvalidArgument("config key 'seed' must be a non-negative integer");
    }
    c.seed = doc.at("seed").get<std::uint64_t>();
  }

  detail::SectionReader env(doc, "environment");
  json env_json;
  if (c.kind == ExperimentKind::kObjectworld) {
    detail::read_spec(env, c.objectworld);
    c.objectworld.seed = c.seed;
    env_json = detail::spec_json(c.objectworld);
  } else if (c.kind == ExperimentKind::kPendulum) {
    detail::read_spec(env, c.pendulum);
    env_json = detail::spec_json(c.pendulum);
  } else {
    detail::read_spec(env, c.gridworld);
    env_json = detail::spec_json(c.gridworld);
  }
  env.finish();

  detail::SectionReader gp(doc, "gp");
  gp.read("nu", c.gp.nu);
  gp.read("noise_variance", c.gp.noise_variance);
  gp.read("length_scale_candidates", c.gp.length_scale_candidates);
  gp.read("per_dimension", c.gp.per_dimension);
  if (gp.has("length_scale")) {
    double fixed = 0.0;
    gp.read("length_scale", fixed);
    c.gp.length_scale = fixed;
  }
  gp.finish();
  gp::smoothness_from_nu(c.gp.nu);
  if (!(c.gp.noise_variance >= 0.0)) throw InvalidArgument("gp.noise_variance must be >= 0");
  if (c.gp.length_scale_candidates.empty()) throw InvalidArgument("gp.length_scale_candidates must not be empty");

  detail::SectionReader sweep(doc, "sweep");
  sweep.read("train", c.train);
  sweep.read("eval", c.eval);
  sweep.read("solver_tol", c.solver_tol);
  sweep.read("state_stride", c.sampling.state_stride);
  sweep.read("dense_radius", c.sampling.dense_radius);
  std::string transform = c.sampling.transform == harness::AxisTransform::kLog10 ? "log10" : "identity";
  sweep.read("transform", transform);
  if (transform == "log10") {
    c.sampling.transform = harness::AxisTransform::kLog10;
  } else if (transform == "identity") {
    c.sampling.transform = harness::AxisTransform::kIdentity;
  } else {
    throw InvalidArgument("sweep.transform must be 'identity' or 'log10'");
  }
  sweep.read("episodes", c.episodes);
  sweep.read("pairs", c.pairs);
  sweep.finish();
  if (!(c.solver_tol > 0.0)) throw InvalidArgument("sweep.solver_tol must be > 0");

  detail::SectionReader output(doc, "output");
  std::string dir;
  output.read("dir", dir);
  output.finish();
  if (!dir.empty()) {
    c.out_dir = dir;
  } else if (const char* env_dir = std::getenv("MORL_OUT"); env_dir && *env_dir) {
    c.out_dir = std::filesystem::path(env_dir) / to_string(c.kind);
  } else {
    c.out_dir = std::filesystem::path("results") / to_string(c.kind);
  }

  json gp_json = {{"nu", c.gp.nu},
                  {"noise_variance", c.gp.noise_variance},
                  {"length_scale_candidates", c.gp.length_scale_candidates},
                  {"per_dimension", c.gp.per_dimension}};
  if (c.gp.length_scale) gp_json["length_scale"] = *c.gp.length_scale;
  c.effective = {{"kind", to_string(c.kind)},
                 {"seed", c.seed},
                 {"environment", env_json},
                 {"gp", gp_json},
                 {"sweep",
                  {{"train", c.train},
                   {"eval", c.eval},
                   {"solver_tol", c.solver_tol},
                   {"state_stride", c.sampling.state_stride},
                   {"dense_radius", c.sampling.dense_radius},
                   {"transform", transform},
                   {"episodes", c.episodes},
                   {"pairs", c.pairs}}}};
  return c;
}

}  // namespace morl::cli
