#pragma once

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "morl/error.hpp"
#include "morl/harness/suites.hpp"
#include "morl/harness/bound_check.hpp"

namespace morl::cli {

namespace detail {

template <class... Args>
std::string format(const char* fmt, Args... args) {
  char buf[64];
  const int n = std::snprintf(buf, sizeof buf, fmt, args...);
  if (n < static_cast<int>(sizeof buf)) return std::string(buf, static_cast<std::size_t>(n));
  std::string big(static_cast<std::size_t>(n) + 1, '\0');
  std::snprintf(big.data(), big.size(), fmt, args...);
  big.resize(static_cast<std::size_t>(n));
  return big;
}

/// Round-trippable decimal form used in every data artifact.
inline std::string exact(double x) { return format("%.17g", x); }

}  // namespace detail

struct TableRow {
  double weight = 0.0;
  double mse = 0.0;
  double median_sigma = 0.0;
};

inline std::vector<TableRow> table_rows(const std::vector<harness::EvalReport>& reports) {
  std::vector<TableRow> rows;
  rows.reserve(reports.size());
  for (const auto& r : reports) rows.push_back({r.weight, r.mse, r.median_sigma});
  return rows;
}

/// `weight,mse,median_sigma`, errors to four significant digits.
inline std::string emit_table(const std::vector<TableRow>& rows) {
  if (rows.empty()) throw InvalidArgument("cannot emit an empty report table");
  std::string out = "weight,mse,median_sigma\n";
  for (const auto& r : rows) {
    out += detail::format("%g", r.weight) + "," + detail::format("%.3e", r.mse) + "," +
           detail::format("%.3e", r.median_sigma) + "\n";
  }
  return out;
}

inline std::string emit_table(const std::vector<harness::EvalReport>& reports) {
  return emit_table(table_rows(reports));
}

inline std::vector<TableRow> parse_table(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "weight,mse,median_sigma") {
    throw InvalidArgument("report table has an unexpected header");
  }
  std::vector<TableRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    TableRow r;
    char tail = 0;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf%c", &r.weight, &r.mse, &r.median_sigma, &tail) != 3) {
      throw InvalidArgument("malformed report row: " + line);
    }
    rows.push_back(r);
  }
  return rows;
}

/// Long-format grid: one line per (eval weight, state).
inline std::string emit_value_grid(const Environment& env, const std::vector<harness::EvalReport>& reports,
                                   bool predicted) {
  std::string out = "weight,state,row,col,value\n";
  for (const auto& r : reports) {
    const auto& v = predicted ? r.predicted_v : r.actual_v;
    for (std::size_t s = 0; s < v.size(); ++s) {
      out += detail::format("%g", r.weight) + "," + std::to_string(s) + "," + std::to_string(env.cells[s].row) + "," +
             std::to_string(env.cells[s].col) + "," + detail::exact(v[s]) + "\n";
    }
  }
  return out;
}

inline std::string emit_policy_grid(const Environment& env, const std::vector<harness::EvalReport>& reports) {
  std::string out = "weight,state,row,col,actual_action,predicted_action\n";
  for (const auto& r : reports) {
    for (std::size_t s = 0; s < r.actual_policy.action.size(); ++s) {
      out += detail::format("%g", r.weight) + "," + std::to_string(s) + "," + std::to_string(env.cells[s].row) + "," +
             std::to_string(env.cells[s].col) + "," + std::to_string(r.actual_policy.action[s]) + "," +
             std::to_string(r.predicted_policy.action[s]) + "\n";
    }
  }
  return out;
}

inline std::string emit_episode_diffs(const std::vector<harness::EpisodeDiffReport>& episodes) {
  std::string out = "episode,start_state,index,fraction\n";
  for (const auto& e : episodes) {
    for (std::size_t i = 0; i < e.fractions.size(); ++i) {
      out += std::to_string(e.episode) + "," + std::to_string(e.start_state) + "," + std::to_string(i) + "," +
             detail::exact(e.fractions[i]) + "\n";
    }
  }
  return out;
}

inline std::string emit_episode_summary(const std::vector<harness::EpisodeDiffReport>& episodes) {
  std::string out = "episode,start_state,steps,excluded,q1,median,q3\n";
  for (const auto& e : episodes) {
    out += std::to_string(e.episode) + "," + std::to_string(e.start_state) + "," + std::to_string(e.steps) + "," +
           std::to_string(e.excluded) + "," + detail::format("%.3e", e.q1) + "," + detail::format("%.3e", e.median) +
           "," + detail::format("%.3e", e.q3) + "\n";
  }
  return out;
}

inline std::string weights_text(const WeightVector& w) {
  std::string s;
  for (double x : w.values()) s += (s.empty() ? "" : " ") + detail::format("%g", x);
  return s;
}

inline std::string emit_bound_checks(const harness::BoundCheckReport& report) {
  std::string out = "pair,w,w2,observed_v,bound_v,observed_q,bound_q,pass\n";
  for (std::size_t i = 0; i < report.pairs.size(); ++i) {
    const auto& p = report.pairs[i];
    out += std::to_string(i) + "," + weights_text(p.w) + "," + weights_text(p.w2) + "," +
           detail::format("%.6e", p.observed_v) + "," + detail::format("%.6e", p.bound_v) + "," +
           detail::format("%.6e", p.observed_q) + "," + detail::format("%.6e", p.bound_q) + "," +
           (p.pass ? "1" : "0") + "\n";
  }
  return out;
}

inline std::string emit_convexity_checks(const harness::BoundCheckReport& report) {
  std::string out = "triple,w,w2,max_violation,pass\n";
  for (std::size_t i = 0; i < report.convexity.size(); ++i) {
    const auto& c = report.convexity[i];
    out += std::to_string(i) + "," + weights_text(c.w) + "," + weights_text(c.w2) + "," +
           detail::format("%.6e", c.max_violation) + "," + (c.pass ? "1" : "0") + "\n";
  }
  return out;
}

/// Full per-state detail for one sweep. Wall-clock times are left out so the
/// document depends only on config and seed.
inline nlohmann::json sweep_json(const harness::SweepConfig& config, const harness::SweepResult& result) {
  nlohmann::json j;
  j["name"] = config.name;
  j["dataset"] = {{"rows", result.dataset.size()},
                  {"columns", result.dataset.column_names},
                  {"env_hash", detail::format("%016llx", static_cast<unsigned long long>(result.dataset.env_hash))},
                  {"solver_tol", result.dataset.solver_tol}};
  j["kernel"] = {{"family", "matern"},
                 {"nu", gp::nu_value(result.kernel.smoothness())},
                 {"length_scales", result.kernel.length_scales()},
                 {"noise_variance", config.gp.noise_variance},
                 {"jitter", result.jitter}};
  auto& reports = j["reports"] = nlohmann::json::array();
  for (const auto& r : result.reports) {
    reports.push_back({{"weight", r.weight},
                       {"weights", std::vector<double>(r.weights.values().begin(), r.weights.values().end())},
                       {"extrapolated", r.extrapolated},
                       {"mse", r.mse},
                       {"median_sigma", r.median_sigma},
                       {"actual_q", r.actual_q},
                       {"predicted_q", r.predicted_q},
                       {"predicted_std", r.predicted_std},
                       {"actual_v", r.actual_v},
                       {"predicted_v", r.predicted_v},
                       {"actual_policy", r.actual_policy.action},
                       {"predicted_policy", r.predicted_policy.action}});
  }
  return j;
}

/// Files staged in memory and committed together, each through a temporary
/// sibling and a rename, so a failing run leaves nothing behind.
class ArtifactSet {
 public:
  void add(std::string name, std::string content) { files_[std::move(name)] = std::move(content); }
  const std::map<std::string, std::string>& files() const noexcept { return files_; }

  void commit(const std::filesystem::path& dir) const {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error("cannot create output directory " + dir.string() + ": " + ec.message());
    for (const auto& [name, content] : files_) write_atomic(dir / name, content);
  }

  static void write_atomic(const std::filesystem::path& path, const std::string& content) {
    auto tmp = path;
    tmp += ".tmp";
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) throw Error("cannot write " + tmp.string());
      out << content;
      out.flush();
      if (!out) {
        std::error_code ignored;
        std::filesystem::remove(tmp, ignored);
        throw Error("short write to " + tmp.string());
      }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
      std::error_code ignored;
      std::filesystem::remove(tmp, ignored);
      throw Error("cannot move " + tmp.string() + " into place: " + ec.message());
    }
  }

 private:
  std::map<std::string, std::string> files_;
};

}  // namespace morl::cli
