#pragma once

#include <json.hpp>

#include <string>
#include <vector>

#include "morl/error.hpp"
#include "morl/gp/model.hpp"

namespace morl::gp {

/// JSON document with the raw training data, kernel, noise and the
/// standardization constants. The factorization is not stored; `model_from_json`
/// refits, which reproduces it exactly.
inline nlohmann::json to_json(const Model& model) {
  nlohmann::json j;
  const auto& x = model.inputs();
  std::vector<std::vector<double>> rows(static_cast<std::size_t>(x.rows()));
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    rows[static_cast<std::size_t>(i)].assign(x.data() + i * x.cols(), x.data() + (i + 1) * x.cols());
  }
  j["inputs"] = rows;
  j["targets"] = std::vector<double>(model.targets().data(), model.targets().data() + model.targets().size());
  j["kernel"] = {{"family", "matern"},
                 {"nu", nu_value(model.kernel().smoothness())},
                 {"length_scales", model.kernel().length_scales()}};
  j["noise_variance"] = model.noise_variance();
  const auto& st = model.standardization();
  j["standardization"] = {
      {"x_mean", std::vector<double>(st.x_mean.data(), st.x_mean.data() + st.x_mean.size())},
      {"x_scale", std::vector<double>(st.x_scale.data(), st.x_scale.data() + st.x_scale.size())},
      {"y_mean", st.y_mean},
      {"y_scale", st.y_scale}};
  return j;
}

inline Model model_from_json(const nlohmann::json& j) {
  try {
    const auto rows = j.at("inputs").get<std::vector<std::vector<double>>>();
    const auto targets = j.at("targets").get<std::vector<double>>();
    if (rows.empty()) throw InvalidArgument("GP document has no training inputs");
    InputMatrix x(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != rows.front().size()) throw InvalidArgument("GP document has ragged inputs");
      for (std::size_t c = 0; c < rows[i].size(); ++c) {
        x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = rows[i][c];
      }
    }
    const Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(targets.data(), static_cast<Eigen::Index>(targets.size()));
    const auto& k = j.at("kernel");
    const MaternKernel kernel(smoothness_from_nu(k.at("nu").get<double>()),
                              k.at("length_scales").get<std::vector<double>>());
    return fit(x, y, kernel, j.at("noise_variance").get<double>());
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("malformed GP document: ") + e.what());
  }
}

}  // namespace morl::gp
