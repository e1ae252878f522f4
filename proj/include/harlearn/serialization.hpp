#pragma once

#include <filesystem>
#include <fstream>
#include <string>

#include "json.hpp"

#include "harlearn/classifiers.hpp"
#include "harlearn/ensemble.hpp"

namespace harlearn {

/// Versioned JSON model container. Doubles round-trip exactly (shortest
/// representation), so a reloaded model reproduces posteriors bit for bit.
inline constexpr int kModelFormatVersion = 1;

namespace serial_detail {

inline nlohmann::json class_list_to_json(const std::vector<ActivityClass>& classes) {
  nlohmann::json arr = nlohmann::json::array();
  for (ActivityClass c : classes) arr.push_back(std::string(to_string(c)));
  return arr;
}

inline std::vector<ActivityClass> class_list_from_json(const nlohmann::json& arr) {
  std::vector<ActivityClass> out;
  for (const auto& item : arr) {
    auto c = activity_from_string(item.get<std::string>());
    if (!c) throw Error("unknown class in model file: " + item.get<std::string>());
    out.push_back(*c);
  }
  return out;
}

inline nlohmann::json sym_to_json(const SymMatrix& m) {
  nlohmann::json arr = nlohmann::json::array();
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m.size(); ++j) arr.push_back(m.at(i, j));
  return arr;
}

inline SymMatrix sym_from_json(const nlohmann::json& arr, std::size_t n) {
  SymMatrix m(n);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m.at(i, j) = arr.at(k++).get<double>();
  return m;
}

}  // namespace serial_detail

inline nlohmann::json to_json(const GaussianDiscriminantModel& m) {
  nlohmann::json j;
  j["type"] = "gaussian";
  j["kind"] = std::string(to_string(m.kind()));
  j["class_list"] = serial_detail::class_list_to_json(m.class_list());
  j["dim"] = m.dim();
  j["shrinkage"] = m.shrinkage();
  j["priors"] = m.priors();
  nlohmann::json means = nlohmann::json::array();
  for (const auto& mu : m.means()) means.push_back(mu);
  j["means"] = means;
  nlohmann::json covs = nlohmann::json::array();
  for (const auto& cov : m.covariances()) {
    nlohmann::json c;
    c["n"] = cov.size();
    c["values"] = serial_detail::sym_to_json(cov);
    covs.push_back(c);
  }
  j["covariances"] = covs;
  return j;
}

inline GaussianDiscriminantModel gaussian_from_json(const nlohmann::json& j) {
  GaussianDiscriminantModel m;
  const auto kind = base_kind_from_string(j.at("kind").get<std::string>());
  if (!kind || *kind == BaseKind::cart) throw Error("bad gaussian model kind");
  std::vector<std::vector<double>> means;
  for (const auto& mu : j.at("means")) means.push_back(mu.get<std::vector<double>>());
  std::vector<SymMatrix> covs;
  for (const auto& c : j.at("covariances"))
    covs.push_back(serial_detail::sym_from_json(c.at("values"), c.at("n").get<std::size_t>()));
  m.set_state(*kind, serial_detail::class_list_from_json(j.at("class_list")),
              j.at("dim").get<std::size_t>(), j.at("shrinkage").get<double>(),
              j.at("priors").get<std::vector<double>>(), std::move(means),
              std::move(covs));
  return m;
}

inline nlohmann::json to_json(const DecisionTreeModel& m) {
  nlohmann::json j;
  j["type"] = "cart";
  j["class_list"] = serial_detail::class_list_to_json(m.class_list());
  j["dim"] = m.dim();
  j["max_depth"] = m.params().max_depth;
  j["min_leaf_size"] = m.params().min_leaf_size;
  j["leaf_smoothing"] = m.params().leaf_smoothing;
  nlohmann::json nodes = nlohmann::json::array();
  for (const auto& n : m.nodes())
    nodes.push_back({n.feature, n.threshold, n.left, n.right, n.leaf});
  j["nodes"] = nodes;
  j["leaf_counts"] = m.leaf_counts();
  return j;
}

inline DecisionTreeModel tree_from_json(const nlohmann::json& j) {
  DecisionTreeModel m;
  TreeParams params;
  params.max_depth = j.at("max_depth").get<int>();
  params.min_leaf_size = j.at("min_leaf_size").get<int>();
  params.leaf_smoothing = j.at("leaf_smoothing").get<double>();
  std::vector<DecisionTreeModel::Node> nodes;
  for (const auto& n : j.at("nodes")) {
    DecisionTreeModel::Node node;
    node.feature = n.at(0).get<int>();
    node.threshold = n.at(1).get<double>();
    node.left = n.at(2).get<int>();
    node.right = n.at(3).get<int>();
    node.leaf = n.at(4).get<int>();
    nodes.push_back(node);
  }
  m.set_state(serial_detail::class_list_from_json(j.at("class_list")),
              j.at("dim").get<std::size_t>(), params, std::move(nodes),
              j.at("leaf_counts").get<std::vector<std::vector<std::uint32_t>>>());
  return m;
}

inline nlohmann::json to_json(const BaseModel& m) {
  if (const auto* g = m.gaussian()) return to_json(*g);
  return to_json(*m.tree());
}

inline BaseModel base_model_from_json(const nlohmann::json& j) {
  if (j.at("type").get<std::string>() == "gaussian")
    return BaseModel(gaussian_from_json(j));
  return BaseModel(tree_from_json(j));
}

inline nlohmann::json to_json(const EnsembleModel& e) {
  nlohmann::json j;
  j["format_version"] = kModelFormatVersion;
  j["class_list"] = serial_detail::class_list_to_json(e.class_list());
  j["feature_dim"] = e.feature_dim();
  j["models_per_chunk"] = e.models_per_chunk();
  nlohmann::json models = nlohmann::json::array();
  for (const auto& entry : e.models()) {
    nlohmann::json m;
    m["selected_features"] = entry.selected;
    m["model"] = to_json(entry.model);
    models.push_back(m);
  }
  j["models"] = models;
  return j;
}

inline EnsembleModel ensemble_from_json(const nlohmann::json& j) {
  if (j.at("format_version").get<int>() != kModelFormatVersion)
    throw Error("unsupported ensemble format version");
  EnsembleModel e(serial_detail::class_list_from_json(j.at("class_list")),
                  j.at("feature_dim").get<std::size_t>(),
                  j.at("models_per_chunk").get<std::size_t>());
  for (const auto& m : j.at("models")) {
    e.append(base_model_from_json(m.at("model")),
             m.at("selected_features").get<std::vector<std::size_t>>(), {});
  }
  return e;
}

inline std::string serialize_ensemble(const EnsembleModel& e) {
  return to_json(e).dump(2);
}

inline EnsembleModel deserialize_ensemble(const std::string& text) {
  return ensemble_from_json(nlohmann::json::parse(text));
}

inline void save_ensemble(const EnsembleModel& e, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write model file " + path.string());
  out << serialize_ensemble(e) << '\n';
}

inline EnsembleModel load_ensemble(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read model file " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return deserialize_ensemble(text);
}

}  // namespace harlearn
