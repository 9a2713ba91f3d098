#include "anchorlink/checkpoint.hpp"

#include <fstream>

#include <json.hpp>

#include "anchorlink/error.hpp"

namespace anchorlink {

namespace {

using nlohmann::json;

json matrix_to_json(const Mat& m) {
  json j;
  j["rows"] = m.rows();
  j["cols"] = m.cols();
  std::vector<double> data(m.data(), m.data() + m.size());  // column-major
  j["data"] = std::move(data);
  return j;
}

Mat matrix_from_json(const json& j) {
  Mat m(j.at("rows").get<Eigen::Index>(), j.at("cols").get<Eigen::Index>());
  const auto data = j.at("data").get<std::vector<double>>();
  if (static_cast<Eigen::Index>(data.size()) != m.size()) {
    throw DataError("checkpoint matrix payload does not match its shape header");
  }
  std::copy(data.begin(), data.end(), m.data());
  return m;
}

json vector_to_json(const Vec& v) {
  return json(std::vector<double>(v.data(), v.data() + v.size()));
}

Vec vector_from_json(const json& j) {
  const auto data = j.get<std::vector<double>>();
  Vec v(static_cast<Eigen::Index>(data.size()));
  std::copy(data.begin(), data.end(), v.data());
  return v;
}

}  // namespace

std::string theta_kind_name(ThetaKind kind) {
  switch (kind) {
    case ThetaKind::CosineScalar:
      return "cosine";
    case ThetaKind::Hadamard:
      return "hadamard";
    case ThetaKind::Concat:
      return "concat";
  }
  throw UsageError("unknown theta kind");
}

ThetaKind theta_kind_from_name(const std::string& name) {
  if (name == "cosine") return ThetaKind::CosineScalar;
  if (name == "hadamard") return ThetaKind::Hadamard;
  if (name == "concat") return ThetaKind::Concat;
  throw UsageError("unknown theta kind '" + name +
                   "' (expected cosine, hadamard or concat)");
}

std::string strategy_name(SamplingStrategy strategy) {
  return strategy == SamplingStrategy::Random ? "random" : "feature";
}

SamplingStrategy strategy_from_name(const std::string& name) {
  if (name == "random") return SamplingStrategy::Random;
  if (name == "feature") return SamplingStrategy::FeatureImportance;
  throw UsageError("unknown sampling strategy '" + name +
                   "' (expected random or feature)");
}

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
  json j;
  j["format"] = "anchorlink-checkpoint";
  j["version"] = 1;
  j["theta"] = theta_kind_name(ckpt.theta_kind);
  j["use_bias"] = ckpt.params.use_bias;
  j["loss_history"] = ckpt.loss_history;

  json weights = json::array();
  json biases = json::array();
  for (const auto& w : ckpt.params.layer_weights) weights.push_back(matrix_to_json(w));
  for (const auto& b : ckpt.params.layer_bias) biases.push_back(vector_to_json(b));
  j["layer_weights"] = std::move(weights);
  j["layer_bias"] = std::move(biases);
  j["head_weights"] = vector_to_json(ckpt.params.head_weights);
  j["head_bias"] = ckpt.params.head_bias;

  if (ckpt.adam) {
    json a;
    a["step"] = ckpt.adam->step;
    json mw = json::array(), vw = json::array(), mb = json::array(), vb = json::array();
    for (const auto& m : ckpt.adam->m_weights) mw.push_back(matrix_to_json(m));
    for (const auto& v : ckpt.adam->v_weights) vw.push_back(matrix_to_json(v));
    for (const auto& m : ckpt.adam->m_bias) mb.push_back(vector_to_json(m));
    for (const auto& v : ckpt.adam->v_bias) vb.push_back(vector_to_json(v));
    a["m_weights"] = std::move(mw);
    a["v_weights"] = std::move(vw);
    a["m_bias"] = std::move(mb);
    a["v_bias"] = std::move(vb);
    a["m_head"] = vector_to_json(ckpt.adam->m_head);
    a["v_head"] = vector_to_json(ckpt.adam->v_head);
    a["m_head_bias"] = ckpt.adam->m_head_bias;
    a["v_head_bias"] = ckpt.adam->v_head_bias;
    j["adam"] = std::move(a);
  }

  std::ofstream out(path);
  if (!out) throw DataError("cannot write checkpoint " + path);
  out << j.dump(2) << '\n';
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open checkpoint " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw DataError("malformed checkpoint " + path + ": " + e.what());
  }
  if (j.value("format", "") != "anchorlink-checkpoint") {
    throw DataError(path + " is not an anchorlink checkpoint");
  }
  if (j.value("version", 0) != 1) {
    throw DataError("unsupported checkpoint version in " + path);
  }

  Checkpoint ckpt;
  ckpt.theta_kind = theta_kind_from_name(j.at("theta").get<std::string>());
  ckpt.params.use_bias = j.at("use_bias").get<bool>();
  ckpt.loss_history = j.value("loss_history", std::vector<double>{});
  for (const auto& w : j.at("layer_weights")) {
    ckpt.params.layer_weights.push_back(matrix_from_json(w));
  }
  for (const auto& b : j.at("layer_bias")) {
    ckpt.params.layer_bias.push_back(vector_from_json(b));
  }
  ckpt.params.head_weights = vector_from_json(j.at("head_weights"));
  ckpt.params.head_bias = j.at("head_bias").get<double>();

  if (j.contains("adam")) {
    const auto& a = j.at("adam");
    AdamState state;
    state.step = a.at("step").get<long>();
    for (const auto& m : a.at("m_weights")) state.m_weights.push_back(matrix_from_json(m));
    for (const auto& v : a.at("v_weights")) state.v_weights.push_back(matrix_from_json(v));
    for (const auto& m : a.at("m_bias")) state.m_bias.push_back(vector_from_json(m));
    for (const auto& v : a.at("v_bias")) state.v_bias.push_back(vector_from_json(v));
    state.m_head = vector_from_json(a.at("m_head"));
    state.v_head = vector_from_json(a.at("v_head"));
    state.m_head_bias = a.at("m_head_bias").get<double>();
    state.v_head_bias = a.at("v_head_bias").get<double>();
    ckpt.adam = std::move(state);
  }
  return ckpt;
}

}  // namespace anchorlink
