#include "wvsim/diagram.hpp"

#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "wvsim/errors.hpp"

namespace wvsim {

namespace {

constexpr double kPsdTol = 1e-9;

bool psd_with_trace(const Operator& m, double* trace_out) {
  if (!is_hermitian(m)) return false;
  if (!is_psd(m, kPsdTol)) return false;
  if (trace_out) *trace_out = m.trace().real();
  return true;
}

}  // namespace

Diagram::Diagram(std::array<Operator, 4> nodes_in, Complex scale_in)
    : nodes(std::move(nodes_in)), scale(scale_in) {
  const std::size_t d = nodes[0].dim();
  for (const Operator& n : nodes)
    if (n.dim() != d) throw std::invalid_argument("diagram nodes must share one dimension");
}

Complex evaluate(const Diagram& d) {
  const Operator prod = d.nodes[0] * d.nodes[1] * d.nodes[2] * d.nodes[3];
  return d.scale * prod.trace();
}

Diagram rotate(const Diagram& d, int k) {
  const int shift = ((k % 4) + 4) % 4;
  std::array<Operator, 4> nodes{d.nodes[0], d.nodes[1], d.nodes[2], d.nodes[3]};
  for (std::size_t i = 0; i < 4; ++i) nodes[(i + shift) % 4] = d.nodes[i];
  return Diagram(std::move(nodes), d.scale);
}

std::vector<SplitTerm> spectral_split(const Diagram& d, std::size_t idx) {
  if (idx >= 4) throw std::invalid_argument("spectral_split node index out of range");
  if (!is_hermitian(d.nodes[idx]))
    throw std::invalid_argument("spectral_split requires a Hermitian node");

  const EigenSystem es = herm_eig(d.nodes[idx]);
  std::vector<SplitTerm> terms;
  terms.reserve(es.values.size());
  for (std::size_t j = 0; j < es.values.size(); ++j) {
    const Ket v = es.vectors.column(j);
    std::array<Operator, 4> nodes = d.nodes;
    nodes[idx] = outer(v, v);
    terms.push_back({es.values[j], Diagram(std::move(nodes), d.scale)});
  }
  return terms;
}

FrameworkInstance compile(const Diagram& d) {
  double state_trace = 0.0;
  if (!psd_with_trace(d.nodes[0], &state_trace))
    throw PhysicalityError("diagram not compilable: state slot (node 0) is not PSD");
  if (state_trace <= 1e-12)
    throw PhysicalityError("diagram not compilable: state slot (node 0) has vanishing trace");
  if (!psd_with_trace(d.nodes[2], nullptr))
    throw PhysicalityError("diagram not compilable: effect slot (node 2) is not PSD");

  Complex scale = d.scale * state_trace;
  const Operator initial = (1.0 / state_trace) * d.nodes[0];

  Operator effect = d.nodes[2];
  const double effect_norm = spectral_norm(effect);
  if (effect_norm > 1.0) {
    effect = (1.0 / effect_norm) * effect;
    scale *= effect_norm;
  }

  Operator t0 = dagger(d.nodes[1]);
  const double t0_norm = spectral_norm(t0);
  if (t0_norm > 1.0) {
    t0 = (1.0 / t0_norm) * t0;
    scale *= t0_norm;
  }

  Operator t1 = d.nodes[3];
  const double t1_norm = spectral_norm(t1);
  if (t1_norm > 1.0) {
    t1 = (1.0 / t1_norm) * t1;
    scale *= t1_norm;
  }

  return FrameworkInstance{ControlledTransform(std::move(t0), std::move(t1)),
                           Boundary(std::move(initial), std::move(effect)), scale};
}

namespace {

nlohmann::json node_to_json(const Operator& m) {
  nlohmann::json entries = nlohmann::json::array();
  for (const Complex& e : m.entries()) entries.push_back({e.real(), e.imag()});
  return entries;
}

Operator node_from_json(const nlohmann::json& entries) {
  if (!entries.is_array()) throw std::invalid_argument("diagram node must be an array");
  const std::size_t count = entries.size();
  const auto dim = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(count))));
  if (dim * dim != count) throw std::invalid_argument("diagram node length must be a square");
  std::vector<Complex> data;
  data.reserve(count);
  for (const auto& pair : entries) {
    if (!pair.is_array() || pair.size() != 2)
      throw std::invalid_argument("diagram node entry must be [re, im]");
    data.emplace_back(pair[0].get<double>(), pair[1].get<double>());
  }
  return Operator(dim, std::move(data));
}

}  // namespace

std::string serialize_diagram(const Diagram& d) {
  nlohmann::json j;
  j["nodes"] = nlohmann::json::array();
  for (const Operator& n : d.nodes) j["nodes"].push_back(node_to_json(n));
  j["scale"] = {d.scale.real(), d.scale.imag()};
  return j.dump(2);
}

Diagram parse_diagram(const std::string& json_text) {
  nlohmann::json j = nlohmann::json::parse(json_text);
  if (!j.contains("nodes") || !j["nodes"].is_array() || j["nodes"].size() != 4)
    throw std::invalid_argument("diagram JSON must carry exactly 4 nodes");
  std::array<Operator, 4> nodes{Operator(1), Operator(1), Operator(1), Operator(1)};
  for (std::size_t i = 0; i < 4; ++i) nodes[i] = node_from_json(j["nodes"][i]);
  Complex scale{1.0, 0.0};
  if (j.contains("scale")) {
    if (!j["scale"].is_array() || j["scale"].size() != 2)
      throw std::invalid_argument("diagram scale must be [re, im]");
    scale = Complex{j["scale"][0].get<double>(), j["scale"][1].get<double>()};
  }
  return Diagram(std::move(nodes), scale);
}

}  // namespace wvsim
