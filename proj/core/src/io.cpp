#include "mgmax/io.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "mgmax/error.hpp"

namespace mgmax {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

json parse(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
}

const json& require(const json& obj, const char* key) {
  if (!obj.is_object() || !obj.contains(key)) throw ParseError(std::string("missing field '") + key + "'");
  return obj.at(key);
}

double as_number(const json& v, const std::string& what) {
  if (!v.is_number()) throw ParseError(what + " must be a number");
  return v.get<double>();
}

std::map<std::string, double> leaf_map(const json& obj, const char* key) {
  const json& m = require(obj, key);
  if (!m.is_object()) throw ParseError(std::string("'") + key + "' must be an object");
  std::map<std::string, double> out;
  for (const auto& [k, v] : m.items()) out[k] = as_number(v, std::string(key) + "['" + k + "']");
  return out;
}

ModelSpec spec_from_json(const json& doc, bool need_mu) {
  if (!doc.is_object()) throw ParseError("instance must be a JSON object");
  const json& nodes = require(doc, "nodes");
  if (!nodes.is_array()) throw ParseError("'nodes' must be an array");
  ModelSpec spec;
  for (const json& n : nodes) {
    if (!n.is_object()) throw ParseError("node entries must be objects");
    NodeSpec ns;
    const json& id = require(n, "id");
    if (!id.is_string()) throw ParseError("node id must be a string");
    ns.id = id.get<std::string>();
    if (n.contains("parent") && !n.at("parent").is_null()) {
      if (!n.at("parent").is_string()) throw ParseError("parent must be a string or null");
      ns.parent = n.at("parent").get<std::string>();
    }
    if (n.contains("children")) {
      if (!n.at("children").is_array()) throw ParseError("children must be an array");
      for (const json& c : n.at("children")) {
        if (!c.is_string()) throw ParseError("child ids must be strings");
        ns.children.push_back(c.get<std::string>());
      }
    }
    spec.nodes.push_back(std::move(ns));
  }
  if (need_mu) spec.mu = leaf_map(doc, "mu");
  spec.nu = leaf_map(doc, "nu");
  return spec;
}

ordered_json leaf_json(const DyadicModel& model, std::span<const double> values) {
  ordered_json out = ordered_json::object();
  const auto leaves = model.leaves();
  for (std::size_t k = 0; k < leaves.size(); ++k) out[model.id(leaves[k])] = values[k];
  return out;
}

ordered_json model_json(const DyadicModel& model) {
  ordered_json nodes = ordered_json::array();
  for (NodeIndex v = 0; v < model.node_count(); ++v) {
    ordered_json n;
    n["id"] = model.id(v);
    n["parent"] = model.parent(v) == kNoNode ? ordered_json(nullptr) : ordered_json(model.id(model.parent(v)));
    ordered_json ch = ordered_json::array();
    for (NodeIndex c : model.children(v)) ch.push_back(model.id(c));
    n["children"] = std::move(ch);
    nodes.push_back(std::move(n));
  }
  ordered_json doc;
  doc["nodes"] = std::move(nodes);
  doc["mu"] = leaf_json(model, model.leaf_masses(Measure::mu));
  doc["nu"] = leaf_json(model, model.leaf_masses(Measure::nu));
  return doc;
}

LeafValues leaf_vector(const DyadicModel& model, const std::map<std::string, double>& m, const char* key) {
  LeafValues out(model.leaf_count());
  for (const auto& [id, v] : m) {
    auto idx = model.find(id);
    if (!idx || !model.is_leaf(*idx)) throw ParseError(std::string(key) + " entry '" + id + "' is not a leaf");
    out[model.leaf_position(*idx)] = v;
  }
  if (m.size() != model.leaf_count()) throw ParseError(std::string(key) + " must list every leaf");
  return out;
}

}  // namespace

DyadicModel read_model(std::string_view text, BuildOptions options) {
  return DyadicModel::build(spec_from_json(parse(text), true), options);
}

std::string write_model(const DyadicModel& model) { return model_json(model).dump(2) + "\n"; }

CoefficientFamily read_coefficients(std::string_view text, const DyadicModel& model) {
  const json doc = parse(text);
  if (!doc.is_object()) throw ParseError("coefficient file must be a JSON object");
  CoefficientFamily a(model.node_count());
  for (const auto& [id, v] : doc.items()) {
    auto node = model.find(id);
    if (!node) throw ParseError("coefficient for unknown node '" + id + "'");
    if (v.is_number()) {
      a.set(*node, v.get<double>());
    } else if (v.is_object()) {
      const auto range = model.leaf_range(*node);
      std::vector<double> vals(range.size(), 0.0);
      std::vector<bool> seen(range.size(), false);
      for (const auto& [leaf, x] : v.items()) {
        auto li = model.find(leaf);
        if (!li || !model.is_leaf(*li) || !model.contains(*node, *li)) {
          throw ParseError("coefficient of '" + id + "' names '" + leaf + "', not a leaf under it");
        }
        const auto k = model.leaf_position(*li) - range.begin;
        vals[k] = as_number(x, "coefficient value");
        seen[k] = true;
      }
      if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
        throw ParseError("coefficient of '" + id + "' must list every leaf under it");
      }
      a.set(*node, std::move(vals));
    } else {
      throw ParseError("coefficient of '" + id + "' must be a number or an object");
    }
  }
  a.validate(model);  // missing node -> InvalidInput
  return a;
}

std::string write_coefficients(const CoefficientFamily& a, const DyadicModel& model) {
  a.validate(model);
  ordered_json doc = ordered_json::object();
  for (NodeIndex v = 0; v < model.node_count(); ++v) {
    const auto& c = *a.at(v);
    if (const double* s = std::get_if<double>(&c)) {
      doc[model.id(v)] = *s;
    } else {
      const auto& vals = std::get<std::vector<double>>(c);
      const auto range = model.leaf_range(v);
      ordered_json m = ordered_json::object();
      for (std::size_t k = 0; k < vals.size(); ++k) m[model.id(model.leaves()[range.begin + k])] = vals[k];
      doc[model.id(v)] = std::move(m);
    }
  }
  return doc.dump(2) + "\n";
}

SawyerInstance read_sawyer(std::string_view text, double p, BuildOptions options) {
  const json doc = parse(text);
  ModelSpec spec = spec_from_json(doc, false);
  spec.mu = leaf_map(doc, "omega");  // placeholder; the model's mu is unused
  SawyerInstance inst{DyadicModel::build(spec, options), {}, {}, 1.0, p};
  inst.omega = leaf_vector(inst.model, leaf_map(doc, "omega"), "omega");
  inst.w = leaf_vector(inst.model, leaf_map(doc, "w"), "w");
  inst.alpha = as_number(require(doc, "alpha"), "alpha");
  return inst;
}

std::string write_sawyer(const SawyerInstance& inst) {
  ordered_json doc = model_json(inst.model);
  doc.erase("mu");
  doc["omega"] = leaf_json(inst.model, inst.omega);
  doc["w"] = leaf_json(inst.model, inst.w);
  doc["alpha"] = inst.alpha;
  return doc.dump(2) + "\n";
}

std::string write_decomposition(const StoppingDecomposition& d, const DyadicModel& model) {
  ordered_json doc;
  doc["r"] = d.r;
  doc["start_depth"] = d.start_depth;
  ordered_json gens = ordered_json::array();
  for (const auto& g : d.generations) {
    ordered_json ids = ordered_json::array();
    for (NodeIndex v : g) ids.push_back(model.id(v));
    gens.push_back(std::move(ids));
  }
  doc["generations"] = std::move(gens);
  ordered_json blocks = ordered_json::array();
  for (std::size_t i = 0; i < d.cubes.size(); ++i) {
    ordered_json members = ordered_json::array();
    for (NodeIndex v : d.blocks[i]) members.push_back(model.id(v));
    blocks.push_back({{"owner", model.id(d.cubes[i])}, {"members", std::move(members)}});
  }
  doc["blocks"] = std::move(blocks);
  return doc.dump(2) + "\n";
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << contents;
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

}  // namespace mgmax
