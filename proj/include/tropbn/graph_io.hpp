#pragma once

#include <json.hpp>

#include <fstream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "tropbn/error.hpp"
#include "tropbn/metric_graph.hpp"
#include "tropbn/rational.hpp"

namespace tropbn {

using json = nlohmann::json;

namespace detail {

inline Rational length_from_json(const json& value, const std::string& edge_id) {
  if (value.is_string()) return parse_rational(value.get<std::string>());
  if (value.is_number_integer()) return Rational(value.get<std::int64_t>());
  throw Error(ErrorCode::Parse, "edge \"" + edge_id + "\": length must be a \"p/q\" string");
}

}  // namespace detail

/// Builds a graph from the JSON document
///   {"vertices":[...], "edges":[{"id":..,"ends":[a,b],"length":"p/q"}, ...]}.
/// Zero-length bridges are contracted on the spot; any other non-positive
/// length is rejected, as are valence-1 vertices.
inline MetricGraph graph_from_json(const json& doc) {
  if (!doc.is_object() || !doc.contains("vertices") || !doc.contains("edges") ||
      !doc["vertices"].is_array() || !doc["edges"].is_array()) {
    throw Error(ErrorCode::Parse, "graph document needs \"vertices\" and \"edges\" arrays");
  }
  std::vector<std::string> vertices;
  for (const auto& v : doc["vertices"]) {
    if (!v.is_string()) throw Error(ErrorCode::Parse, "vertex ids must be strings");
    vertices.push_back(v.get<std::string>());
  }
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    if (!index.emplace(vertices[i], i).second) {
      throw Error(ErrorCode::DuplicateId, "vertex id \"" + vertices[i] + "\" repeated");
    }
  }

  std::vector<EdgeSpec> specs;
  std::vector<Edge> raw;
  for (const auto& e : doc["edges"]) {
    if (!e.is_object() || !e.contains("id") || !e.contains("ends") || !e.contains("length") ||
        !e["ends"].is_array() || e["ends"].size() != 2) {
      throw Error(ErrorCode::Parse, "edge entries need \"id\", two \"ends\" and \"length\"");
    }
    EdgeSpec spec;
    spec.id = e["id"].get<std::string>();
    spec.tail = e["ends"][0].get<std::string>();
    spec.head = e["ends"][1].get<std::string>();
    spec.length = detail::length_from_json(e["length"], spec.id);
    if (spec.length < Rational(0)) {
      throw Error(ErrorCode::NonPositiveLength,
                  "edge \"" + spec.id + "\" has length " + to_string(spec.length));
    }
    auto tail = index.find(spec.tail);
    auto head = index.find(spec.head);
    if (tail == index.end() || head == index.end()) {
      throw Error(ErrorCode::DanglingEndpoint, "edge \"" + spec.id + "\" has an unknown endpoint");
    }
    raw.push_back(Edge{spec.id, tail->second, head->second, spec.length});
    specs.push_back(std::move(spec));
  }

  const bool has_zero = std::any_of(specs.begin(), specs.end(),
                                    [](const EdgeSpec& s) { return s.length == Rational(0); });
  if (has_zero) {
    const auto bridge = find_bridges(vertices.size(), raw);
    std::vector<std::size_t> parent(vertices.size());
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t v) {
      while (parent[v] != v) v = parent[v] = parent[parent[v]];
      return v;
    };
    for (std::size_t e = 0; e < raw.size(); ++e) {
      if (raw[e].length != Rational(0)) continue;
      if (!bridge[e]) {
        throw Error(ErrorCode::NonPositiveLength,
                    "edge \"" + raw[e].id + "\" has length 0 and is not a bridge");
      }
      auto a = find(raw[e].tail);
      auto b = find(raw[e].head);
      if (a > b) std::swap(a, b);
      parent[b] = a;
    }
    std::vector<std::string> kept;
    for (std::size_t v = 0; v < vertices.size(); ++v) {
      if (find(v) == v) kept.push_back(vertices[v]);
    }
    std::vector<EdgeSpec> contracted;
    for (std::size_t e = 0; e < raw.size(); ++e) {
      if (raw[e].length == Rational(0)) continue;
      contracted.push_back({raw[e].id, vertices[find(raw[e].tail)], vertices[find(raw[e].head)],
                            raw[e].length});
    }
    vertices = std::move(kept);
    specs = std::move(contracted);
  }

  MetricGraph g(std::move(vertices), specs);
  for (std::size_t v = 0; v < g.vertex_count(); ++v) {
    if (g.valence(v) == 1) {
      throw Error(ErrorCode::LeafVertex, "vertex \"" + g.vertex(v) + "\" has valence 1");
    }
  }
  return g;
}

inline MetricGraph parse_graph(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& err) {
    throw Error(ErrorCode::Parse, err.what());
  }
  try {
    return graph_from_json(doc);
  } catch (const json::exception& err) {
    throw Error(ErrorCode::Parse, err.what());
  }
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

inline json load_json(const std::string& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::parse_error& err) {
    throw Error(ErrorCode::Parse, path + ": " + err.what());
  }
}

inline MetricGraph load_graph(const std::string& path) { return parse_graph(read_file(path)); }

inline json to_json(const MetricGraph& g) {
  json doc;
  doc["vertices"] = g.vertices();
  doc["edges"] = json::array();
  for (const auto& e : g.edges()) {
    doc["edges"].push_back(
        {{"id", e.id}, {"ends", {g.vertex(e.tail), g.vertex(e.head)}}, {"length", to_string(e.length)}});
  }
  return doc;
}

inline std::string to_dot(const MetricGraph& g) {
  std::ostringstream out;
  out << "graph G {\n";
  for (const auto& v : g.vertices()) out << "  \"" << v << "\";\n";
  for (const auto& e : g.edges()) {
    out << "  \"" << g.vertex(e.tail) << "\" -- \"" << g.vertex(e.head) << "\" [label=\"" << e.id
        << ": " << to_string(e.length) << "\"];\n";
  }
  out << "}\n";
  return out.str();
}

}  // namespace tropbn
