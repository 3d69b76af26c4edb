#include "hml/hetgraph.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

namespace hml {

using nlohmann::json;

namespace {

std::string kind_name(EdgeTypeSpec::Kind k) {
  switch (k) {
    case EdgeTypeSpec::Kind::EventInfluence:
      return "event_influence";
    case EdgeTypeSpec::Kind::CategoricalMatch:
      return "categorical_match";
    default:
      return "similarity_threshold";
  }
}

EdgeTypeSpec::Kind parse_kind(const std::string& s) {
  if (s == "event_influence") return EdgeTypeSpec::Kind::EventInfluence;
  if (s == "categorical_match") return EdgeTypeSpec::Kind::CategoricalMatch;
  if (s == "similarity_threshold")
    return EdgeTypeSpec::Kind::SimilarityThreshold;
  throw Error("unknown edge-type kind: " + s);
}

json spec_to_json(const EdgeTypeSpec& s) {
  json j;
  j["name"] = s.name;
  j["kind"] = kind_name(s.kind);
  if (s.kind == EdgeTypeSpec::Kind::CategoricalMatch)
    j["attribute"] = s.attribute;
  if (s.kind == EdgeTypeSpec::Kind::SimilarityThreshold) {
    j["modality"] = s.modality;
    j["rho"] = s.rho;
    j["similarity"] = {
        {"order", s.similarity.order},
        {"map", s.similarity.map == SimilarityMap::InverseDistance
                    ? "inverse"
                    : "exp"}};
  }
  return j;
}

EdgeTypeSpec spec_from_json(const json& j) {
  EdgeTypeSpec s;
  s.name = j.at("name").get<std::string>();
  s.kind = parse_kind(j.at("kind").get<std::string>());
  if (s.kind == EdgeTypeSpec::Kind::CategoricalMatch)
    s.attribute = j.at("attribute").get<std::string>();
  if (s.kind == EdgeTypeSpec::Kind::SimilarityThreshold) {
    s.modality = j.at("modality").get<std::string>();
    s.rho = j.at("rho").get<double>();
    if (j.contains("similarity")) {
      const json& sim = j["similarity"];
      if (sim.contains("order")) s.similarity.order = sim["order"].get<double>();
      if (sim.contains("map"))
        s.similarity.map = sim["map"].get<std::string>() == "inverse"
                               ? SimilarityMap::InverseDistance
                               : SimilarityMap::ExpNegDistance;
    }
  }
  return s;
}

}  // namespace

std::string EdgeTypeSpec::to_json() const { return spec_to_json(*this).dump(); }

EdgeTypeSpec EdgeTypeSpec::parse_json(const std::string& text) {
  return spec_from_json(json::parse(text));
}

void check_edge_specs(const std::vector<EdgeTypeSpec>& specs) {
  require(!specs.empty(), "edge specs: need at least one edge type");
  int influence_count = 0;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const EdgeTypeSpec& s = specs[i];
    require(s.type_index == static_cast<int>(i) + 1,
            "edge specs: type_index must match position (1-based)");
    if (s.kind == EdgeTypeSpec::Kind::EventInfluence) {
      ++influence_count;
      require(s.type_index == 1,
              "edge specs: event_influence must have type_index 1");
    }
    if (s.kind == EdgeTypeSpec::Kind::SimilarityThreshold)
      require(s.rho >= 0.0 && s.rho <= 1.0,
              "edge specs: rho must be in [0, 1]");
  }
  require(influence_count == 1,
          "edge specs: exactly one event_influence type required");
}

std::vector<EdgeTypeSpec> load_edge_specs(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(in.good(), "cannot open edge spec file: " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error("edge spec file: malformed JSON: " + std::string(e.what()));
  }
  require(j.contains("edge_types") && j["edge_types"].is_array(),
          "edge spec file: expected {\"edge_types\": [...]}");
  std::vector<EdgeTypeSpec> specs;
  for (const auto& entry : j["edge_types"]) {
    EdgeTypeSpec s = spec_from_json(entry);
    s.type_index = static_cast<int>(specs.size()) + 1;
    specs.push_back(std::move(s));
  }
  check_edge_specs(specs);
  return specs;
}

void save_edge_specs(const std::vector<EdgeTypeSpec>& specs,
                     const std::filesystem::path& path) {
  json j;
  j["edge_types"] = json::array();
  for (const auto& s : specs) j["edge_types"].push_back(spec_to_json(s));
  std::ofstream out(path);
  require(out.good(), "cannot write edge spec file: " + path.string());
  out << j.dump(2) << "\n";
}

std::vector<EdgeTypeSpec> default_edge_specs() {
  std::vector<EdgeTypeSpec> specs;
  EdgeTypeSpec influence;
  influence.name = "event_influence";
  influence.kind = EdgeTypeSpec::Kind::EventInfluence;
  influence.type_index = 1;
  specs.push_back(influence);

  EdgeTypeSpec verified;
  verified.name = "author_verified";
  verified.kind = EdgeTypeSpec::Kind::CategoricalMatch;
  verified.attribute = "author_verified";
  verified.type_index = 2;
  specs.push_back(verified);

  EdgeTypeSpec publisher;
  publisher.name = "publisher";
  publisher.kind = EdgeTypeSpec::Kind::CategoricalMatch;
  publisher.attribute = "publisher";
  publisher.type_index = 3;
  specs.push_back(publisher);

  EdgeTypeSpec title;
  title.name = "title_similarity";
  title.kind = EdgeTypeSpec::Kind::SimilarityThreshold;
  title.modality = "title";
  title.rho = 0.85;
  title.type_index = 4;
  specs.push_back(title);
  return specs;
}

std::vector<double> build_similarity_layer(const Corpus& corpus,
                                           const std::string& modality,
                                           double rho,
                                           const SimilarityConfig& simcfg) {
  require(corpus.has_modality(modality), "unknown modality: " + modality);
  require(rho >= 0.0 && rho <= 1.0, "rho must be in [0, 1]");
  const std::size_t n = corpus.size();
  std::vector<double> layer(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& xi = corpus.items()[i].features.at(modality);
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto& xj = corpus.items()[j].features.at(modality);
      if (similarity(xi, xj, simcfg) >= rho) {
        layer[i * n + j] = 1.0;
        layer[j * n + i] = 1.0;
      }
    }
  }
  return layer;
}

std::vector<double> build_categorical_layer(const Corpus& corpus,
                                            const std::string& attribute) {
  const std::size_t n = corpus.size();
  std::vector<double> layer(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    auto ai = corpus.items()[i].attributes.find(attribute);
    if (ai == corpus.items()[i].attributes.end()) continue;
    for (std::size_t j = i + 1; j < n; ++j) {
      auto aj = corpus.items()[j].attributes.find(attribute);
      if (aj == corpus.items()[j].attributes.end()) continue;
      if (ai->second == aj->second) {
        layer[i * n + j] = 1.0;
        layer[j * n + i] = 1.0;
      }
    }
  }
  return layer;
}

HetGraph assemble(const Corpus& corpus, const std::vector<EdgeTypeSpec>& specs,
                  const std::vector<EventAdjacency>& event_adjacencies) {
  check_edge_specs(specs);
  const std::size_t n = corpus.size();

  std::map<std::string, const EventAdjacency*> by_event;
  for (const auto& adj : event_adjacencies) by_event[adj.event_id] = &adj;
  for (const Event& ev : corpus.events())
    require(by_event.count(ev.id) > 0,
            "missing event adjacency for event " + ev.id);

  HetGraph graph;
  graph.n = n;
  for (const NewsItem& item : corpus.items()) graph.node_ids.push_back(item.id);

  for (const EdgeTypeSpec& spec : specs) {
    graph.layer_names.push_back(spec.name);
    switch (spec.kind) {
      case EdgeTypeSpec::Kind::EventInfluence: {
        std::vector<double> layer(n * n, 0.0);
        for (const Event& ev : corpus.events()) {
          const EventAdjacency& adj = *by_event.at(ev.id);
          require(adj.member_ids == ev.member_ids,
                  "event adjacency members disagree with event " + ev.id);
          const std::size_t r = adj.size;
          std::vector<std::size_t> global(r);
          for (std::size_t i = 0; i < r; ++i)
            global[i] = corpus.index_of(adj.member_ids[i]);
          for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = i + 1; j < r; ++j) {
              double w = std::max(adj.at(i, j), adj.at(j, i));
              layer[global[i] * n + global[j]] = w;
              layer[global[j] * n + global[i]] = w;
            }
        }
        graph.layers.push_back(std::move(layer));
        break;
      }
      case EdgeTypeSpec::Kind::CategoricalMatch:
        graph.layers.push_back(
            build_categorical_layer(corpus, spec.attribute));
        break;
      case EdgeTypeSpec::Kind::SimilarityThreshold:
        graph.layers.push_back(build_similarity_layer(
            corpus, spec.modality, spec.rho, spec.similarity));
        break;
    }
  }
  return graph;
}

namespace {

std::string format_weight(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

void export_graph(const HetGraph& graph, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), "cannot write graph file: " + path.string());
  json header;
  header["n"] = graph.n;
  header["node_ids"] = graph.node_ids;
  header["layers"] = graph.layer_names;
  out << header.dump() << "\n";
  for (std::size_t l = 0; l < graph.layers.size(); ++l) {
    out << "#layer\t" << graph.layer_names[l] << "\n";
    const auto& layer = graph.layers[l];
    if (l == 0) {
      // Weighted layer: all nonzero entries.
      for (std::size_t i = 0; i < graph.n; ++i)
        for (std::size_t j = 0; j < graph.n; ++j)
          if (layer[i * graph.n + j] != 0.0)
            out << i << "\t" << j << "\t"
                << format_weight(layer[i * graph.n + j]) << "\n";
    } else {
      // Binary layer: upper triangle.
      for (std::size_t i = 0; i < graph.n; ++i)
        for (std::size_t j = i + 1; j < graph.n; ++j)
          if (layer[i * graph.n + j] != 0.0)
            out << i << "\t" << j << "\t1\n";
    }
  }
  require(out.good(), "write failed: " + path.string());
}

HetGraph import_graph(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), "cannot open graph file: " + path.string());
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), "graph file: empty");
  json header;
  try {
    header = json::parse(line);
  } catch (const json::exception& e) {
    throw Error("graph file: malformed header: " + std::string(e.what()));
  }

  HetGraph graph;
  graph.n = header.at("n").get<std::size_t>();
  graph.node_ids = header.at("node_ids").get<std::vector<std::string>>();
  graph.layer_names = header.at("layers").get<std::vector<std::string>>();
  require(graph.node_ids.size() == graph.n, "graph file: node count mismatch");
  graph.layers.assign(graph.layer_names.size(),
                      std::vector<double>(graph.n * graph.n, 0.0));

  int layer = -1;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line.rfind("#layer\t", 0) == 0) {
      ++layer;
      require(layer < static_cast<int>(graph.layers.size()),
              "graph file: more layer sections than declared");
      require(line.substr(7) == graph.layer_names[layer],
              "graph file: layer section order disagrees with header");
      continue;
    }
    require(layer >= 0, "graph file: entry before any layer section");
    std::istringstream ss(line);
    std::size_t i, j;
    std::string w;
    ss >> i >> j >> w;
    require(!ss.fail() && i < graph.n && j < graph.n,
            "graph file: bad entry at line " + std::to_string(line_no));
    double value = 0.0;
    auto res = std::from_chars(w.data(), w.data() + w.size(), value);
    require(res.ec == std::errc(), "graph file: bad weight at line " +
                                       std::to_string(line_no));
    graph.layers[layer][i * graph.n + j] = value;
    if (layer > 0) graph.layers[layer][j * graph.n + i] = value;
  }
  require(layer + 1 == static_cast<int>(graph.layers.size()),
          "graph file: missing layer sections");
  return graph;
}

}  // namespace hml
