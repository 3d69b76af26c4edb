#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "hml/corpus.hpp"
#include "hml/forgetting.hpp"
#include "hml/pointproc.hpp"

namespace hml {

/// One typed edge layer of the news graph. Type index 1 is always the
/// event-influence layer; the others are binary relations derived from
/// shared categorical attributes or thresholded feature similarity.
struct EdgeTypeSpec {
  enum class Kind { EventInfluence, CategoricalMatch, SimilarityThreshold };

  std::string name;
  Kind kind = Kind::EventInfluence;
  std::string attribute;  // CategoricalMatch
  std::string modality;   // SimilarityThreshold
  double rho = 0.0;       // SimilarityThreshold, in [0, 1]
  SimilarityConfig similarity;
  int type_index = 1;  // position in the edge-type set, 1-based

  std::string to_json() const;
  static EdgeTypeSpec parse_json(const std::string& text);
};

void check_edge_specs(const std::vector<EdgeTypeSpec>& specs);

std::vector<EdgeTypeSpec> load_edge_specs(const std::filesystem::path& path);
void save_edge_specs(const std::vector<EdgeTypeSpec>& specs,
                     const std::filesystem::path& path);

/// Edge-type set used when no spec manifest is given.
std::vector<EdgeTypeSpec> default_edge_specs();

/// Multi-layer adjacency over a fixed node ordering (lexicographic by
/// news id). Layer 0 holds the event-influence weights in [0, 1], all
/// following layers are symmetric binary matrices with zero diagonal.
struct HetGraph {
  std::size_t n = 0;
  std::vector<std::string> node_ids;
  std::vector<std::string> layer_names;
  std::vector<std::vector<double>> layers;  // each row-major n x n

  double at(std::size_t layer, std::size_t i, std::size_t j) const {
    return layers[layer][i * n + j];
  }
};

/// Binary layer from thresholded feature similarity on raw (un-noised)
/// features: edge iff sim(x_i, x_j) >= rho, inclusive.
std::vector<double> build_similarity_layer(const Corpus& corpus,
                                           const std::string& modality,
                                           double rho,
                                           const SimilarityConfig& simcfg);

/// Binary layer joining items with equal values of a categorical
/// attribute. Items missing the attribute get no edges.
std::vector<double> build_categorical_layer(const Corpus& corpus,
                                            const std::string& attribute);

/// Builds all layers. Each event's influence matrix is scattered into the
/// global index space and symmetrized by elementwise max.
HetGraph assemble(const Corpus& corpus, const std::vector<EdgeTypeSpec>& specs,
                  const std::vector<EventAdjacency>& event_adjacencies);

void export_graph(const HetGraph& graph, const std::filesystem::path& path);
HetGraph import_graph(const std::filesystem::path& path);

}  // namespace hml
