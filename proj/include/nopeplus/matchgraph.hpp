#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <vector>

#include "nopeplus/geometry.hpp"
#include "nopeplus/rng.hpp"

namespace nopeplus {

/// Pixel correspondences between two images. Coordinates are in pixel units
/// with origin at the top-left pixel center.
struct Correspondence {
  int image_i = -1;
  int image_j = -1;
  std::vector<std::pair<Vec2, Vec2>> pairs;
};

/// Line-delimited JSON records {"i":..,"j":..,"matches":[[ui,vi,uj,vj],...]}.
std::vector<Correspondence> read_matches_jsonl(const std::filesystem::path& path);
void write_matches_jsonl(const std::filesystem::path& path,
                         const std::vector<Correspondence>& correspondences);

struct MatchGraph {
  std::vector<int> nodes;  // sorted image ids
  // edge weights keyed by (min id, max id); weight = pair count
  std::map<std::pair<int, int>, int> weights;
  // index into the correspondence list for each edge
  std::map<std::pair<int, int>, size_t> edge_corr;
  std::vector<Correspondence> correspondences;

  int weight(int a, int b) const {
    auto it = weights.find({std::min(a, b), std::max(a, b)});
    return it == weights.end() ? 0 : it->second;
  }
  const Correspondence* edge(int a, int b) const {
    auto it = edge_corr.find({std::min(a, b), std::max(a, b)});
    return it == edge_corr.end() ? nullptr : &correspondences[it->second];
  }
  double weighted_degree(int node) const {
    double sum = 0;
    for (const auto& [key, w] : weights) {
      if (key.first == node || key.second == node) sum += w;
    }
    return sum;
  }
};

struct SpanningTree {
  struct Edge {
    int parent = -1;
    int child = -1;
    int weight = 0;
  };
  int root = -1;
  std::vector<Edge> edges;       // in root-to-leaf traversal order
  std::map<int, int> parent_of;  // child -> parent (root absent)

  std::vector<int> children_of(int node) const {
    std::vector<int> out;
    for (const auto& e : edges) {
      if (e.parent == node) out.push_back(e.child);
    }
    return out;
  }
};

/// One multi-image feature trajectory.
struct Track {
  std::vector<std::pair<int, Vec2>> observations;  // (image id, pixel)
  int point_index = -1;  // index into the global track-point set, -1 unset
};

/// Build the weighted graph over `node_ids`. Correspondences touching ids
/// outside the manifest throw UnknownImageId; pairs where one endpoint is a
/// known id but not in `node_ids` (e.g. test images) are ignored.
MatchGraph build_match_graph(const std::vector<Correspondence>& correspondences,
                             const std::vector<int>& node_ids,
                             const std::vector<int>& known_ids = {});

/// Kruskal maximum spanning tree with deterministic tie-breaking
/// (weight desc, then smaller id pair). Root = node with the largest sum of
/// incident edge weights, ties to the smallest id. Throws
/// DisconnectedGraphError with the component partition.
SpanningTree maximum_spanning_tree(const MatchGraph& graph);

/// Union-find track extraction over (image, pixel) observations. When
/// `tree_edges_only` is set, only matches on MST edges are consumed.
/// Unions that would place two distinct pixels of one image in the same
/// class are refused, keeping every class conflict-free.
std::vector<Track> extract_tracks(const std::vector<Correspondence>& correspondences,
                                  const SpanningTree& tree, int min_len,
                                  bool tree_edges_only = false);

/// Uniform draw among images that are neither the query nor its MST
/// parent/children and that share at least `min_matches` pairs with it.
std::optional<int> random_reference(const MatchGraph& graph,
                                    const SpanningTree& tree, int image_id,
                                    Rng& rng, int min_matches);

}  // namespace nopeplus
