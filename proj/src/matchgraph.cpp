#include "nopeplus/matchgraph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

namespace nopeplus {

namespace {

using Json = nlohmann::ordered_json;

// Union-find with path halving.
struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(size_t n) : parent(n) {
    for (size_t i = 0; i < n; ++i) parent[i] = static_cast<int>(i);
  }
  int find(int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[b] = a;
    return true;
  }
};

}  // namespace

std::vector<Correspondence> read_matches_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(in.good(), ErrorCode::IoError, "cannot open " + path.string());
  std::vector<Correspondence> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    Json rec = Json::parse(line);
    Correspondence c;
    c.image_i = rec.at("i").get<int>();
    c.image_j = rec.at("j").get<int>();
    for (const auto& m : rec.at("matches")) {
      c.pairs.emplace_back(Vec2(m.at(0).get<double>(), m.at(1).get<double>()),
                           Vec2(m.at(2).get<double>(), m.at(3).get<double>()));
    }
    out.push_back(std::move(c));
  }
  return out;
}

void write_matches_jsonl(const std::filesystem::path& path,
                         const std::vector<Correspondence>& correspondences) {
  std::ofstream out(path, std::ios::trunc);
  require(out.good(), ErrorCode::IoError, "cannot write " + path.string());
  for (const auto& c : correspondences) {
    Json rec;
    rec["i"] = c.image_i;
    rec["j"] = c.image_j;
    Json matches = Json::array();
    for (const auto& [a, b] : c.pairs) {
      matches.push_back({a.x(), a.y(), b.x(), b.y()});
    }
    rec["matches"] = std::move(matches);
    out << rec.dump() << "\n";
  }
}

MatchGraph build_match_graph(const std::vector<Correspondence>& correspondences,
                             const std::vector<int>& node_ids,
                             const std::vector<int>& known_ids) {
  MatchGraph graph;
  graph.nodes = node_ids;
  std::sort(graph.nodes.begin(), graph.nodes.end());
  std::set<int> node_set(graph.nodes.begin(), graph.nodes.end());
  std::set<int> known(known_ids.begin(), known_ids.end());
  known.insert(node_set.begin(), node_set.end());

  for (const auto& c : correspondences) {
    require(c.image_i != c.image_j, ErrorCode::InvalidConfig,
            "correspondence connects an image to itself");
    for (int id : {c.image_i, c.image_j}) {
      require(known.count(id) > 0, ErrorCode::UnknownImageId,
              "correspondence references image id " + std::to_string(id) +
                  " absent from the manifest");
    }
    if (!node_set.count(c.image_i) || !node_set.count(c.image_j)) continue;

    // Deduplicate exact pixel pairs within the record.
    Correspondence dedup;
    dedup.image_i = std::min(c.image_i, c.image_j);
    dedup.image_j = std::max(c.image_i, c.image_j);
    const bool flip = c.image_i > c.image_j;
    std::set<std::array<int64_t, 4>> seen;
    for (const auto& [a, b] : c.pairs) {
      const Vec2& pa = flip ? b : a;
      const Vec2& pb = flip ? a : b;
      std::array<int64_t, 4> key = {
          static_cast<int64_t>(std::llround(pa.x() * 16384.0)),
          static_cast<int64_t>(std::llround(pa.y() * 16384.0)),
          static_cast<int64_t>(std::llround(pb.x() * 16384.0)),
          static_cast<int64_t>(std::llround(pb.y() * 16384.0))};
      if (!seen.insert(key).second) continue;
      dedup.pairs.emplace_back(pa, pb);
    }
    if (dedup.pairs.empty()) continue;

    const auto key = std::make_pair(dedup.image_i, dedup.image_j);
    auto it = graph.edge_corr.find(key);
    if (it == graph.edge_corr.end()) {
      graph.edge_corr[key] = graph.correspondences.size();
      graph.weights[key] = static_cast<int>(dedup.pairs.size());
      graph.correspondences.push_back(std::move(dedup));
    } else {
      auto& existing = graph.correspondences[it->second];
      existing.pairs.insert(existing.pairs.end(), dedup.pairs.begin(),
                            dedup.pairs.end());
      graph.weights[key] = static_cast<int>(existing.pairs.size());
    }
  }
  return graph;
}

SpanningTree maximum_spanning_tree(const MatchGraph& graph) {
  require(!graph.nodes.empty(), ErrorCode::InvalidConfig, "empty graph");

  std::unordered_map<int, int> index;
  for (size_t i = 0; i < graph.nodes.size(); ++i) {
    index[graph.nodes[i]] = static_cast<int>(i);
  }

  struct E {
    int w, a, b;
  };
  std::vector<E> edges;
  edges.reserve(graph.weights.size());
  for (const auto& [key, w] : graph.weights) {
    edges.push_back({w, key.first, key.second});
  }
  std::sort(edges.begin(), edges.end(), [](const E& x, const E& y) {
    if (x.w != y.w) return x.w > y.w;
    if (x.a != y.a) return x.a < y.a;
    return x.b < y.b;
  });

  UnionFind uf(graph.nodes.size());
  std::map<int, std::vector<std::pair<int, int>>> adjacency;  // node -> (nbr, w)
  size_t accepted = 0;
  for (const auto& e : edges) {
    if (uf.unite(index.at(e.a), index.at(e.b))) {
      adjacency[e.a].emplace_back(e.b, e.w);
      adjacency[e.b].emplace_back(e.a, e.w);
      ++accepted;
    }
  }

  if (accepted + 1 != graph.nodes.size()) {
    std::map<int, std::vector<int>> comps;
    for (int node : graph.nodes) comps[uf.find(index.at(node))].push_back(node);
    std::vector<std::vector<int>> partition;
    for (auto& [root, members] : comps) partition.push_back(members);
    throw DisconnectedGraphError(
        "match graph is disconnected (" + std::to_string(partition.size()) +
            " components); matching coverage insufficient",
        std::move(partition));
  }

  // Root: maximum weighted degree, ties to the smallest id.
  int root = graph.nodes.front();
  double best = -1;
  for (int node : graph.nodes) {
    const double deg = graph.weighted_degree(node);
    if (deg > best) {
      best = deg;
      root = node;
    }
  }

  SpanningTree tree;
  tree.root = root;
  std::deque<int> frontier{root};
  std::set<int> visited{root};
  while (!frontier.empty()) {
    const int node = frontier.front();
    frontier.pop_front();
    auto nbrs = adjacency[node];
    std::sort(nbrs.begin(), nbrs.end());
    for (const auto& [nbr, w] : nbrs) {
      if (visited.count(nbr)) continue;
      visited.insert(nbr);
      tree.edges.push_back({node, nbr, w});
      tree.parent_of[nbr] = node;
      frontier.push_back(nbr);
    }
  }
  return tree;
}

std::vector<Track> extract_tracks(const std::vector<Correspondence>& correspondences,
                                  const SpanningTree& tree, int min_len,
                                  bool tree_edges_only) {
  std::set<std::pair<int, int>> tree_edges;
  for (const auto& e : tree.edges) {
    tree_edges.insert({std::min(e.parent, e.child), std::max(e.parent, e.child)});
  }

  struct Obs {
    int image;
    Vec2 pixel;
  };
  std::vector<Obs> observations;
  std::unordered_map<int64_t, std::unordered_map<int64_t, int>> lookup;
  auto obs_id = [&](int image, const Vec2& px) {
    const int64_t k1 = image;
    const int64_t k2 = (static_cast<int64_t>(std::llround(px.x() * 16384.0)) << 26) ^
                       static_cast<int64_t>(std::llround(px.y() * 16384.0));
    auto& slot = lookup[k1];
    auto it = slot.find(k2);
    if (it != slot.end()) return it->second;
    const int id = static_cast<int>(observations.size());
    observations.push_back({image, px});
    slot[k2] = id;
    return id;
  };

  struct Pair {
    int a, b;
  };
  std::vector<Pair> pairs;
  for (const auto& c : correspondences) {
    if (tree_edges_only) {
      const auto key = std::make_pair(std::min(c.image_i, c.image_j),
                                      std::max(c.image_i, c.image_j));
      if (!tree_edges.count(key)) continue;
    }
    for (const auto& [pa, pb] : c.pairs) {
      pairs.push_back({obs_id(c.image_i, pa), obs_id(c.image_j, pb)});
    }
  }

  UnionFind uf(observations.size());
  // Image sets per class root, used to refuse conflicting unions.
  std::vector<std::map<int, int>> images_of(observations.size());
  for (size_t i = 0; i < observations.size(); ++i) {
    images_of[i][observations[i].image] = static_cast<int>(i);
  }
  for (const auto& p : pairs) {
    const int ra = uf.find(p.a);
    const int rb = uf.find(p.b);
    if (ra == rb) continue;
    const auto& small = images_of[ra].size() <= images_of[rb].size()
                            ? images_of[ra]
                            : images_of[rb];
    const auto& large = images_of[ra].size() <= images_of[rb].size()
                            ? images_of[rb]
                            : images_of[ra];
    bool conflict = false;
    for (const auto& [img, obs] : small) {
      auto it = large.find(img);
      if (it != large.end() && it->second != obs) {
        conflict = true;
        break;
      }
    }
    if (conflict) continue;  // the later union is dropped
    uf.unite(ra, rb);
    const int root = uf.find(ra);
    const int other = root == ra ? rb : ra;
    auto& dst = images_of[root];
    for (const auto& kv : images_of[other]) dst.insert(kv);
    images_of[other].clear();
  }

  std::map<int, std::vector<int>> classes;
  for (size_t i = 0; i < observations.size(); ++i) {
    classes[uf.find(static_cast<int>(i))].push_back(static_cast<int>(i));
  }

  std::vector<Track> tracks;
  for (auto& [root, members] : classes) {
    if (static_cast<int>(members.size()) < min_len) continue;
    Track t;
    std::sort(members.begin(), members.end(), [&](int a, int b) {
      if (observations[a].image != observations[b].image) {
        return observations[a].image < observations[b].image;
      }
      return a < b;
    });
    for (int m : members) {
      t.observations.emplace_back(observations[m].image, observations[m].pixel);
    }
    tracks.push_back(std::move(t));
  }
  return tracks;
}

std::optional<int> random_reference(const MatchGraph& graph,
                                    const SpanningTree& tree, int image_id,
                                    Rng& rng, int min_matches) {
  std::set<int> excluded{image_id};
  auto it = tree.parent_of.find(image_id);
  if (it != tree.parent_of.end()) excluded.insert(it->second);
  for (int child : tree.children_of(image_id)) excluded.insert(child);

  std::vector<int> eligible;
  for (int node : graph.nodes) {
    if (excluded.count(node)) continue;
    if (graph.weight(image_id, node) >= min_matches) eligible.push_back(node);
  }
  if (eligible.empty()) return std::nullopt;
  return eligible[rng.uniform_int(eligible.size())];
}

}  // namespace nopeplus
