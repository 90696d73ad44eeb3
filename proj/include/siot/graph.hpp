//------------------------------------------------------------------------------
//
//   Copyright 2026 The siot-trust Authors
//
//   Licensed under the Apache License, Version 2.0 (the "License");
//   you may not use this file except in compliance with the License.
//   You may obtain a copy of the License at
//
//       http://www.apache.org/licenses/LICENSE-2.0
//
//   Unless required by applicable law or agreed to in writing, software
//   distributed under the License is distributed on an "AS IS" BASIS,
//   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//   See the License for the specific language governing permissions and
//   limitations under the License.
//
//------------------------------------------------------------------------------

#pragma once

#include "siot/rng.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <deque>
#include <fstream>
#include <istream>
#include <iterator>
#include <map>
#include <numeric>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace siot {

using NodeId = std::uint32_t;

class ParseError : public std::runtime_error
{
public:
  ParseError(std::size_t line, const std::string &what)
    : std::runtime_error("line " + std::to_string(line) + ": " + what)
    , line_{line}
  {}

  std::size_t line() const noexcept
  {
    return line_;
  }

private:
  std::size_t line_;
};

/// Undirected social topology over dense node ids 0..N-1.
///
/// Immutable once built; the original (file) id of each node is kept for
/// reporting and for resolving feature files.
class SocialGraph
{
public:
  using Edge = std::pair<NodeId, NodeId>;

  SocialGraph() = default;

  /// Builds from dense ids. Self-loops are rejected, duplicates collapsed.
  SocialGraph(std::size_t node_count, std::span<const Edge> edges,
              std::vector<std::uint64_t> original_ids = {})
    : adjacency_(node_count)
    , original_ids_(std::move(original_ids))
  {
    if (original_ids_.empty())
    {
      original_ids_.resize(node_count);
      std::iota(original_ids_.begin(), original_ids_.end(), std::uint64_t{0});
    }
    if (original_ids_.size() != node_count)
    {
      throw std::invalid_argument("original id map size does not match node count");
    }
    for (auto [u, v] : edges)
    {
      if (u >= node_count || v >= node_count)
      {
        throw std::invalid_argument("edge endpoint outside node range");
      }
      if (u == v)
      {
        throw std::invalid_argument("self-loop on node " + std::to_string(u));
      }
      adjacency_[u].push_back(v);
      adjacency_[v].push_back(u);
    }
    for (auto &nbrs : adjacency_)
    {
      std::sort(nbrs.begin(), nbrs.end());
      nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
      edge_count_ += nbrs.size();
    }
    edge_count_ /= 2;
  }

  std::size_t node_count() const noexcept
  {
    return adjacency_.size();
  }

  std::size_t edge_count() const noexcept
  {
    return edge_count_;
  }

  /// Sorted ascending.
  std::span<const NodeId> neighbors(NodeId n) const
  {
    return adjacency_.at(n);
  }

  std::size_t degree(NodeId n) const
  {
    return adjacency_.at(n).size();
  }

  bool has_edge(NodeId u, NodeId v) const
  {
    auto const &nbrs = adjacency_.at(u);
    return std::binary_search(nbrs.begin(), nbrs.end(), v);
  }

  /// Each undirected edge once, as (lo, hi), sorted.
  std::vector<Edge> edges() const
  {
    std::vector<Edge> out;
    out.reserve(edge_count_);
    for (NodeId u = 0; u < adjacency_.size(); ++u)
    {
      for (NodeId v : adjacency_[u])
      {
        if (u < v)
        {
          out.emplace_back(u, v);
        }
      }
    }
    return out;
  }

  std::uint64_t original_id(NodeId n) const
  {
    return original_ids_.at(n);
  }

  std::vector<std::uint64_t> const &original_ids() const noexcept
  {
    return original_ids_;
  }

  bool has_features() const noexcept
  {
    return !features_.empty();
  }

  std::size_t feature_count() const noexcept
  {
    return features_.empty() ? 0 : features_.front().size();
  }

  std::vector<std::uint8_t> const &features(NodeId n) const
  {
    return features_.at(n);
  }

  /// Copy with per-node feature vectors attached. All rows must have the
  /// same length.
  SocialGraph with_features(std::vector<std::vector<std::uint8_t>> rows) const
  {
    if (rows.size() != node_count())
    {
      throw std::invalid_argument("feature rows do not match node count");
    }
    for (auto const &r : rows)
    {
      if (r.size() != rows.front().size())
      {
        throw std::invalid_argument("feature rows have different lengths");
      }
    }
    SocialGraph g = *this;
    g.features_   = std::move(rows);
    return g;
  }

  friend bool operator==(SocialGraph const &, SocialGraph const &) = default;

private:
  std::vector<std::vector<NodeId>>        adjacency_;
  std::size_t                             edge_count_{0};
  std::vector<std::uint64_t>              original_ids_;
  std::vector<std::vector<std::uint8_t>>  features_;
};

namespace detail {

inline bool blank_or_comment(std::string const &line)
{
  auto it = std::find_if_not(line.begin(), line.end(),
                             [](unsigned char c) { return std::isspace(c) != 0; });
  return it == line.end() || *it == '#' || *it == '%';
}

}  // namespace detail

/// SNAP-style edge list: one "u v" pair per line, `#` comments ignored.
/// Ids are remapped to 0..N-1 in ascending original-id order, so the mapping
/// does not depend on line order.
inline SocialGraph load_edge_list(std::istream &in)
{
  std::vector<std::pair<std::uint64_t, std::uint64_t>> raw;
  std::string                                          line;
  std::size_t                                          lineno = 0;
  while (std::getline(in, line))
  {
    ++lineno;
    if (detail::blank_or_comment(line))
    {
      continue;
    }
    std::istringstream ss{line};
    long long          u = -1;
    long long          v = -1;
    std::string        rest;
    if (!(ss >> u >> v) || u < 0 || v < 0 || (ss >> rest))
    {
      throw ParseError(lineno, "expected two non-negative integers, got '" + line + "'");
    }
    raw.emplace_back(static_cast<std::uint64_t>(u), static_cast<std::uint64_t>(v));
  }
  if (raw.empty())
  {
    throw std::invalid_argument("edge list is empty");
  }

  std::vector<std::uint64_t> ids;
  ids.reserve(raw.size() * 2);
  for (auto [u, v] : raw)
  {
    ids.push_back(u);
    ids.push_back(v);
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());

  auto dense = [&](std::uint64_t id) {
    return static_cast<NodeId>(std::lower_bound(ids.begin(), ids.end(), id) - ids.begin());
  };
  std::vector<SocialGraph::Edge> edges;
  edges.reserve(raw.size());
  for (auto [u, v] : raw)
  {
    if (u == v)
    {
      continue;  // SNAP dumps occasionally carry self-loops; they carry no tie
    }
    edges.emplace_back(dense(u), dense(v));
  }
  return SocialGraph{ids.size(), edges, std::move(ids)};
}

inline SocialGraph load_edge_list_file(std::string const &path)
{
  std::ifstream in{path};
  if (!in)
  {
    throw std::runtime_error("cannot open edge list '" + path + "'");
  }
  return load_edge_list(in);
}

/// Feature rows: "originalId f1 f2 ... fk" with 0/1 flags. Nodes missing from
/// the file get all-zero vectors; an empty file yields zero-length vectors.
inline SocialGraph load_features(std::istream &in, SocialGraph const &graph)
{
  std::map<std::uint64_t, NodeId> by_original;
  for (NodeId n = 0; n < graph.node_count(); ++n)
  {
    by_original.emplace(graph.original_id(n), n);
  }

  std::vector<std::pair<NodeId, std::vector<std::uint8_t>>> rows;
  std::size_t                                               width = 0;
  std::string                                               line;
  std::size_t                                               lineno = 0;
  while (std::getline(in, line))
  {
    ++lineno;
    if (detail::blank_or_comment(line))
    {
      continue;
    }
    std::istringstream ss{line};
    long long          id = -1;
    if (!(ss >> id) || id < 0)
    {
      throw ParseError(lineno, "expected a node id");
    }
    auto found = by_original.find(static_cast<std::uint64_t>(id));
    if (found == by_original.end())
    {
      throw ParseError(lineno, "node " + std::to_string(id) + " is not in the graph");
    }
    std::vector<std::uint8_t> flags;
    std::string               tok;
    while (ss >> tok)
    {
      if (tok != "0" && tok != "1")
      {
        throw ParseError(lineno, "feature flag must be 0 or 1, got '" + tok + "'");
      }
      flags.push_back(tok == "1" ? 1 : 0);
    }
    if (rows.empty())
    {
      width = flags.size();
    }
    else if (flags.size() != width)
    {
      throw ParseError(lineno, "ragged feature row: expected " + std::to_string(width) +
                                   " flags, got " + std::to_string(flags.size()));
    }
    rows.emplace_back(found->second, std::move(flags));
  }

  std::vector<std::vector<std::uint8_t>> features(graph.node_count(),
                                                  std::vector<std::uint8_t>(width, 0));
  for (auto &[n, flags] : rows)
  {
    features[n] = std::move(flags);
  }
  return graph.with_features(std::move(features));
}

inline SocialGraph load_features_file(std::string const &path, SocialGraph const &graph)
{
  std::ifstream in{path};
  if (!in)
  {
    throw std::runtime_error("cannot open feature file '" + path + "'");
  }
  return load_features(in, graph);
}

/// Writes original ids, so load_edge_list(write(g)) == g.
inline void write_edge_list(SocialGraph const &graph, std::ostream &out)
{
  for (auto [u, v] : graph.edges())
  {
    out << graph.original_id(u) << ' ' << graph.original_id(v) << '\n';
  }
}

struct GraphStats
{
  std::size_t node_count{0};
  std::size_t edge_count{0};
  double      avg_degree{0.0};
  std::size_t diameter{0};
  double      avg_path_length{0.0};
  double      avg_clustering{0.0};
  std::size_t components{0};
  std::size_t measured_nodes{0};  // size of the component the path stats cover
};

/// Connected components, each as a sorted node list, ordered by smallest id.
inline std::vector<std::vector<NodeId>> connected_components(SocialGraph const &g)
{
  std::vector<std::vector<NodeId>> comps;
  std::vector<bool>                seen(g.node_count(), false);
  for (NodeId s = 0; s < g.node_count(); ++s)
  {
    if (seen[s])
    {
      continue;
    }
    std::vector<NodeId> comp{s};
    seen[s] = true;
    for (std::size_t head = 0; head < comp.size(); ++head)
    {
      for (NodeId v : g.neighbors(comp[head]))
      {
        if (!seen[v])
        {
          seen[v] = true;
          comp.push_back(v);
        }
      }
    }
    std::sort(comp.begin(), comp.end());
    comps.push_back(std::move(comp));
  }
  return comps;
}

/// Hop distances from `source`; unreachable nodes hold SIZE_MAX.
inline std::vector<std::size_t> bfs_distances(SocialGraph const &g, NodeId source)
{
  std::vector<std::size_t> dist(g.node_count(), SIZE_MAX);
  std::deque<NodeId>       queue{source};
  dist[source] = 0;
  while (!queue.empty())
  {
    NodeId u = queue.front();
    queue.pop_front();
    for (NodeId v : g.neighbors(u))
    {
      if (dist[v] == SIZE_MAX)
      {
        dist[v] = dist[u] + 1;
        queue.push_back(v);
      }
    }
  }
  return dist;
}

/// Local clustering coefficient; degree < 2 gives 0.
inline double local_clustering(SocialGraph const &g, NodeId n)
{
  auto nbrs = g.neighbors(n);
  if (nbrs.size() < 2)
  {
    return 0.0;
  }
  std::size_t links = 0;
  for (NodeId v : nbrs)
  {
    auto vn = g.neighbors(v);
    // count common neighbours of n and v with id > v so each link counts once
    auto a = std::upper_bound(nbrs.begin(), nbrs.end(), v);
    auto b = std::upper_bound(vn.begin(), vn.end(), v);
    while (a != nbrs.end() && b != vn.end())
    {
      if (*a < *b)
      {
        ++a;
      }
      else if (*b < *a)
      {
        ++b;
      }
      else
      {
        ++links;
        ++a;
        ++b;
      }
    }
  }
  double const k = static_cast<double>(nbrs.size());
  return 2.0 * static_cast<double>(links) / (k * (k - 1.0));
}

/// Path statistics run on the largest component (ties: lowest first node);
/// degree and clustering cover the whole graph.
inline GraphStats compute_stats(SocialGraph const &g)
{
  if (g.node_count() == 0)
  {
    throw std::invalid_argument("compute_stats needs a nonempty graph");
  }
  GraphStats s;
  s.node_count = g.node_count();
  s.edge_count = g.edge_count();
  s.avg_degree = 2.0 * static_cast<double>(s.edge_count) / static_cast<double>(s.node_count);

  auto comps   = connected_components(g);
  s.components = comps.size();
  auto largest = std::max_element(comps.begin(), comps.end(), [](auto const &a, auto const &b) {
    return a.size() < b.size();
  });
  s.measured_nodes = largest->size();

  std::uint64_t total = 0;
  std::size_t   diam  = 0;
  for (NodeId src : *largest)
  {
    auto dist = bfs_distances(g, src);
    for (NodeId dst : *largest)
    {
      total += dist[dst];
      diam = std::max(diam, dist[dst]);
    }
  }
  double const m    = static_cast<double>(largest->size());
  s.diameter        = diam;
  s.avg_path_length = m > 1 ? static_cast<double>(total) / (m * (m - 1.0)) : 0.0;

  double cc = 0.0;
  for (NodeId n = 0; n < g.node_count(); ++n)
  {
    cc += local_clustering(g, n);
  }
  s.avg_clustering = cc / static_cast<double>(g.node_count());
  return s;
}

inline std::string stats_csv_header()
{
  return "nodes,edges,avg_degree,diameter,avg_path_length,avg_clustering,components";
}

inline std::string stats_csv_row(GraphStats const &s)
{
  std::ostringstream out;
  out.precision(6);
  out << s.node_count << ',' << s.edge_count << ',' << s.avg_degree << ',' << s.diameter << ','
      << s.avg_path_length << ',' << s.avg_clustering << ',' << s.components;
  return out.str();
}

struct RoleAssignment
{
  std::vector<NodeId> trustors;  // sorted
  std::vector<NodeId> trustees;  // sorted
};

/// Two uniform samples without replacement of round(fraction * N) nodes each.
/// Independent by default (overlap allowed); `disjoint` draws trustees from
/// the nodes not chosen as trustors.
inline RoleAssignment sample_roles(SocialGraph const &g, double fraction, Rng &rng,
                                   bool disjoint = false)
{
  if (!(fraction > 0.0 && fraction <= 1.0))
  {
    throw std::invalid_argument("role fraction must lie in (0, 1]");
  }
  auto const n     = g.node_count();
  auto const count = static_cast<std::size_t>(std::lround(fraction * static_cast<double>(n)));
  if (disjoint && 2 * count > n)
  {
    throw std::invalid_argument("disjoint roles need fraction <= 0.5");
  }
  std::vector<NodeId> all(n);
  std::iota(all.begin(), all.end(), NodeId{0});

  RoleAssignment roles;
  std::sample(all.begin(), all.end(), std::back_inserter(roles.trustors), count, rng);
  std::vector<NodeId> pool;
  if (disjoint)
  {
    std::set_difference(all.begin(), all.end(), roles.trustors.begin(), roles.trustors.end(),
                        std::back_inserter(pool));
  }
  else
  {
    pool = all;
  }
  std::sample(pool.begin(), pool.end(), std::back_inserter(roles.trustees), count, rng);
  return roles;
}

}  // namespace siot
