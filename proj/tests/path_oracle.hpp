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

// Exhaustive reference for the trustee search, shared by the unit and
// acceptance tests. Keeps its own copy of every record and recomputes
// post-evaluation, inference and chain folding from scratch.

#include "siot/rng.hpp"
#include "siot/transitivity.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <tuple>
#include <vector>

namespace siot::oracle {

inline constexpr TaskId kTarget = 100;

// A random world small enough to enumerate every simple path.
struct Instance
{
  SocialGraph               graph;
  TaskRegistry              tasks;
  TrustStore                store;
  std::vector<AgentProfile> profiles;
  TransitivityParams        params;
  NodeId                    trustor{0};
  // (observer, subject, kind, task) -> record, kept apart from the store
  std::map<std::tuple<NodeId, NodeId, TrustKind, TaskId>, TrustRecord> records;
};

inline Instance make_instance(Rng &rng)
{
  Instance          in;
  std::size_t const n = 3 + rng() % 10;

  std::vector<SocialGraph::Edge> edges;
  for (NodeId u = 0; u < n; ++u)
  {
    for (NodeId v = u + 1; v < n; ++v)
    {
      if (bernoulli(rng, 0.3))
      {
        edges.emplace_back(u, v);
      }
    }
  }
  in.graph = SocialGraph{n, edges};

  std::size_t const k = 2 + rng() % 4;
  auto random_task    = [&](TaskId id) {
    std::vector<TaskPart> parts;
    std::size_t const     size = 1 + rng() % std::min<std::size_t>(3, k);
    std::vector<CharacteristicId> all(k);
    std::iota(all.begin(), all.end(), CharacteristicId{0});
    std::shuffle(all.begin(), all.end(), rng);
    for (std::size_t i = 0; i < size; ++i)
    {
      parts.push_back({all[i], uniform(rng, 0.1, 1.0)});
    }
    return make_task(id, parts);
  };
  for (TaskId id = 0; id < 4; ++id)
  {
    in.tasks.add(random_task(id));
  }
  in.tasks.add(random_task(kTarget));

  for (NodeId u = 0; u < n; ++u)
  {
    AgentProfile p;
    p.node       = u;
    p.is_trustee = bernoulli(rng, 0.5);
    in.profiles.push_back(p);
  }

  for (NodeId o = 0; o < n; ++o)
  {
    for (NodeId s = 0; s < n; ++s)
    {
      if (o == s || !bernoulli(rng, 0.45))
      {
        continue;
      }
      std::size_t const count = 1 + rng() % 2;
      for (std::size_t i = 0; i < count; ++i)
      {
        TrustKind const kind = bernoulli(rng, 0.5) ? TrustKind::service : TrustKind::recommendation;
        TaskId const    task = bernoulli(rng, 0.15) ? kTarget : static_cast<TaskId>(rng() % 4);
        TrustRecord     r{uniform01(rng), uniform01(rng), uniform01(rng), uniform(rng, 0.0, 0.4), 1,
                      kind};
        in.records[{o, s, kind, task}] = r;
        in.store.put(o, s, Context::of_task(task), r);
      }
    }
  }

  in.params.max_hops = 1 + rng() % 4;
  in.params.omega1   = uniform(rng, 0.2, 0.6);
  in.params.omega2   = uniform(rng, 0.2, 0.6);
  return in;
}

// Exhaustive reference: enumerates every simple path up to max_hops edges.
class Oracle
{
public:
  Oracle(Instance const &in, TransitivityMethod method)
    : in_{in}
    , target_{in.tasks.at(kTarget)}
    , method_{method}
  {}

  // node -> best value (whole task, or per characteristic when `c` is set)
  std::map<NodeId, double> best(std::optional<CharacteristicId> c) const
  {
    std::map<NodeId, double> out;
    std::vector<NodeId>      path{in_.trustor};
    walk(path, c, out);
    return out;
  }

  std::map<NodeId, double> candidates() const
  {
    if (method_ != TransitivityMethod::aggressive)
    {
      return best(std::nullopt);
    }
    std::vector<std::map<NodeId, double>> per;
    for (auto const &part : target_.parts())
    {
      per.push_back(best(part.characteristic));
    }
    std::map<NodeId, double> out;
    for (auto const &[node, _] : per.front())
    {
      double tw  = 0.0;
      bool   all = true;
      for (std::size_t i = 0; i < per.size(); ++i)
      {
        auto it = per[i].find(node);
        if (it == per[i].end())
        {
          all = false;
          break;
        }
        tw += target_.parts()[i].weight * it->second;
      }
      if (all)
      {
        out[node] = tw;
      }
    }
    return out;
  }

private:
  struct Hop
  {
    double value;
    double gate;
  };

  static double evaluate(TrustRecord const &r)
  {
    double const raw = r.s_hat * r.g_hat - (1.0 - r.s_hat) * r.d_hat - r.c_hat;
    return std::clamp((raw + 2.0) / 3.0, 0.0, 1.0);
  }

  bool acquainted(NodeId u, NodeId v) const
  {
    if (in_.graph.has_edge(u, v))
    {
      return true;
    }
    for (auto const &[key, _] : in_.records)
    {
      if (std::get<0>(key) == u && std::get<1>(key) == v)
      {
        return true;
      }
    }
    return false;
  }

  std::optional<double> infer(NodeId o, NodeId s, TrustKind kind, CharacteristicId c) const
  {
    double num = 0.0, den = 0.0;
    for (auto const &[key, rec] : in_.records)  // ascending task id within a pair
    {
      auto const &[ko, ks, kk, task] = key;
      if (ko != o || ks != s || kk != kind)
      {
        continue;
      }
      for (auto const &part : in_.tasks.at(task).parts())
      {
        if (part.characteristic == c)
        {
          num += part.weight * evaluate(rec);
          den += part.weight;
        }
      }
    }
    if (den == 0.0)
    {
      return std::nullopt;
    }
    return num / den;
  }

  std::optional<Hop> hop(NodeId o, NodeId s, TrustKind kind, std::optional<CharacteristicId> c) const
  {
    if (auto it = in_.records.find({o, s, kind, kTarget}); it != in_.records.end())
    {
      double const v = evaluate(it->second);
      return Hop{v, v};
    }
    if (method_ == TransitivityMethod::traditional)
    {
      return std::nullopt;
    }
    if (c)
    {
      auto v = infer(o, s, kind, *c);
      return v ? std::optional<Hop>{Hop{*v, *v}} : std::nullopt;
    }
    double value = 0.0, gate = 1.0;
    for (auto const &part : target_.parts())
    {
      auto v = infer(o, s, kind, part.characteristic);
      if (!v)
      {
        return std::nullopt;
      }
      value += part.weight * *v;
      gate = std::min(gate, *v);
    }
    return Hop{value, gate};
  }

  std::optional<double> path_value(std::vector<NodeId> const &p,
                                   std::optional<CharacteristicId> c) const
  {
    std::size_t const   edges = p.size() - 1;
    std::vector<double> vals;
    for (std::size_t i = 0; i < edges; ++i)
    {
      bool const last = i + 1 == edges;
      auto       h    = hop(p[i], p[i + 1], last ? TrustKind::service : TrustKind::recommendation, c);
      if (!h)
      {
        return std::nullopt;
      }
      if (edges > 1 && h->gate < (last ? in_.params.omega2 : in_.params.omega1))
      {
        return std::nullopt;
      }
      vals.push_back(h->value);
    }
    double v = vals.front();
    for (std::size_t i = 1; i < vals.size(); ++i)
    {
      v = method_ == TransitivityMethod::traditional
              ? v * vals[i]
              : v * vals[i] + (1.0 - v) * (1.0 - vals[i]);
    }
    return v;
  }

  void walk(std::vector<NodeId> &path, std::optional<CharacteristicId> c,
            std::map<NodeId, double> &out) const
  {
    NodeId const u = path.back();
    if (path.size() > 1 && in_.profiles[u].is_trustee)
    {
      if (auto v = path_value(path, c))
      {
        auto it = out.find(u);
        if (it == out.end() || *v > it->second)
        {
          out[u] = *v;
        }
      }
    }
    if (path.size() - 1 == in_.params.max_hops)
    {
      return;
    }
    for (NodeId v = 0; v < in_.graph.node_count(); ++v)
    {
      if (std::find(path.begin(), path.end(), v) != path.end() || !acquainted(u, v))
      {
        continue;
      }
      path.push_back(v);
      walk(path, c, out);
      path.pop_back();
    }
  }

  Instance const    &in_;
  Task const        &target_;
  TransitivityMethod method_;
};

inline std::map<NodeId, double> found(Instance const &in, TransitivityMethod m)
{
  TrusteeFinder      finder{in.graph, in.store, in.tasks, in.profiles};
  TransitivityParams p = in.params;
  p.method             = m;
  std::map<NodeId, double> out;
  for (auto const &c : finder.find(in.trustor, in.tasks.at(kTarget), p).candidates)
  {
    out[c.node] = c.tw;
  }
  return out;
}

inline std::size_t interrogated(Instance const &in, TransitivityMethod m)
{
  TrusteeFinder      finder{in.graph, in.store, in.tasks, in.profiles};
  TransitivityParams p = in.params;
  p.method             = m;
  return finder.find(in.trustor, in.tasks.at(kTarget), p).interrogated;
}

inline bool subset(std::map<NodeId, double> const &a, std::map<NodeId, double> const &b)
{
  return std::all_of(a.begin(), a.end(), [&](auto const &kv) { return b.count(kv.first) > 0; });
}

}  // namespace siot::oracle
