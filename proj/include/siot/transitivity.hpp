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

// Trust transitivity over a TrustStore.
//
// A path X = v0, v1, ..., vm = Y is evaluated hop by hop: every hop but the
// last uses the observer's recommendation records about the next node, the
// last hop uses the service records about Y. Hop values depend on the method:
//
//   traditional   only a record on exactly the target task counts;
//   conservative  exact record, else inference for the whole target task
//                 (every characteristic must be covered);
//   aggressive    one characteristic at a time, each along its own path.
//
// Direct experience on the exact task always takes precedence over
// inference. Paths of two or more hops are gated: recommendation hops need
// at least omega1 and the last hop at least omega2. Under the conservative
// method the gate applies to every characteristic's value, so a conservative
// path is also an aggressive path for each characteristic. A direct (one
// hop) path is the trustor's own experience and is not gated.
//
// Hops follow acquaintance links: social edges plus any pair where the
// observer already holds a record about the subject.

#include "siot/domain.hpp"
#include "siot/graph.hpp"
#include "siot/trust_engine.hpp"

#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

namespace siot {

/// Value of one hop and the figure its omega gate is checked against.
struct HopValue
{
  double value{0.0};
  double gate{0.0};
};

/// Evaluates hops for one target task under one method, memoizing per
/// (observer, subject, kind, characteristic).
class HopEvaluator
{
public:
  HopEvaluator(TrustStore const &store, TaskRegistry const &tasks, Task const &target,
               TransitivityMethod method)
    : store_{store}
    , tasks_{tasks}
    , target_{target}
    , method_{method}
  {}

  TransitivityMethod method() const noexcept
  {
    return method_;
  }

  Task const &target() const noexcept
  {
    return target_;
  }

  /// Whole-task hop value (traditional / conservative).
  std::optional<HopValue> task_hop(NodeId observer, NodeId subject, TrustKind kind)
  {
    return memo(observer, subject, kind, kWholeTask, [&] { return compute_task_hop(observer, subject, kind); });
  }

  /// Single-characteristic hop value (aggressive).
  std::optional<HopValue> characteristic_hop(NodeId observer, NodeId subject, TrustKind kind,
                                             CharacteristicId c)
  {
    return memo(observer, subject, kind, c, [&] { return compute_characteristic_hop(observer, subject, kind, c); });
  }

  /// Trust history of one pair, as (task, post-evaluated trust).
  std::vector<TaskTrust> history(NodeId observer, NodeId subject, TrustKind kind)
  {
    std::vector<TaskTrust> out;
    for (auto const &[ctx, rec] : store_.records(observer, subject, kind))
    {
      out.push_back(TaskTrust{&context_task(ctx), post_evaluate(rec)});
    }
    return out;
  }

private:
  static constexpr std::uint32_t kWholeTask = 0xffffffffu;

  struct Key
  {
    NodeId        observer;
    NodeId        subject;
    std::uint32_t characteristic;
    TrustKind     kind;

    bool operator==(Key const &) const = default;
  };

  struct KeyHash
  {
    std::size_t operator()(Key const &k) const noexcept
    {
      std::uint64_t h = (std::uint64_t{k.observer} << 32) ^ k.subject;
      h ^= (std::uint64_t{k.characteristic} << 1 | static_cast<std::uint64_t>(k.kind)) *
           0x9e3779b97f4a7c15ULL;
      return static_cast<std::size_t>(mix64(h));
    }
  };

  template <class Fn>
  std::optional<HopValue> memo(NodeId o, NodeId s, TrustKind k, std::uint32_t c, Fn &&compute)
  {
    Key key{o, s, c, k};
    if (auto it = cache_.find(key); it != cache_.end())
    {
      return it->second;
    }
    auto v = compute();
    cache_.emplace(key, v);
    return v;
  }

  Task const &context_task(Context ctx)
  {
    if (ctx.is_task())
    {
      return tasks_.at(ctx.id);
    }
    // a characteristic-scoped record reads as a one-characteristic task
    auto it = characteristic_tasks_.find(ctx.id);
    if (it == characteristic_tasks_.end())
    {
      it = characteristic_tasks_.emplace(ctx.id, make_task(kWholeTask, {{ctx.id, 1.0}})).first;
    }
    return it->second;
  }

  std::optional<double> exact(NodeId observer, NodeId subject, TrustKind kind) const
  {
    if (auto const *rec = store_.find(observer, subject, Context::of_task(target_.id()), kind))
    {
      return post_evaluate(*rec);
    }
    return std::nullopt;
  }

  std::optional<HopValue> compute_task_hop(NodeId observer, NodeId subject, TrustKind kind)
  {
    if (auto e = exact(observer, subject, kind))
    {
      return HopValue{*e, *e};
    }
    if (method_ == TransitivityMethod::traditional)
    {
      return std::nullopt;
    }
    auto   hist  = history(observer, subject, kind);
    double value = 0.0;
    double gate  = 1.0;
    for (auto const &part : target_.parts())
    {
      auto c = infer_characteristic_tw(hist, part.characteristic);
      if (!c)
      {
        return std::nullopt;
      }
      value += part.weight * *c;
      gate = std::min(gate, *c);
    }
    return HopValue{value, gate};
  }

  std::optional<HopValue> compute_characteristic_hop(NodeId observer, NodeId subject,
                                                     TrustKind kind, CharacteristicId c)
  {
    if (auto e = exact(observer, subject, kind))
    {
      return HopValue{*e, *e};
    }
    auto hist = history(observer, subject, kind);
    if (auto v = infer_characteristic_tw(hist, c))
    {
      return HopValue{*v, *v};
    }
    return std::nullopt;
  }

  TrustStore const                                   &store_;
  TaskRegistry const                                 &tasks_;
  Task const                                         &target_;
  TransitivityMethod                                  method_;
  std::unordered_map<Key, std::optional<HopValue>, KeyHash> cache_;
  std::map<CharacteristicId, Task>                    characteristic_tasks_;
};

/// Combines per-hop values; the last entry is the task hop.
inline double fold_chain(std::span<const double> tws, TransitivityMethod method)
{
  if (method == TransitivityMethod::traditional)
  {
    return transit_traditional(tws);
  }
  double v = tws.front();
  for (std::size_t i = 1; i < tws.size(); ++i)
  {
    v = transit_pair(v, tws[i]);
  }
  return v;
}

/// A path from trustor (front) to trustee (back) with its transit value.
struct TrustPath
{
  std::vector<NodeId> nodes;
  double              value{0.0};

  std::size_t hops() const noexcept
  {
    return nodes.empty() ? 0 : nodes.size() - 1;
  }

  /// Nodes strictly between trustor and trustee.
  std::span<const NodeId> intermediates() const noexcept
  {
    if (nodes.size() < 2)
    {
      return {};
    }
    return std::span<const NodeId>{nodes}.subspan(1, nodes.size() - 2);
  }

  friend bool operator==(TrustPath const &, TrustPath const &) = default;
};

/// Ordering used to pick among gated paths: higher value, then fewer hops,
/// then the lexicographically smaller node sequence.
inline bool better_path(TrustPath const &a, TrustPath const &b)
{
  if (a.value != b.value)
  {
    return a.value > b.value;
  }
  if (a.nodes.size() != b.nodes.size())
  {
    return a.nodes.size() < b.nodes.size();
  }
  return a.nodes < b.nodes;
}

namespace detail {

/// Evaluates an explicit path for one target (whole task when `c` is empty).
inline std::optional<double> evaluate_path(HopEvaluator &hops, std::span<const NodeId> path,
                                           TransitivityParams const &params,
                                           std::optional<CharacteristicId> c)
{
  if (path.size() < 2)
  {
    return std::nullopt;
  }
  auto hop = [&](NodeId o, NodeId s, TrustKind k) {
    return c ? hops.characteristic_hop(o, s, k, *c) : hops.task_hop(o, s, k);
  };
  std::vector<double> vals;
  bool const          gated = path.size() > 2;
  for (std::size_t i = 0; i + 1 < path.size(); ++i)
  {
    bool const last = i + 2 == path.size();
    auto       h    = hop(path[i], path[i + 1], last ? TrustKind::service : TrustKind::recommendation);
    if (!h)
    {
      return std::nullopt;
    }
    if (gated && h->gate < (last ? params.omega2 : params.omega1))
    {
      return std::nullopt;
    }
    vals.push_back(h->value);
  }
  return fold_chain(vals, hops.method());
}

}  // namespace detail

/// Conservative transit along one given path; nullopt when blocked.
inline std::optional<double> transit_conservative(TrustStore const &store, TaskRegistry const &tasks,
                                                  std::span<const NodeId> path, Task const &target,
                                                  TransitivityParams const &params)
{
  HopEvaluator hops{store, tasks, target, TransitivityMethod::conservative};
  return detail::evaluate_path(hops, path, params, std::nullopt);
}

/// Aggressive transit: one path per characteristic of `target`, in the order
/// of target.parts(). Combines the per-characteristic chain values with the
/// task's weights; nullopt when any characteristic is blocked.
inline std::optional<double> transit_aggressive(TrustStore const &store, TaskRegistry const &tasks,
                                                std::span<const std::vector<NodeId>> paths,
                                                Task const &target, TransitivityParams const &params)
{
  if (paths.size() != target.size())
  {
    throw std::invalid_argument("transit_aggressive needs one path per characteristic");
  }
  HopEvaluator hops{store, tasks, target, TransitivityMethod::aggressive};
  double       tw = 0.0;
  for (std::size_t i = 0; i < paths.size(); ++i)
  {
    auto const &part = target.parts()[i];
    auto        v    = detail::evaluate_path(hops, paths[i], params, part.characteristic);
    if (!v)
    {
      return std::nullopt;
    }
    tw += part.weight * *v;
  }
  return tw;
}

/// A trustee reachable under the chosen method.
struct PotentialTrustee
{
  NodeId node{0};
  double tw{0.0};
  /// One path for traditional / conservative; one per characteristic of the
  /// target (same order as its parts) for aggressive.
  std::vector<TrustPath> paths;
};

struct TrusteeSearch
{
  std::vector<PotentialTrustee> candidates;  // ascending node id
  std::size_t                   interrogated{0};
};

/// Bounded search for potential trustees of `target` around `trustor`.
class TrusteeFinder
{
public:
  TrusteeFinder(SocialGraph const &graph, TrustStore const &store, TaskRegistry const &tasks,
                std::span<const AgentProfile> profiles)
    : graph_{graph}
    , store_{store}
    , tasks_{tasks}
    , profiles_{profiles}
  {}

  TrusteeSearch find(NodeId trustor, Task const &target, TransitivityParams const &params)
  {
    params.validate();
    HopEvaluator hops{store_, tasks_, target, params.method};
    adjacency_.assign(graph_.node_count(), std::nullopt);

    TrusteeSearch out;
    if (params.method == TransitivityMethod::aggressive)
    {
      std::vector<std::vector<std::optional<TrustPath>>> per_char;
      for (auto const &part : target.parts())
      {
        per_char.push_back(best_paths(hops, trustor, params, part.characteristic));
      }
      for (NodeId y = 0; y < graph_.node_count(); ++y)
      {
        PotentialTrustee pt{y, 0.0, {}};
        bool             all = true;
        for (std::size_t i = 0; i < per_char.size() && all; ++i)
        {
          if (!per_char[i][y])
          {
            all = false;
            break;
          }
          pt.tw += target.parts()[i].weight * per_char[i][y]->value;
          pt.paths.push_back(*per_char[i][y]);
        }
        if (all)
        {
          out.candidates.push_back(std::move(pt));
        }
      }
    }
    else
    {
      auto best = best_paths(hops, trustor, params, std::nullopt);
      for (NodeId y = 0; y < graph_.node_count(); ++y)
      {
        if (best[y])
        {
          out.candidates.push_back(PotentialTrustee{y, best[y]->value, {*best[y]}});
        }
      }
    }
    out.interrogated = count_interrogated(trustor, target, params, out.candidates);
    return out;
  }

  /// Social neighbours plus subjects the node holds records about.
  std::vector<NodeId> const &acquaintances(NodeId u)
  {
    if (adjacency_.size() != graph_.node_count())
    {
      adjacency_.assign(graph_.node_count(), std::nullopt);
    }
    auto &slot = adjacency_[u];
    if (!slot)
    {
      auto nbrs = graph_.neighbors(u);
      auto subj = store_.subjects(u);
      slot.emplace();
      std::set_union(nbrs.begin(), nbrs.end(), subj.begin(), subj.end(), std::back_inserter(*slot));
      std::erase(*slot, u);
    }
    return *slot;
  }

  /// Whether `node` holds a record relevant to `target` as the method sees
  /// it: exact task, all characteristics covered, or any characteristic.
  bool relevant(NodeId node, Task const &target, TransitivityMethod method) const
  {
    std::vector<bool> covered(target.size(), false);
    bool              any = false;
    bool              hit = false;
    store_.for_each_subject(node, [&](NodeId, TrustKind, std::span<const TrustStore::Entry> entries) {
      if (hit)
      {
        return;
      }
      for (auto const &[ctx, rec] : entries)
      {
        if (ctx.is_task() && ctx.id == target.id())
        {
          hit = true;
          return;
        }
        if (method == TransitivityMethod::traditional)
        {
          continue;
        }
        for (std::size_t i = 0; i < target.size(); ++i)
        {
          auto const c = target.parts()[i].characteristic;
          bool const has =
              ctx.is_task() ? tasks_.at(ctx.id).contains(c) : ctx.id == c;
          if (has)
          {
            covered[i] = true;
            any        = true;
          }
        }
      }
    });
    if (hit)
    {
      return true;
    }
    switch (method)
    {
    case TransitivityMethod::traditional:
      return false;
    case TransitivityMethod::conservative:
      return std::all_of(covered.begin(), covered.end(), [](bool b) { return b; });
    case TransitivityMethod::aggressive:
      return any;
    }
    return false;
  }

private:
  bool is_trustee(NodeId n) const
  {
    return n < profiles_.size() && profiles_[n].is_trustee;
  }

  /// Best gated path to every reachable trustee (indexed by node).
  std::vector<std::optional<TrustPath>> best_paths(HopEvaluator &hops, NodeId trustor,
                                                   TransitivityParams const &params,
                                                   std::optional<CharacteristicId> c)
  {
    std::vector<std::optional<TrustPath>> best(graph_.node_count());
    std::vector<NodeId>                   path{trustor};
    std::vector<double>                   recs;
    std::vector<bool>                     on_path(graph_.node_count(), false);
    on_path[trustor] = true;

    auto hop = [&](NodeId o, NodeId s, TrustKind k) {
      return c ? hops.characteristic_hop(o, s, k, *c) : hops.task_hop(o, s, k);
    };

    // prefix fold of the recommendation hops so far
    auto dfs = [&](auto &self, double prefix) -> void {
      NodeId const u     = path.back();
      bool const   first = path.size() == 1;
      for (NodeId v : acquaintances(u))
      {
        if (on_path[v])
        {
          continue;
        }
        if (is_trustee(v))
        {
          if (auto h = hop(u, v, TrustKind::service))
          {
            std::optional<double> value;
            if (first)
            {
              value = h->value;
            }
            else if (h->gate >= params.omega2)
            {
              value = params.method == TransitivityMethod::traditional
                          ? prefix * h->value
                          : transit_pair(prefix, h->value);
            }
            if (value)
            {
              TrustPath cand{path, *value};
              cand.nodes.push_back(v);
              auto &slot = best[v];
              if (!slot || better_path(cand, *slot))
              {
                slot = std::move(cand);
              }
            }
          }
        }
        if (path.size() < params.max_hops)
        {
          auto h = hop(u, v, TrustKind::recommendation);
          if (h && h->gate >= params.omega1)
          {
            double next;
            if (first)
            {
              next = params.method == TransitivityMethod::traditional ? 1.0 * h->value : h->value;
            }
            else
            {
              next = params.method == TransitivityMethod::traditional ? prefix * h->value
                                                                      : transit_pair(prefix, h->value);
            }
            path.push_back(v);
            on_path[v] = true;
            self(self, next);
            on_path[v] = false;
            path.pop_back();
          }
        }
      }
    };
    dfs(dfs, 0.0);
    return best;
  }

  std::size_t count_interrogated(NodeId trustor, Task const &target,
                                 TransitivityParams const &params,
                                 std::span<const PotentialTrustee> candidates)
  {
    std::vector<std::size_t> depth(graph_.node_count(), SIZE_MAX);
    std::vector<bool>        counted(graph_.node_count(), false);
    std::deque<NodeId>       queue{trustor};
    depth[trustor] = 0;
    while (!queue.empty())
    {
      NodeId u = queue.front();
      queue.pop_front();
      if (depth[u] == params.max_hops)
      {
        continue;
      }
      for (NodeId v : acquaintances(u))
      {
        if (depth[v] != SIZE_MAX)
        {
          continue;
        }
        depth[v] = depth[u] + 1;
        if (relevant(v, target, params.method))
        {
          counted[v] = true;
          queue.push_back(v);  // only nodes that know something relay further
        }
      }
    }
    for (auto const &c : candidates)
    {
      counted[c.node] = true;
    }
    counted[trustor] = false;
    return static_cast<std::size_t>(std::count(counted.begin(), counted.end(), true));
  }

  SocialGraph const                               &graph_;
  TrustStore const                                &store_;
  TaskRegistry const                              &tasks_;
  std::span<const AgentProfile>                    profiles_;
  std::vector<std::optional<std::vector<NodeId>>>  adjacency_;
};

}  // namespace siot
