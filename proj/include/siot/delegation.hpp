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

#include "siot/domain.hpp"
#include "siot/graph.hpp"
#include "siot/rng.hpp"
#include "siot/transitivity.hpp"
#include "siot/trust_engine.hpp"

#include <json.hpp>

#include <algorithm>
#include <optional>
#include <set>
#include <span>
#include <vector>

namespace siot {

struct DelegationRequest
{
  NodeId             trustor{0};
  TaskId             task{0};
  SelectionStrategy  strategy{SelectionStrategy::full_profit};
  TransitivityParams transitivity;
  std::uint32_t      epoch{0};
};

/// Knobs of the protocol that stay fixed across a run.
struct ProtocolOptions
{
  UpdateParams update;
  RecordPrior  prior;
  /// Correct realized results for the environment before updating.
  bool env_correction{false};
  /// Let the trustor keep the task when it is at least as profitable.
  bool allow_self_execution{false};
  /// Update recommenders' records after a transitive delegation.
  bool update_recommenders{true};
};

/// Mutable trust state of one simulation run.
struct SimulationState
{
  TrustStore store;
  UsageLog   usage;
};

struct RankedCandidate
{
  NodeId node{0};
  double tw{0.0};
  double score{0.0};
};

struct Rejection
{
  NodeId node{0};
  double reverse_tw{0.0};
};

struct DelegationTrace
{
  NodeId                           trustor{0};
  TaskId                           task{0};
  std::uint32_t                    epoch{0};
  std::vector<RankedCandidate>     ranked;
  std::vector<Rejection>           rejections;
  std::optional<NodeId>            chosen;
  bool                             self_executed{false};
  std::optional<DelegationOutcome> outcome;
  std::size_t                      interrogated{0};
  std::vector<TrustPath>           paths;  // paths to the chosen trustee

  bool unavailable() const noexcept
  {
    return !chosen.has_value();
  }
};

/// Realizes one delegation against hidden ground truth. The trustee's
/// success probability is its task competence scaled by the worst environment
/// on the path; dishonest trustees inflate cost by their multiplier. Abuse of
/// the trustee's resource follows the trustor's integrity. Consumes exactly
/// two draws.
inline DelegationOutcome sample_outcome(AgentProfile const &trustor, AgentProfile const &trustee,
                                        Task const &task, EnvSnapshot env, Rng &rng)
{
  DelegationOutcome o;
  double const      p = trustee.success_probability(task) * env.min();
  o.success           = bernoulli(rng, p);
  o.abusive           = bernoulli(rng, 1.0 - trustor.integrity);
  o.gain              = o.success ? trustee.terms.gain : 0.0;
  o.damage            = o.success ? 0.0 : trustee.terms.damage;
  o.cost              = std::clamp(trustee.terms.cost * trustee.cost_multiplier, 0.0, 1.0);
  o.env               = std::move(env);
  return o;
}

/// Read-only view of a simulation world.
struct WorldView
{
  SocialGraph const            &graph;
  TaskRegistry const           &tasks;
  std::span<const AgentProfile> profiles;
  EnvironmentSchedule const    &environment;
};

/// Potential trustees of a request with the records used to rank them.
struct Discovery
{
  TrusteeSearch          search;
  std::vector<Candidate> candidates;  // same order as search.candidates
};

/// Finds potential trustees by bounded search and attaches a ranking record
/// to each: the trustor's own record on the exact task when it has one,
/// otherwise a record carrying the transited trust.
inline Discovery find_potential_trustees(WorldView const &world, TrustStore const &store,
                                         DelegationRequest const &request)
{
  Task const   &task = world.tasks.at(request.task);
  TrusteeFinder finder{world.graph, store, world.tasks, world.profiles};
  Discovery     d;
  d.search = finder.find(request.trustor, task, request.transitivity);
  for (auto const &pt : d.search.candidates)
  {
    auto const *own = store.find(request.trustor, pt.node, Context::of_task(task.id()), TrustKind::service);
    d.candidates.push_back(Candidate{pt.node, own ? *own : record_from_trust(pt.tw)});
  }
  return d;
}

namespace detail {

inline void apply_update(TrustStore &store, NodeId observer, NodeId subject, TaskId task,
                         TrustRecord const &base, DelegationOutcome const &outcome,
                         ProtocolOptions const &options)
{
  TrustRecord updated = options.env_correction
                            ? update_estimates_env(base, outcome, options.update)
                            : update_estimates(base, outcome, options.update);
  store.put(observer, subject, Context::of_task(task), updated);
}

}  // namespace detail

/// Walks a ranked candidate list: each candidate reverse-evaluates the
/// trustor and the first to accept executes the task. Updates the trustor's
/// service record, recommenders' records along `paths_of(chosen)` and the
/// trustee's usage log. Nothing is updated when every candidate refuses.
template <class PathsOf>
DelegationTrace delegate_ranked(WorldView const &world, SimulationState &state,
                                DelegationRequest const &request, ProtocolOptions const &options,
                                std::span<const Candidate> candidates,
                                std::span<const double> candidate_tw, PathsOf &&paths_of, Rng &rng)
{
  Task const         &task    = world.tasks.at(request.task);
  AgentProfile const &trustor = world.profiles[request.trustor];

  DelegationTrace trace;
  trace.trustor = request.trustor;
  trace.task    = request.task;
  trace.epoch   = request.epoch;

  auto ranked = select_trustee(candidates, request.strategy);
  for (auto const &c : ranked)
  {
    auto pos = static_cast<std::size_t>(
        std::find_if(candidates.begin(), candidates.end(),
                     [&](Candidate const &x) { return x.node == c.node; }) -
        candidates.begin());
    trace.ranked.push_back(
        RankedCandidate{c.node, candidate_tw[pos], selection_score(c.record, request.strategy)});
  }

  Environment const &env = world.environment.at(request.epoch);

  if (options.allow_self_execution && trustor.is_trustee)
  {
    auto const *own  = state.store.find(request.trustor, request.trustor, Context::of_task(task.id()),
                                        TrustKind::service);
    TrustRecord self = own ? *own : options.prior.make(TrustKind::service);
    std::optional<TrustRecord> best;
    if (!ranked.empty())
    {
      best = ranked.front().record;
    }
    if (should_self_execute(self, best))
    {
      trace.chosen        = request.trustor;
      trace.self_executed = true;
      auto snapshot       = EnvSnapshot::capture(env, request.trustor, request.trustor, {});
      trace.outcome       = sample_outcome(trustor, trustor, task, std::move(snapshot), rng);
      trace.outcome->abusive = false;  // one's own resource
      detail::apply_update(state.store, request.trustor, request.trustor, task.id(), self,
                           *trace.outcome, options);
      return trace;
    }
  }

  for (auto const &c : ranked)
  {
    auto const &trustee  = world.profiles[c.node];
    auto        decision = reverse_evaluate(trustee, request.trustor, state.usage, task);
    if (!decision.accept)
    {
      trace.rejections.push_back(Rejection{c.node, decision.reverse_tw});
      continue;
    }
    trace.chosen = c.node;
    trace.paths  = paths_of(c.node);

    std::set<NodeId> mids;
    for (auto const &p : trace.paths)
    {
      mids.insert(p.intermediates().begin(), p.intermediates().end());
    }
    std::vector<NodeId> mid_list(mids.begin(), mids.end());
    auto snapshot = EnvSnapshot::capture(env, request.trustor, c.node, mid_list);
    trace.outcome = sample_outcome(trustor, trustee, task, std::move(snapshot), rng);

    detail::apply_update(state.store, request.trustor, c.node, task.id(), c.record,
                         *trace.outcome, options);

    if (options.update_recommenders)
    {
      std::set<std::pair<NodeId, NodeId>> seen;
      for (auto const &p : trace.paths)
      {
        for (std::size_t i = 0; i + 2 < p.nodes.size(); ++i)
        {
          auto hop = std::make_pair(p.nodes[i], p.nodes[i + 1]);
          if (!seen.insert(hop).second)
          {
            continue;
          }
          auto const *old  = state.store.find(hop.first, hop.second, Context::of_task(task.id()),
                                              TrustKind::recommendation);
          TrustRecord base = old ? *old : options.prior.make(TrustKind::recommendation);
          detail::apply_update(state.store, hop.first, hop.second, task.id(), base, *trace.outcome,
                               options);
        }
      }
    }

    state.usage.record(c.node, request.trustor, trace.outcome->abusive);
    return trace;
  }
  return trace;
}

/// One delegation following the mutual-evaluation protocol: discover
/// potential trustees, rank them, retry down the ranking on refusal, realize
/// the outcome and post-evaluate on both sides.
inline DelegationTrace run_delegation(WorldView const &world, SimulationState &state,
                                      DelegationRequest const &request,
                                      ProtocolOptions const &options, Rng &rng)
{
  Discovery           found = find_potential_trustees(world, state.store, request);
  std::vector<double> tws;
  for (auto const &pt : found.search.candidates)
  {
    tws.push_back(pt.tw);
  }
  auto paths_of = [&](NodeId n) {
    for (auto const &pt : found.search.candidates)
    {
      if (pt.node == n)
      {
        return pt.paths;
      }
    }
    return std::vector<TrustPath>{};
  };
  auto trace = delegate_ranked(world, state, request, options, found.candidates, tws, paths_of, rng);
  trace.interrogated = found.search.interrogated;
  return trace;
}

/// Delegation among the trustor's first-hand contacts only: every subject it
/// holds a service record about on the task. Skips the path search, so it is
/// the cheap protocol for experiments where trust is purely direct.
inline DelegationTrace run_direct_delegation(WorldView const &world, SimulationState &state,
                                             DelegationRequest const &request,
                                             ProtocolOptions const &options, Rng &rng)
{
  Context const          ctx = Context::of_task(request.task);
  std::vector<Candidate> candidates;
  std::vector<double>    tws;
  state.store.for_each_subject(request.trustor, [&](NodeId subject, TrustKind kind,
                                                    std::span<const TrustStore::Entry> entries) {
    if (kind != TrustKind::service || subject == request.trustor ||
        !world.profiles[subject].is_trustee)
    {
      return;
    }
    for (auto const &[c, rec] : entries)
    {
      if (c == ctx)
      {
        candidates.push_back(Candidate{subject, rec});
        tws.push_back(post_evaluate(rec));
      }
    }
  });
  auto paths_of = [&](NodeId n) {
    return std::vector<TrustPath>{TrustPath{{request.trustor, n}, 0.0}};
  };
  auto trace         = delegate_ranked(world, state, request, options, candidates, tws, paths_of, rng);
  trace.interrogated = candidates.size();
  for (auto &p : trace.paths)
  {
    auto it = std::find_if(trace.ranked.begin(), trace.ranked.end(),
                           [&](RankedCandidate const &r) { return r.node == p.nodes.back(); });
    if (it != trace.ranked.end())
    {
      p.value = it->tw;
    }
  }
  return trace;
}

// ---------------------------------------------------------------------------
// Trace serialization (one JSON object per delegation)

inline nlohmann::json to_json(DelegationTrace const &t)
{
  using nlohmann::json;
  json j;
  j["trustor"] = t.trustor;
  j["task"]    = t.task;
  j["epoch"]   = t.epoch;
  json ranked  = json::array();
  for (auto const &r : t.ranked)
  {
    ranked.push_back({{"node", r.node}, {"tw", r.tw}, {"score", r.score}});
  }
  j["ranked_candidates"] = std::move(ranked);
  json rej               = json::array();
  for (auto const &r : t.rejections)
  {
    rej.push_back({{"node", r.node}, {"reverse_tw", r.reverse_tw}});
  }
  j["rejections"] = std::move(rej);
  j["chosen"]     = t.chosen ? json(*t.chosen) : json("unavailable");
  j["self_executed"] = t.self_executed;
  if (t.outcome)
  {
    auto const &o = *t.outcome;
    j["outcome"]  = {{"success", o.success}, {"gain", o.gain},         {"damage", o.damage},
                     {"cost", o.cost},       {"abusive", o.abusive},
                     {"env", {{"trustor", o.env.trustor}, {"trustee", o.env.trustee},
                              {"intermediates", o.env.intermediates}}}};
  }
  else
  {
    j["outcome"] = nullptr;
  }
  j["nodes_interrogated"] = t.interrogated;
  json paths              = json::array();
  for (auto const &p : t.paths)
  {
    paths.push_back({{"nodes", p.nodes}, {"value", p.value}});
  }
  j["paths"] = std::move(paths);
  return j;
}

}  // namespace siot
