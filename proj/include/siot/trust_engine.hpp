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

// Scalar trust arithmetic: post-evaluation, forgetting-factor updates,
// environment correction, characteristic-based inference, trust transit along
// recommendation chains, reverse evaluation and trustee ranking.
//
// Everything here is a pure function of its arguments. Store-aware
// transitivity over paths lives in transitivity.hpp.

#include "siot/domain.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace siot {

enum class TransitivityMethod : std::uint8_t
{
  traditional,
  conservative,
  aggressive,
};

inline char const *to_string(TransitivityMethod m)
{
  switch (m)
  {
  case TransitivityMethod::traditional:
    return "traditional";
  case TransitivityMethod::conservative:
    return "conservative";
  case TransitivityMethod::aggressive:
    return "aggressive";
  }
  return "?";
}

inline TransitivityMethod parse_method(std::string const &name)
{
  if (name == "traditional")
  {
    return TransitivityMethod::traditional;
  }
  if (name == "conservative")
  {
    return TransitivityMethod::conservative;
  }
  if (name == "aggressive")
  {
    return TransitivityMethod::aggressive;
  }
  throw std::invalid_argument("unknown transitivity method '" + name + "'");
}

struct TransitivityParams
{
  double             omega1{0.6};  // gate on recommendation trust
  double             omega2{0.6};  // gate on the last hop's task trust
  std::size_t        max_hops{3};
  TransitivityMethod method{TransitivityMethod::conservative};

  void validate() const
  {
    if (!in_unit_interval(omega1) || !in_unit_interval(omega2))
    {
      throw std::invalid_argument("omega thresholds must lie in [0, 1]");
    }
    if (max_hops < 1 || max_hops > 8)
    {
      throw std::invalid_argument("max_hops must lie in [1, 8]");
    }
  }
};

/// Forgetting factors, one per estimate.
struct UpdateParams
{
  double beta_s{0.1};
  double beta_g{0.1};
  double beta_d{0.1};
  double beta_c{0.1};

  static UpdateParams uniform(double beta)
  {
    return UpdateParams{beta, beta, beta, beta};
  }

  void validate() const
  {
    for (double b : {beta_s, beta_g, beta_d, beta_c})
    {
      if (!(b >= 0.0 && b <= 1.0))
      {
        throw std::invalid_argument("forgetting factors must lie in [0, 1]");
      }
    }
  }
};

// ---------------------------------------------------------------------------
// Post-evaluation

/// Affine map of the net-profit range [-2, 1] onto [0, 1]. Out-of-range input
/// is clamped.
constexpr double normalize(double raw) noexcept
{
  double const v = (raw + 2.0) / 3.0;
  return v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
}

/// Expected gain minus expected damage minus cost.
constexpr double net_profit(TrustRecord const &r) noexcept
{
  return r.s_hat * r.g_hat - (1.0 - r.s_hat) * r.d_hat - r.c_hat;
}

/// Normalized post-evaluation: the scalar trustworthiness of a record.
constexpr double post_evaluate(TrustRecord const &r) noexcept
{
  return normalize(net_profit(r));
}

/// A record carrying only a scalar trustworthiness `tw`. It satisfies
/// s_hat == tw and post_evaluate(result) == tw, so both ranking strategies
/// see the same value; used for candidates known only through inference or
/// transit.
constexpr TrustRecord record_from_trust(double tw, TrustKind kind = TrustKind::service) noexcept
{
  double const t = tw < 0.0 ? 0.0 : (tw > 1.0 ? 1.0 : tw);
  return TrustRecord{t, 1.0, 1.0, 1.0 - t, 0, kind};
}

// ---------------------------------------------------------------------------
// Updates

constexpr double forget(double beta, double old_value, double realized) noexcept
{
  return beta * old_value + (1.0 - beta) * realized;
}

inline TrustRecord update_estimates(TrustRecord record, RealizedResult const &realized,
                                    UpdateParams const &params)
{
  record.s_hat = forget(params.beta_s, record.s_hat, realized.success);
  record.g_hat = forget(params.beta_g, record.g_hat, realized.gain);
  record.d_hat = forget(params.beta_d, record.d_hat, realized.damage);
  record.c_hat = forget(params.beta_c, record.c_hat, realized.cost);
  ++record.interaction_count;
  return record;
}

inline TrustRecord update_estimates(TrustRecord const &record, DelegationOutcome const &outcome,
                                    UpdateParams const &params)
{
  return update_estimates(record, RealizedResult::from(outcome), params);
}

/// Removes the environment's influence on a realized quantity: divides by the
/// worst environment along the delegation and clamps to [0, 1]. With an ideal
/// environment the value passes through untouched.
inline double env_correct(double min_env, double realized)
{
  if (!(min_env > 0.0 && min_env <= 1.0))
  {
    throw std::invalid_argument("environment values must lie in (0, 1]");
  }
  if (min_env == 1.0)
  {
    return realized;
  }
  return std::clamp(realized / min_env, 0.0, 1.0);
}

inline double env_correct(EnvSnapshot const &env, double realized)
{
  return env_correct(env.min(), realized);
}

inline double env_correct(Environment const &env, NodeId trustor, NodeId trustee,
                          std::span<const NodeId> intermediates, double realized)
{
  return env_correct(EnvSnapshot::capture(env, trustor, trustee, intermediates), realized);
}

/// update_estimates with every realized quantity passed through env_correct
/// first. Damage and cost are corrected by the same rule as success.
inline TrustRecord update_estimates_env(TrustRecord const &record, RealizedResult realized,
                                        EnvSnapshot const &env, UpdateParams const &params)
{
  double const m   = env.min();
  realized.success = env_correct(m, realized.success);
  realized.gain    = env_correct(m, realized.gain);
  realized.damage  = env_correct(m, realized.damage);
  realized.cost    = env_correct(m, realized.cost);
  return update_estimates(record, realized, params);
}

inline TrustRecord update_estimates_env(TrustRecord const &record,
                                        DelegationOutcome const &outcome,
                                        UpdateParams const &params)
{
  return update_estimates_env(record, RealizedResult::from(outcome), outcome.env, params);
}

// ---------------------------------------------------------------------------
// Inference across analogous tasks

/// A previously experienced task and the trustworthiness observed on it.
struct TaskTrust
{
  Task const *task{nullptr};
  double      tw{0.0};
};

/// Weighted mean of history trust over the tasks containing `target`, each
/// weighted by the characteristic's weight in that task. nullopt when no
/// history task contains it.
inline std::optional<double> infer_characteristic_tw(std::span<const TaskTrust> history,
                                                     CharacteristicId           target)
{
  double num = 0.0;
  double den = 0.0;
  for (auto const &h : history)
  {
    double const w = h.task->weight_of(target);
    if (w > 0.0)
    {
      num += w * h.tw;
      den += w;
    }
  }
  if (den == 0.0)
  {
    return std::nullopt;
  }
  return num / den;
}

/// Trust toward a new task, built characteristic by characteristic. nullopt
/// unless every characteristic of `target` is covered by some history task.
inline std::optional<double> infer_task_tw(std::span<const TaskTrust> history, Task const &target)
{
  double tw = 0.0;
  for (auto const &part : target.parts())
  {
    auto c = infer_characteristic_tw(history, part.characteristic);
    if (!c)
    {
      return std::nullopt;
    }
    tw += part.weight * *c;
  }
  return tw;
}

// ---------------------------------------------------------------------------
// Transit along a recommendation chain

/// Trust passed through one recommender: agreement of a trusted recommender
/// plus the case where a distrusted recommender is wrong. Note that two low
/// inputs also combine to a high value; callers gate inputs with omega first.
constexpr double transit_pair(double tw_rec, double tw_task) noexcept
{
  return tw_rec * tw_task + (1.0 - tw_rec) * (1.0 - tw_task);
}

/// Plain product along the path, no context and no gates.
inline double transit_traditional(std::span<const double> path_tws)
{
  if (path_tws.empty())
  {
    throw std::invalid_argument("transit_traditional needs a nonempty path");
  }
  double v = 1.0;
  for (double t : path_tws)
  {
    v *= t;
  }
  return v;
}

/// Gate check for a chain whose entries are recommendation trusts followed by
/// one task trust.
inline bool chain_passes(std::span<const double> tws, TransitivityParams const &params)
{
  for (std::size_t i = 0; i + 1 < tws.size(); ++i)
  {
    if (tws[i] < params.omega1)
    {
      return false;
    }
  }
  return tws.back() >= params.omega2;
}

/// Left fold of transit_pair over [rec..., task]; nullopt when a gate fails.
inline std::optional<double> transit_chain(std::span<const double> tws,
                                           TransitivityParams const &params)
{
  if (tws.size() < 2)
  {
    throw std::invalid_argument("transit_chain needs a recommender and a task trust");
  }
  if (!chain_passes(tws, params))
  {
    return std::nullopt;
  }
  double v = tws.front();
  for (std::size_t i = 1; i < tws.size(); ++i)
  {
    v = transit_pair(v, tws[i]);
  }
  return v;
}

// ---------------------------------------------------------------------------
// Reverse evaluation

/// Laplace-smoothed share of responsive uses.
constexpr double reverse_trust(UsageCounts const &c) noexcept
{
  return (static_cast<double>(c.responsive) + 1.0) / (static_cast<double>(c.total) + 2.0);
}

struct ReverseDecision
{
  bool   accept{false};
  double reverse_tw{0.0};
  double threshold{0.0};
};

/// The trustee's check of a trustor from its own usage records.
inline ReverseDecision reverse_evaluate(AgentProfile const &trustee, NodeId trustor,
                                        UsageLog const &log, Task const &task)
{
  ReverseDecision d;
  d.reverse_tw = reverse_trust(log.counts(trustee.node, trustor));
  d.threshold  = trustee.threshold_for(task.id());
  d.accept     = d.reverse_tw >= d.threshold;
  return d;
}

// ---------------------------------------------------------------------------
// Selection

enum class SelectionStrategy : std::uint8_t
{
  success_only,
  full_profit,
};

inline char const *to_string(SelectionStrategy s)
{
  return s == SelectionStrategy::success_only ? "success_only" : "full_profit";
}

inline SelectionStrategy parse_strategy(std::string const &name)
{
  if (name == "success_only")
  {
    return SelectionStrategy::success_only;
  }
  if (name == "full_profit")
  {
    return SelectionStrategy::full_profit;
  }
  throw std::invalid_argument("unknown selection strategy '" + name + "'");
}

struct Candidate
{
  NodeId      node{0};
  TrustRecord record;
};

inline double selection_score(TrustRecord const &r, SelectionStrategy s) noexcept
{
  return s == SelectionStrategy::success_only ? r.s_hat : net_profit(r);
}

/// Candidates best-first; ties go to the lower node id. Empty output means
/// nobody is available.
inline std::vector<Candidate> select_trustee(std::span<const Candidate> candidates,
                                             SelectionStrategy          strategy)
{
  std::vector<Candidate> ranked(candidates.begin(), candidates.end());
  std::stable_sort(ranked.begin(), ranked.end(), [strategy](Candidate const &a, Candidate const &b) {
    double const sa = selection_score(a.record, strategy);
    double const sb = selection_score(b.record, strategy);
    if (sa != sb)
    {
      return sa > sb;
    }
    return a.node < b.node;
  });
  return ranked;
}

/// True when doing the task oneself is at least as profitable as the best
/// other candidate; only a strictly better candidate gets the task.
inline bool should_self_execute(TrustRecord const &self_record,
                                std::optional<TrustRecord> const &best_other)
{
  if (!best_other)
  {
    return true;
  }
  return net_profit(self_record) >= net_profit(*best_other);
}

}  // namespace siot
