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

#include "siot/delegation.hpp"
#include "siot/domain.hpp"
#include "siot/graph.hpp"
#include "siot/metrics.hpp"
#include "siot/rng.hpp"
#include "siot/scenario.hpp"
#include "siot/transitivity.hpp"
#include "siot/trust_engine.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <atomic>
#include <cstdio>
#include <exception>
#include <mutex>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace siot {

enum class ExperimentKind : std::uint8_t
{
  mutuality,
  inference,
  transitivity,
  profit,
  environment,
};

inline char const *to_string(ExperimentKind k)
{
  switch (k)
  {
    case ExperimentKind::mutuality: return "mutuality";
    case ExperimentKind::inference: return "inference";
    case ExperimentKind::transitivity: return "transitivity";
    case ExperimentKind::profit: return "profit";
    case ExperimentKind::environment: return "environment";
  }
  return "?";
}

inline constexpr ExperimentKind kAllExperiments[] = {
    ExperimentKind::mutuality, ExperimentKind::inference, ExperimentKind::transitivity,
    ExperimentKind::profit, ExperimentKind::environment};

struct ExperimentResult
{
  std::string              name;
  std::size_t              runs{0};
  std::vector<MetricsRow>  rows;
  std::vector<PlotSpec>    plots;
  std::vector<std::string> trace;  // one JSON object per line, first run only
  nlohmann::json           parameters;
};

// ---------------------------------------------------------------------------
// Plumbing

/// Evaluates fn(0..n-1) on up to `jobs` threads. Results land at their run
/// index, so the output does not depend on scheduling.
template <class R, class Fn>
std::vector<R> parallel_runs(std::size_t n, std::size_t jobs, Fn const &fn)
{
  std::vector<R> out(n);
  jobs = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(n, 1));
  if (jobs == 1)
  {
    for (std::size_t i = 0; i < n; ++i)
    {
      out[i] = fn(i);
    }
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr       error;
  std::mutex               error_mutex;
  {
    std::vector<std::jthread> pool;
    for (std::size_t j = 0; j < jobs; ++j)
    {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++)
        {
          try
          {
            out[i] = fn(i);
          }
          catch (...)
          {
            std::lock_guard lock{error_mutex};
            if (!error)
            {
              error = std::current_exception();
            }
          }
        }
      });
    }
  }
  if (error)
  {
    std::rethrow_exception(error);
  }
  return out;
}

/// Shortest round-trip-free rendering for parameter labels ("0.3", "4").
inline std::string format_number(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

inline std::uint64_t stream_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> path)
{
  for (auto p : path)
  {
    seed = derive_seed(seed, p);
  }
  return seed;
}

inline std::vector<AgentProfile> make_profiles(SocialGraph const &g, RoleAssignment const &roles)
{
  std::vector<AgentProfile> p(g.node_count());
  for (NodeId n = 0; n < p.size(); ++n)
  {
    p[n].node = n;
  }
  for (NodeId n : roles.trustors)
  {
    p[n].is_trustor = true;
  }
  for (NodeId n : roles.trustees)
  {
    p[n].is_trustee = true;
  }
  return p;
}

inline std::vector<NodeId> trustee_neighbors(SocialGraph const &g,
                                             std::vector<AgentProfile> const &profiles, NodeId x)
{
  std::vector<NodeId> out;
  for (NodeId y : g.neighbors(x))
  {
    if (y != x && profiles[y].is_trustee)
    {
      out.push_back(y);
    }
  }
  return out;
}

namespace detail {

/// Delegation tallies of one parameter point. success + failure +
/// unavailable == requests.
struct Tally
{
  std::size_t requests{0};
  std::size_t successes{0};
  std::size_t failures{0};
  std::size_t unavailable{0};
  std::size_t uses{0};
  std::size_t abusive{0};
  double      candidates{0.0};
  double      interrogated{0.0};

  void add(DelegationTrace const &t)
  {
    ++requests;
    candidates += static_cast<double>(t.ranked.size());
    interrogated += static_cast<double>(t.interrogated);
    if (!t.outcome)
    {
      ++unavailable;
      return;
    }
    (t.outcome->success ? successes : failures) += 1;
    ++uses;
    abusive += t.outcome->abusive ? 1 : 0;
  }

  double rate(std::size_t k) const
  {
    return requests == 0 ? 0.0 : static_cast<double>(k) / static_cast<double>(requests);
  }
};

inline std::string trace_line(DelegationTrace const &t, char const *experiment,
                              std::string const &param, std::size_t run)
{
  auto j          = to_json(t);
  j["experiment"] = experiment;
  j["param"]      = param;
  j["run"]        = run;
  return j.dump();
}

inline void push_row(std::vector<MetricsRow> &rows, char const *experiment, std::string param,
                     std::size_t run, std::string metric, double value)
{
  rows.push_back(MetricsRow{experiment, std::move(param), run, std::move(metric), value});
}

/// Aggregate-only rows for a per-iteration series: one mean and one sd row
/// per index, labelled `<prefix>;<index_name>=<i+1>`.
inline void push_series(std::vector<MetricsRow> &rows, char const *experiment,
                        std::string const &prefix, char const *index_name, char const *metric,
                        std::vector<std::vector<double>> const &per_run)
{
  if (per_run.empty())
  {
    return;
  }
  std::size_t const len = per_run.front().size();
  for (std::size_t i = 0; i < len; ++i)
  {
    std::vector<double> xs;
    xs.reserve(per_run.size());
    for (auto const &run : per_run)
    {
      xs.push_back(run[i]);
    }
    auto const  ms    = mean_sd(xs);
    std::string param = prefix + ";" + index_name + "=" + std::to_string(i + 1);
    rows.push_back(MetricsRow{experiment, param, std::nullopt, metric, ms.mean});
    rows.push_back(MetricsRow{experiment, param, std::nullopt, std::string{metric} + "_sd", ms.sd});
  }
}

inline std::vector<double> series_mean(std::vector<std::vector<double>> const &per_run)
{
  std::vector<double> out(per_run.empty() ? 0 : per_run.front().size(), 0.0);
  for (std::size_t i = 0; i < out.size(); ++i)
  {
    std::vector<double> xs;
    for (auto const &run : per_run)
    {
      xs.push_back(run[i]);
    }
    out[i] = mean_sd(xs).mean;
  }
  return out;
}

inline std::vector<double> iota_x(std::size_t n)
{
  std::vector<double> x(n);
  std::iota(x.begin(), x.end(), 1.0);
  return x;
}

inline TrustRecord observed_record(double s, double g, double d, double c,
                                   TrustKind kind = TrustKind::service)
{
  return TrustRecord{s, g, d, c, 0, kind};
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Mutual evaluation: trustees refuse trustors with a poor usage history.

/// Trustor integrity is uniform in [0, 1]; every trustee starts with
/// `history_uses` logged uses from each trustor neighbour. For each reverse
/// threshold every trustor delegates a common task once per round; the same
/// random streams are replayed at every threshold.
inline ExperimentResult exp_mutuality(SocialGraph const &g, Scenario const &sc)
{
  auto const &cfg  = sc.mutuality;
  char const *name = "mutuality";
  struct RunOut
  {
    std::vector<detail::Tally> tallies;
    std::vector<std::string>   trace;
  };

  auto runs = parallel_runs<RunOut>(cfg.runs, sc.jobs, [&](std::size_t run) {
    std::uint64_t const seed = derive_seed(sc.seed, run);
    Rng                 rng  = make_rng(stream_seed(seed, {0}));
    auto                roles    = sample_roles(g, sc.role_fraction, rng, sc.disjoint_roles);
    auto                profiles = make_profiles(g, roles);
    for (auto &p : profiles)
    {
      p.competence = {uniform01(rng)};
      p.integrity  = uniform01(rng);
      p.terms      = ServiceTerms{1.0, 1.0, 0.0};
    }
    TaskRegistry tasks;
    Task const  &task = tasks.add(make_task(0, {{0, 1.0}}));

    SimulationState base;
    for (NodeId x : roles.trustors)
    {
      for (NodeId y : trustee_neighbors(g, profiles, x))
      {
        base.store.put(x, y, Context::of_task(task.id()),
                       detail::observed_record(profiles[y].competence[0], 1.0, 1.0, 0.0));
        for (std::size_t h = 0; h < cfg.history_uses; ++h)
        {
          base.usage.record(y, x, bernoulli(rng, 1.0 - profiles[x].integrity));
        }
      }
    }

    EnvironmentSchedule env;
    ProtocolOptions     options{sc.update, sc.prior};
    RunOut              out;
    for (double theta : cfg.thetas)
    {
      auto world_profiles = profiles;
      for (auto &p : world_profiles)
      {
        p.reverse_threshold = theta;
      }
      WorldView       world{g, tasks, world_profiles, env};
      SimulationState state = base;
      detail::Tally   tally;
      std::string const param = "theta=" + format_number(theta);
      for (std::size_t round = 0; round < cfg.rounds; ++round)
      {
        for (NodeId x : roles.trustors)
        {
          Rng               rr = make_rng(stream_seed(seed, {1 + round, x}));
          DelegationRequest req{x, task.id(), SelectionStrategy::full_profit, sc.transitivity,
                                0};
          auto trace = run_direct_delegation(world, state, req, options, rr);
          tally.add(trace);
          if (sc.trace && run == 0)
          {
            out.trace.push_back(detail::trace_line(trace, name, param, run));
          }
        }
      }
      out.tallies.push_back(tally);
    }
    return out;
  });

  ExperimentResult res;
  res.name = name;
  res.runs = cfg.runs;
  for (std::size_t run = 0; run < runs.size(); ++run)
  {
    for (std::size_t i = 0; i < cfg.thetas.size(); ++i)
    {
      auto const       &t     = runs[run].tallies[i];
      std::string const param = "theta=" + format_number(cfg.thetas[i]);
      auto push = [&](char const *m, double v) { detail::push_row(res.rows, name, param, run, m, v); };
      push("requests", static_cast<double>(t.requests));
      push("successes", static_cast<double>(t.successes));
      push("failures", static_cast<double>(t.failures));
      push("unavailable", static_cast<double>(t.unavailable));
      push("uses", static_cast<double>(t.uses));
      push("success_rate", t.rate(t.successes));
      push("unavailable_rate", t.rate(t.unavailable));
      push("abuse_rate", t.uses == 0 ? 0.0
                                     : static_cast<double>(t.abusive) / static_cast<double>(t.uses));
      push("zero_use", t.uses == 0 ? 1.0 : 0.0);
    }
    if (run == 0)
    {
      res.trace = std::move(runs[run].trace);
    }
  }
  append_aggregates(res.rows);

  PlotSpec plot{"mutuality", "Mutual evaluation", "reverse threshold", "rate", {}};
  for (char const *m : {"success_rate", "unavailable_rate", "abuse_rate"})
  {
    Series s{m, {}, {}};
    for (double theta : cfg.thetas)
    {
      s.x.push_back(theta);
      s.y.push_back(find_aggregate(res.rows, "theta=" + format_number(theta), m).value_or(0.0));
    }
    plot.series.push_back(std::move(s));
  }
  res.plots.push_back(std::move(plot));
  return res;
}

// ---------------------------------------------------------------------------
// Inference: choose a trustee for a never-seen task from analogous history.

/// Four characteristics; history tasks {a0,a2}, {a1,a2} and {a3}; the request
/// is {a0,a1}. Dishonest trustees performed worse on the tainted
/// characteristic. Without inference every candidate looks alike and the
/// lowest id wins.
inline ExperimentResult exp_inference(SocialGraph const &g, Scenario const &sc)
{
  auto const &cfg  = sc.inference;
  char const *name = "inference";
  struct RunOut
  {
    std::size_t trustors{0};
    std::size_t honest_with{0};
    std::size_t honest_without{0};
  };

  auto runs = parallel_runs<RunOut>(cfg.runs, sc.jobs, [&](std::size_t run) {
    std::uint64_t const seed     = derive_seed(sc.seed, run);
    Rng                 rng      = make_rng(stream_seed(seed, {0}));
    auto                roles    = sample_roles(g, sc.role_fraction, rng, sc.disjoint_roles);
    auto                profiles = make_profiles(g, roles);

    TaskRegistry tasks;
    tasks.add(make_task(0, {{0, 0.5}, {2, 0.5}}));
    tasks.add(make_task(1, {{1, 0.5}, {2, 0.5}}));
    tasks.add(make_task(2, {{3, 1.0}}));
    Task const &target = tasks.add(make_task(3, {{0, 0.5}, {1, 0.5}}));

    std::optional<CharacteristicId> tainted;
    if (cfg.taint == Taint::related)
    {
      tainted = 0;
    }
    else if (cfg.taint == Taint::unrelated)
    {
      tainted = 3;
    }
    for (auto &p : profiles)
    {
      p.competence.resize(4);
      for (auto &c : p.competence)
      {
        c = uniform(rng, cfg.competence_lo, cfg.competence_hi);
      }
      p.honest = !bernoulli(rng, cfg.dishonest_fraction);
      if (!p.honest && tainted)
      {
        p.competence[*tainted] *= 1.0 - cfg.penalty;
      }
    }

    TrustStore store;
    for (NodeId x : roles.trustors)
    {
      for (NodeId y : trustee_neighbors(g, profiles, x))
      {
        for (TaskId t = 0; t < 3; ++t)
        {
          double const s = profiles[y].success_probability(tasks.at(t));
          store.put(x, y, Context::of_task(t), detail::observed_record(s, 1.0, 1.0, 0.0));
        }
      }
    }

    TrusteeFinder      finder{g, store, tasks, profiles};
    TransitivityParams direct = sc.transitivity;
    direct.method             = TransitivityMethod::conservative;
    direct.max_hops           = 1;

    RunOut out;
    for (NodeId x : roles.trustors)
    {
      auto nbrs = trustee_neighbors(g, profiles, x);
      if (nbrs.empty())
      {
        continue;
      }
      ++out.trustors;

      std::vector<Candidate> inferred;
      for (auto const &pt : finder.find(x, target, direct).candidates)
      {
        inferred.push_back(Candidate{pt.node, record_from_trust(pt.tw)});
      }
      auto with = select_trustee(inferred, SelectionStrategy::full_profit);
      if (!with.empty() && profiles[with.front().node].honest)
      {
        ++out.honest_with;
      }

      std::vector<Candidate> blind;
      for (NodeId y : nbrs)
      {
        blind.push_back(Candidate{y, sc.prior.make(TrustKind::service)});
      }
      auto without = select_trustee(blind, SelectionStrategy::full_profit);
      if (profiles[without.front().node].honest)
      {
        ++out.honest_without;
      }
    }
    return out;
  });

  ExperimentResult res;
  res.name = name;
  res.runs = cfg.runs;
  std::string const param = std::string{"taint="} + detail::to_string(cfg.taint);
  Series            with{"with_inference", {}, {}}, without{"without_inference", {}, {}};
  for (std::size_t run = 0; run < runs.size(); ++run)
  {
    auto const  &r   = runs[run];
    double const n   = static_cast<double>(std::max<std::size_t>(r.trustors, 1));
    double const pw  = 100.0 * static_cast<double>(r.honest_with) / n;
    double const pwo = 100.0 * static_cast<double>(r.honest_without) / n;
    detail::push_row(res.rows, name, param, run, "trustors", static_cast<double>(r.trustors));
    detail::push_row(res.rows, name, param, run, "honest_pct_with", pw);
    detail::push_row(res.rows, name, param, run, "honest_pct_without", pwo);
    detail::push_row(res.rows, name, param, run, "improvement_pp", pw - pwo);
    with.x.push_back(static_cast<double>(run + 1));
    with.y.push_back(pw);
    without.x.push_back(static_cast<double>(run + 1));
    without.y.push_back(pwo);
  }
  append_aggregates(res.rows);
  res.plots.push_back(PlotSpec{"inference", "Trustee selection with and without inference", "run",
                               "honest trustees selected (%)", {with, without}});
  return res;
}

// ---------------------------------------------------------------------------
// Transitivity: reach trustees through recommenders.

namespace detail {

/// Random world for one characteristic count: tasks are the weighted pairs of
/// characteristics; each node has experience with `tasks_per_node` tasks,
/// holds service records about a few trustee neighbours on each of those tasks
/// and
/// recommendation records, mirroring the recommender's tasks, about a few
/// neighbours.
struct TransitivityWorld
{
  TaskRegistry              tasks;
  std::vector<AgentProfile> profiles;
  RoleAssignment            roles;
  TrustStore                store;
};

inline TransitivityWorld build_transitivity_world(SocialGraph const &g, Scenario const &sc,
                                                  std::size_t k, Rng &rng)
{
  auto const       &cfg = sc.transitivity_experiment;
  TransitivityWorld w;
  w.roles    = sample_roles(g, sc.role_fraction, rng, sc.disjoint_roles);
  w.profiles = make_profiles(g, w.roles);

  std::map<std::pair<CharacteristicId, CharacteristicId>, TaskId> pair_task;
  for (CharacteristicId a = 0; a < k; ++a)
  {
    for (CharacteristicId b = a + 1; b < k; ++b)
    {
      double const w_a = uniform(rng, 0.3, 0.7);
      TaskId const id  = static_cast<TaskId>(w.tasks.size());
      w.tasks.add(make_task(id, {{a, w_a}, {b, 1.0 - w_a}}));
      pair_task[{a, b}] = id;
    }
  }
  std::vector<TaskId> universe(w.tasks.size());
  std::iota(universe.begin(), universe.end(), TaskId{0});

  std::vector<std::vector<TaskId>> experienced(g.node_count());
  std::vector<double>              honesty(g.node_count());
  for (NodeId v = 0; v < g.node_count(); ++v)
  {
    std::vector<TaskId> pool;
    if (cfg.use_features)
    {
      auto const &f = g.features(v);
      for (CharacteristicId a = 0; a < f.size(); ++a)
      {
        for (CharacteristicId b = a + 1; b < f.size(); ++b)
        {
          if (f[a] && f[b])
          {
            pool.push_back(pair_task.at({a, b}));
          }
        }
      }
    }
    if (pool.size() < cfg.tasks_per_node)
    {
      pool = universe;
    }
    std::sample(pool.begin(), pool.end(), std::back_inserter(experienced[v]), cfg.tasks_per_node,
                rng);
    auto &p = w.profiles[v];
    p.competence.resize(k);
    for (auto &c : p.competence)
    {
      c = uniform(rng, cfg.competence_lo, 1.0);
    }
    p.terms    = ServiceTerms{1.0, 1.0, 0.0};
    honesty[v] = uniform01(rng);
  }

  for (NodeId v = 0; v < g.node_count(); ++v)
  {
    auto                nbrs = trustee_neighbors(g, w.profiles, v);
    std::vector<NodeId> contacts;
    std::sample(nbrs.begin(), nbrs.end(), std::back_inserter(contacts), cfg.service_contacts, rng);
    for (TaskId t : experienced[v])
    {
      for (NodeId y : contacts)
      {
        double const s = w.profiles[y].success_probability(w.tasks.at(t));
        w.store.put(v, y, Context::of_task(t), observed_record(s, 1.0, 1.0, 0.0));
      }
    }
  }
  for (NodeId u = 0; u < g.node_count(); ++u)
  {
    auto                nbrs = g.neighbors(u);
    std::vector<NodeId> contacts;
    std::sample(nbrs.begin(), nbrs.end(), std::back_inserter(contacts),
                cfg.recommendation_contacts, rng);
    for (NodeId v : contacts)
    {
      for (TaskId t : experienced[v])
      {
        w.store.put(u, v, Context::of_task(t),
                    observed_record(honesty[v], 1.0, 1.0, 0.0, TrustKind::recommendation));
      }
    }
  }
  return w;
}

}  // namespace detail

/// For every characteristic count and method, each trustor requests random
/// tasks. Methods share the world and replay the same request streams.
inline ExperimentResult exp_transitivity(SocialGraph const &g, Scenario const &sc)
{
  auto const &cfg  = sc.transitivity_experiment;
  char const *name = "transitivity";

  std::vector<std::size_t> points = cfg.characteristics;
  if (cfg.use_features)
  {
    if (!g.has_features() || g.feature_count() < 2)
    {
      throw std::invalid_argument("feature mode needs a graph with at least two features");
    }
    points = {g.feature_count()};
  }
  auto param_of = [&](std::size_t k, TransitivityMethod m) {
    return "k=" + std::to_string(k) + ";method=" + to_string(m);
  };

  struct RunOut
  {
    std::vector<detail::Tally> tallies;  // [point][method]
    std::vector<std::string>   trace;
  };

  auto runs = parallel_runs<RunOut>(cfg.runs, sc.jobs, [&](std::size_t run) {
    std::uint64_t const seed = derive_seed(sc.seed, run);
    RunOut              out;
    for (std::size_t pi = 0; pi < points.size(); ++pi)
    {
      Rng  rng   = make_rng(stream_seed(seed, {0, pi}));
      auto world = detail::build_transitivity_world(g, sc, points[pi], rng);
      EnvironmentSchedule env;
      ProtocolOptions     options{sc.update, sc.prior};
      for (auto method : cfg.methods)
      {
        SimulationState state{world.store, {}};
        WorldView       view{g, world.tasks, world.profiles, env};
        TransitivityParams params = sc.transitivity;
        params.method             = method;
        detail::Tally tally;
        for (NodeId x : world.roles.trustors)
        {
          for (std::size_t q = 0; q < cfg.requests_per_trustor; ++q)
          {
            Rng rr = make_rng(stream_seed(seed, {1 + pi, x, q}));
            std::uniform_int_distribution<std::size_t> pick{0, world.tasks.size() - 1};
            auto const        task = static_cast<TaskId>(pick(rr));
            DelegationRequest req{x, task, SelectionStrategy::full_profit, params, 0};
            auto              trace = run_delegation(view, state, req, options, rr);
            tally.add(trace);
            if (sc.trace && run == 0)
            {
              out.trace.push_back(detail::trace_line(trace, name, param_of(points[pi], method), run));
            }
          }
        }
        out.tallies.push_back(tally);
      }
    }
    return out;
  });

  ExperimentResult res;
  res.name = name;
  res.runs = cfg.runs;
  for (std::size_t run = 0; run < runs.size(); ++run)
  {
    std::size_t idx = 0;
    for (std::size_t k : points)
    {
      for (auto method : cfg.methods)
      {
        auto const &t     = runs[run].tallies[idx++];
        auto const  param = param_of(k, method);
        auto push = [&](char const *m, double v) { detail::push_row(res.rows, name, param, run, m, v); };
        double const n = static_cast<double>(std::max<std::size_t>(t.requests, 1));
        push("requests", static_cast<double>(t.requests));
        push("successes", static_cast<double>(t.successes));
        push("failures", static_cast<double>(t.failures));
        push("unavailable", static_cast<double>(t.unavailable));
        push("success_rate", t.rate(t.successes));
        push("unavailable_rate", t.rate(t.unavailable));
        push("potential_trustees", t.candidates / n);
        push("interrogated", t.interrogated / n);
      }
    }
    if (run == 0)
    {
      res.trace = std::move(runs[run].trace);
    }
  }
  append_aggregates(res.rows);

  struct Figure
  {
    char const *metric;
    char const *title;
  };
  for (auto [metric, title] : {Figure{"success_rate", "Success rate"},
                               Figure{"unavailable_rate", "Unavailable rate"},
                               Figure{"potential_trustees", "Potential trustees"},
                               Figure{"interrogated", "Interrogated nodes"}})
  {
    PlotSpec plot{std::string{"transitivity_"} + metric, title, "characteristics", title, {}};
    for (auto method : cfg.methods)
    {
      Series s{to_string(method), {}, {}};
      for (std::size_t k : points)
      {
        s.x.push_back(static_cast<double>(k));
        s.y.push_back(find_aggregate(res.rows, param_of(k, method), metric).value_or(0.0));
      }
      plot.series.push_back(std::move(s));
    }
    res.plots.push_back(std::move(plot));
  }
  return res;
}

// ---------------------------------------------------------------------------
// Profit: rank by success alone or by the full net-profit estimate.

namespace detail {

/// Trustees with the given terms; trustors know each trustee neighbour's
/// advertised terms. `attack` makes a share of trustees inflate their cost.
struct ProfitWorld
{
  TaskRegistry              tasks;
  std::vector<AgentProfile> profiles;
  RoleAssignment            roles;
  TrustStore                store;
};

inline ProfitWorld build_profit_world(SocialGraph const &g, Scenario const &sc, bool attack,
                                      Rng &rng)
{
  ProfitWorld w;
  w.tasks.add(make_task(0, {{0, 1.0}}));
  w.roles    = sample_roles(g, sc.role_fraction, rng, sc.disjoint_roles);
  w.profiles = make_profiles(g, w.roles);
  for (auto &p : w.profiles)
  {
    double const s = uniform01(rng);
    double const gain = uniform01(rng);
    double const damage = uniform01(rng);
    double const cost = attack ? uniform(rng, 0.0, 0.3) : uniform01(rng);
    p.competence = {s};
    p.terms      = ServiceTerms{gain, damage, cost};
    if (attack && bernoulli(rng, sc.profit.attacker_fraction))
    {
      p.honest          = false;
      p.cost_multiplier = sc.profit.cost_multiplier;
    }
  }
  for (NodeId x : w.roles.trustors)
  {
    for (NodeId y : trustee_neighbors(g, w.profiles, x))
    {
      auto const &p = w.profiles[y];
      w.store.put(x, y, Context::of_task(0),
                  observed_record(p.competence[0], p.terms.gain, p.terms.damage, p.terms.cost));
    }
  }
  return w;
}

struct ProfitSeries
{
  std::vector<double> realized;
  std::vector<double> expected;
};

/// Every trustor with a candidate delegates once per step. Returns the mean
/// realized net profit, mean ground-truth expected profit of the chosen
/// trustees and mean realized cost per step.
inline void run_profit_steps(SocialGraph const &g, ProfitWorld const &w, Scenario const &sc,
                             SelectionStrategy strategy, std::uint64_t seed, std::uint64_t stream,
                             std::size_t steps, ProfitSeries *profit, std::vector<double> *cost,
                             std::vector<std::string> *trace, std::string const &param)
{
  EnvironmentSchedule env;
  WorldView           view{g, w.tasks, w.profiles, env};
  SimulationState     state{w.store, {}};
  ProtocolOptions     options{sc.update, sc.prior};
  for (std::size_t step = 0; step < steps; ++step)
  {
    double      realized = 0.0, expected = 0.0, spent = 0.0;
    std::size_t n        = 0;
    for (NodeId x : w.roles.trustors)
    {
      Rng               rr = make_rng(stream_seed(seed, {stream, step, x}));
      DelegationRequest req{x, 0, strategy, sc.transitivity, 0};
      auto              t = run_direct_delegation(view, state, req, options, rr);
      if (trace)
      {
        trace->push_back(trace_line(t, "profit", param, 0));
      }
      if (!t.outcome)
      {
        continue;
      }
      auto const &o = *t.outcome;
      auto const &p = w.profiles[*t.chosen];
      double const s = p.competence[0];
      realized += o.gain - o.damage - o.cost;
      expected += s * p.terms.gain - (1.0 - s) * p.terms.damage -
                  std::min(1.0, p.terms.cost * p.cost_multiplier);
      spent += o.cost;
      ++n;
    }
    double const denom = static_cast<double>(std::max<std::size_t>(n, 1));
    if (profit)
    {
      profit->realized.push_back(realized / denom);
      profit->expected.push_back(expected / denom);
    }
    if (cost)
    {
      cost->push_back(spent / denom);
    }
  }
}

/// First and last fifths of a task sequence; for 50 tasks these are tasks
/// 1-10 and 40-50.
inline std::pair<double, double> early_late_mean(std::vector<double> const &xs)
{
  std::size_t const n     = xs.size();
  std::size_t const fifth = std::max<std::size_t>(n / 5, 1);
  double            early = 0.0, late = 0.0;
  for (std::size_t i = 0; i < fifth; ++i)
  {
    early += xs[i];
  }
  std::size_t const from = n > fifth ? n - fifth - 1 : 0;
  for (std::size_t i = from; i < n; ++i)
  {
    late += xs[i];
  }
  return {early / static_cast<double>(fifth), late / static_cast<double>(n - from)};
}

}  // namespace detail

inline ExperimentResult exp_profit(SocialGraph const &g, Scenario const &sc)
{
  auto const &cfg  = sc.profit;
  char const *name = "profit";
  constexpr SelectionStrategy strategies[] = {SelectionStrategy::success_only,
                                              SelectionStrategy::full_profit};
  struct RunOut
  {
    detail::ProfitSeries     profit[2];
    std::vector<double>      cost[2];
    std::vector<std::string> trace;
  };

  auto runs = parallel_runs<RunOut>(cfg.runs, sc.jobs, [&](std::size_t run) {
    std::uint64_t const seed = derive_seed(sc.seed, run);
    RunOut              out;
    Rng                 rng   = make_rng(stream_seed(seed, {0}));
    auto                plain = detail::build_profit_world(g, sc, false, rng);
    Rng                 arng  = make_rng(stream_seed(seed, {1}));
    auto                armed = detail::build_profit_world(g, sc, true, arng);
    for (std::size_t i = 0; i < 2; ++i)
    {
      std::string const label = std::string{"strategy="} + to_string(strategies[i]);
      auto             *trace = (sc.trace && run == 0) ? &out.trace : nullptr;
      detail::run_profit_steps(g, plain, sc, strategies[i], seed, 2, cfg.iterations,
                               &out.profit[i], nullptr, trace, label);
      detail::run_profit_steps(g, armed, sc, strategies[i], seed, 3, cfg.attack_tasks, nullptr,
                               &out.cost[i], trace, label + ";attack");
    }
    return out;
  });

  ExperimentResult res;
  res.name = name;
  res.runs = cfg.runs;
  for (std::size_t run = 0; run < runs.size(); ++run)
  {
    for (std::size_t i = 0; i < 2; ++i)
    {
      std::string const param = std::string{"strategy="} + to_string(strategies[i]);
      auto const       &r     = runs[run];
      auto const [early, late] = detail::early_late_mean(r.cost[i]);
      auto push = [&](char const *m, double v) { detail::push_row(res.rows, name, param, run, m, v); };
      push("net_profit_final", r.profit[i].realized.back());
      push("expected_profit_final", r.profit[i].expected.back());
      push("cost_early", early);
      push("cost_late", late);
      push("cost_drop", early - late);
    }
    if (run == 0)
    {
      res.trace = std::move(runs[run].trace);
    }
  }
  append_aggregates(res.rows);

  PlotSpec profit_plot{"profit", "Average net profit", "iteration", "net profit", {}};
  PlotSpec cost_plot{"profit_attack_cost", "Average cost under cost inflation", "task",
                     "realized cost", {}};
  for (std::size_t i = 0; i < 2; ++i)
  {
    std::string const                prefix = std::string{"strategy="} + to_string(strategies[i]);
    std::vector<std::vector<double>> realized, expected, cost;
    for (auto const &r : runs)
    {
      realized.push_back(r.profit[i].realized);
      expected.push_back(r.profit[i].expected);
      cost.push_back(r.cost[i]);
    }
    detail::push_series(res.rows, name, prefix, "iteration", "net_profit", realized);
    detail::push_series(res.rows, name, prefix, "iteration", "expected_profit", expected);
    detail::push_series(res.rows, name, prefix + ";attack", "task", "cost", cost);
    profit_plot.series.push_back(
        Series{to_string(strategies[i]), detail::iota_x(cfg.iterations), detail::series_mean(realized)});
    cost_plot.series.push_back(
        Series{to_string(strategies[i]), detail::iota_x(cfg.attack_tasks), detail::series_mean(cost)});
  }
  res.plots.push_back(std::move(profit_plot));
  res.plots.push_back(std::move(cost_plot));
  return res;
}

// ---------------------------------------------------------------------------
// Environment: one trustor-trustee pair through changing conditions.

/// Each iteration observes the success rate of a block of trials. The
/// baseline sees an ideal environment; the uncorrected and corrected regimes
/// share the same degraded observations and differ only in the update rule.
inline ExperimentResult exp_environment(Scenario const &sc)
{
  auto const &cfg  = sc.environment;
  char const *name = "environment";
  constexpr char const *regimes[] = {"baseline", "uncorrected", "corrected"};
  std::size_t           total     = 0;
  for (auto const &e : cfg.epochs)
  {
    total += e.iterations;
  }

  using RunOut = std::array<std::vector<double>, 3>;
  auto runs    = parallel_runs<RunOut>(cfg.runs, sc.jobs, [&](std::size_t run) {
    std::uint64_t const seed     = derive_seed(sc.seed, run);
    Rng                 ideal    = make_rng(stream_seed(seed, {0}));
    Rng                 degraded = make_rng(stream_seed(seed, {1}));
    auto                block    = [&](Rng &rng, double p) {
      std::size_t k = 0;
      for (std::size_t t = 0; t < cfg.trials_per_iteration; ++t)
      {
        k += bernoulli(rng, p) ? 1 : 0;
      }
      return static_cast<double>(k) / static_cast<double>(cfg.trials_per_iteration);
    };
    TrustRecord rec[3];
    for (auto &r : rec)
    {
      r.s_hat = cfg.initial_s;
    }
    RunOut out;
    for (auto const &epoch : cfg.epochs)
    {
      EnvSnapshot const snap{epoch.env, epoch.env, {}};
      for (std::size_t it = 0; it < epoch.iterations; ++it)
      {
        RealizedResult const clean{block(ideal, cfg.competence), 0.0, 0.0, 0.0};
        RealizedResult const dim{block(degraded, cfg.competence * epoch.env), 0.0, 0.0, 0.0};
        rec[0] = update_estimates(rec[0], clean, sc.update);
        rec[1] = update_estimates(rec[1], dim, sc.update);
        rec[2] = update_estimates_env(rec[2], dim, snap, sc.update);
        for (std::size_t r = 0; r < 3; ++r)
        {
          out[r].push_back(rec[r].s_hat);
        }
      }
    }
    return out;
  });

  ExperimentResult res;
  res.name = name;
  res.runs = cfg.runs;
  for (std::size_t run = 0; run < runs.size(); ++run)
  {
    for (std::size_t r = 0; r < 3; ++r)
    {
      std::string const param = std::string{"regime="} + regimes[r];
      std::size_t       end   = 0;
      for (std::size_t e = 0; e < cfg.epochs.size(); ++e)
      {
        end += cfg.epochs[e].iterations;
        detail::push_row(res.rows, name, param, run, "s_hat_epoch" + std::to_string(e + 1),
                         runs[run][r][end - 1]);
      }
    }
  }
  append_aggregates(res.rows);

  PlotSpec plot{"environment", "Success-rate estimate under changing environment", "iteration",
                "estimated success rate", {}};
  for (std::size_t r = 0; r < 3; ++r)
  {
    std::vector<std::vector<double>> series;
    for (auto const &run : runs)
    {
      series.push_back(run[r]);
    }
    detail::push_series(res.rows, name, std::string{"regime="} + regimes[r], "iteration", "s_hat",
                        series);
    plot.series.push_back(Series{regimes[r], detail::iota_x(total), detail::series_mean(series)});
  }
  res.plots.push_back(std::move(plot));
  return res;
}

/// Runs one experiment and stamps its parameter echo.
inline ExperimentResult run_experiment(ExperimentKind kind, SocialGraph const &g,
                                       Scenario const &sc)
{
  sc.validate();
  ExperimentResult res;
  switch (kind)
  {
    case ExperimentKind::mutuality: res = exp_mutuality(g, sc); break;
    case ExperimentKind::inference: res = exp_inference(g, sc); break;
    case ExperimentKind::transitivity: res = exp_transitivity(g, sc); break;
    case ExperimentKind::profit: res = exp_profit(g, sc); break;
    case ExperimentKind::environment: res = exp_environment(sc); break;
  }
  auto params       = scenario_to_json(sc);
  res.parameters    = nlohmann::json{{"seed", sc.seed},
                                     {"role_fraction", sc.role_fraction},
                                     {"transitivity", params["transitivity"]},
                                     {"beta", params["beta"]},
                                     {"experiment", kind == ExperimentKind::transitivity
                                                        ? params["transitivity_experiment"]
                                                        : params[res.name]}};
  std::stable_sort(res.rows.begin(), res.rows.end(), row_less);
  return res;
}

}  // namespace siot
