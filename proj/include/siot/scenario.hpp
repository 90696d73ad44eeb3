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
#include "siot/trust_engine.hpp"

#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace siot {

struct MutualityConfig
{
  std::vector<double> thetas{0.0, 0.3, 0.6};
  std::size_t         runs{100};
  /// Delegation rounds; every trustor issues one request per round.
  std::size_t rounds{10};
  /// Uses each trustee has already logged per trustor before the first round.
  std::size_t history_uses{10};
};

enum class Taint : std::uint8_t
{
  none,
  related,    // a characteristic of the requested task
  unrelated,  // a characteristic the requested task does not contain
};

struct InferenceConfig
{
  std::size_t runs{50};
  double      dishonest_fraction{0.5};
  /// Relative drop in observed competence on the tainted characteristic.
  double penalty{0.5};
  Taint  taint{Taint::related};
  double competence_lo{0.5};
  double competence_hi{1.0};
};

struct TransitivityExperimentConfig
{
  std::vector<std::size_t>        characteristics{4, 5, 6, 7};
  std::vector<TransitivityMethod> methods{TransitivityMethod::traditional,
                                          TransitivityMethod::conservative,
                                          TransitivityMethod::aggressive};
  std::size_t                     runs{100};
  std::size_t                     requests_per_trustor{1};
  /// Tasks each node has experience with.
  std::size_t tasks_per_node{2};
  /// Trustee neighbours a node holds service records about, on each of its
  /// tasks.
  std::size_t service_contacts{6};
  /// Neighbours a node holds recommendation records about.
  std::size_t recommendation_contacts{2};
  /// Trustee competence per characteristic is uniform on [competence_lo, 1].
  double competence_lo{0.5};
  /// Build characteristics from node features instead of random labels.
  bool use_features{false};
};

struct ProfitConfig
{
  std::size_t runs{100};
  std::size_t iterations{200};
  std::size_t attack_tasks{50};
  double      attacker_fraction{0.5};
  double      cost_multiplier{3.0};
};

struct EpochSpec
{
  std::size_t iterations{100};
  double      env{1.0};
};

struct EnvironmentExperimentConfig
{
  std::size_t            runs{100};
  double                 competence{0.8};
  double                 initial_s{1.0};
  std::size_t            trials_per_iteration{100};
  std::vector<EpochSpec> epochs{{100, 1.0}, {100, 0.4}, {100, 0.7}};
};

/// Everything an experiment needs besides the graph. Defaults reproduce the
/// reference setups; a scenario file or CLI flags override single keys.
struct Scenario
{
  std::uint64_t      seed{1};
  std::size_t        jobs{1};
  double             role_fraction{0.4};
  bool               disjoint_roles{false};
  bool               trace{false};
  RecordPrior        prior;
  TransitivityParams transitivity;
  UpdateParams       update{UpdateParams::uniform(0.1)};

  MutualityConfig              mutuality;
  InferenceConfig              inference;
  TransitivityExperimentConfig transitivity_experiment;
  ProfitConfig                 profit;
  EnvironmentExperimentConfig  environment;

  void validate() const
  {
    auto positive = [](std::size_t v, char const *what) {
      if (v == 0)
      {
        throw std::invalid_argument(std::string{what} + " must be at least 1");
      }
    };
    auto unit = [](double v, char const *what) {
      if (!in_unit_interval(v))
      {
        throw std::invalid_argument(std::string{what} + " must lie in [0, 1]");
      }
    };
    if (!(role_fraction > 0.0 && role_fraction <= 1.0))
    {
      throw std::invalid_argument("role_fraction must lie in (0, 1]");
    }
    transitivity.validate();
    update.validate();
    unit(prior.s_hat, "prior.s_hat");
    unit(prior.g_hat, "prior.g_hat");
    unit(prior.d_hat, "prior.d_hat");
    unit(prior.c_hat, "prior.c_hat");

    positive(mutuality.runs, "mutuality.runs");
    positive(mutuality.rounds, "mutuality.rounds");
    if (mutuality.thetas.empty())
    {
      throw std::invalid_argument("mutuality.thetas must not be empty");
    }
    for (double t : mutuality.thetas)
    {
      unit(t, "mutuality.thetas");
    }

    positive(inference.runs, "inference.runs");
    unit(inference.dishonest_fraction, "inference.dishonest_fraction");
    unit(inference.penalty, "inference.penalty");
    unit(inference.competence_lo, "inference.competence_lo");
    unit(inference.competence_hi, "inference.competence_hi");
    if (inference.competence_lo > inference.competence_hi)
    {
      throw std::invalid_argument("inference.competence_lo exceeds competence_hi");
    }

    auto const &t = transitivity_experiment;
    positive(t.runs, "transitivity.runs");
    positive(t.requests_per_trustor, "transitivity.requests_per_trustor");
    positive(t.tasks_per_node, "transitivity.tasks_per_node");
    if (t.characteristics.empty() || t.methods.empty())
    {
      throw std::invalid_argument("transitivity grids must not be empty");
    }
    unit(t.competence_lo, "transitivity.competence_lo");
    for (auto k : t.characteristics)
    {
      if (k < 2)
      {
        throw std::invalid_argument("transitivity.characteristics values must be at least 2");
      }
    }

    positive(profit.runs, "profit.runs");
    positive(profit.iterations, "profit.iterations");
    positive(profit.attack_tasks, "profit.attack_tasks");
    unit(profit.attacker_fraction, "profit.attacker_fraction");
    if (!(profit.cost_multiplier >= 1.0))
    {
      throw std::invalid_argument("profit.cost_multiplier must be at least 1");
    }

    positive(environment.runs, "environment.runs");
    positive(environment.trials_per_iteration, "environment.trials_per_iteration");
    unit(environment.competence, "environment.competence");
    unit(environment.initial_s, "environment.initial_s");
    if (environment.epochs.empty())
    {
      throw std::invalid_argument("environment.epochs must not be empty");
    }
    for (auto const &e : environment.epochs)
    {
      positive(e.iterations, "environment.epochs[].iterations");
      if (!(e.env > 0.0 && e.env <= 1.0))
      {
        throw std::invalid_argument("environment.epochs[].env must lie in (0, 1]");
      }
    }
  }

  /// Overrides the run count of every experiment.
  void set_runs(std::size_t runs)
  {
    mutuality.runs = inference.runs = transitivity_experiment.runs = profit.runs =
        environment.runs                                        = runs;
  }

  /// Overrides per-run iteration counts: delegation rounds, profit iterations
  /// and attack tasks, transitivity requests per trustor, and each
  /// environment epoch's length.
  void set_iterations(std::size_t n)
  {
    mutuality.rounds                             = n;
    profit.iterations                            = n;
    profit.attack_tasks                          = n;
    transitivity_experiment.requests_per_trustor = n;
    for (auto &e : environment.epochs)
    {
      e.iterations = n;
    }
  }

  void set_beta(double beta)
  {
    update = UpdateParams::uniform(beta);
  }
};

// ---------------------------------------------------------------------------
// JSON binding. Unknown keys are rejected so that typos surface.

namespace detail {

inline void check_keys(nlohmann::json const &j, std::set<std::string> const &allowed,
                       std::string const &where)
{
  if (!j.is_object())
  {
    throw std::invalid_argument(where + " must be an object");
  }
  for (auto const &[key, _] : j.items())
  {
    if (!allowed.contains(key))
    {
      throw std::invalid_argument("unknown key '" + key + "' in " + where);
    }
  }
}

template <class T>
void read(nlohmann::json const &j, char const *key, T &out)
{
  if (auto it = j.find(key); it != j.end())
  {
    out = it->get<T>();
  }
}

inline Taint parse_taint(std::string const &s)
{
  if (s == "none")
  {
    return Taint::none;
  }
  if (s == "related")
  {
    return Taint::related;
  }
  if (s == "unrelated")
  {
    return Taint::unrelated;
  }
  throw std::invalid_argument("unknown taint '" + s + "'");
}

inline char const *to_string(Taint t)
{
  switch (t)
  {
    case Taint::none: return "none";
    case Taint::related: return "related";
    case Taint::unrelated: return "unrelated";
  }
  return "?";
}

}  // namespace detail

inline Scenario scenario_from_json(nlohmann::json const &j)
{
  using detail::check_keys;
  using detail::read;
  Scenario s;
  check_keys(j,
             {"seed", "jobs", "role_fraction", "disjoint_roles", "trace", "prior", "transitivity",
              "beta", "mutuality", "inference", "transitivity_experiment", "profit", "environment"},
             "scenario");
  read(j, "seed", s.seed);
  read(j, "jobs", s.jobs);
  read(j, "role_fraction", s.role_fraction);
  read(j, "disjoint_roles", s.disjoint_roles);
  read(j, "trace", s.trace);
  if (j.contains("beta"))
  {
    s.set_beta(j.at("beta").get<double>());
  }
  if (auto it = j.find("prior"); it != j.end())
  {
    check_keys(*it, {"s_hat", "g_hat", "d_hat", "c_hat"}, "prior");
    read(*it, "s_hat", s.prior.s_hat);
    read(*it, "g_hat", s.prior.g_hat);
    read(*it, "d_hat", s.prior.d_hat);
    read(*it, "c_hat", s.prior.c_hat);
  }
  if (auto it = j.find("transitivity"); it != j.end())
  {
    check_keys(*it, {"omega1", "omega2", "max_hops", "method"}, "transitivity");
    read(*it, "omega1", s.transitivity.omega1);
    read(*it, "omega2", s.transitivity.omega2);
    read(*it, "max_hops", s.transitivity.max_hops);
    if (it->contains("method"))
    {
      s.transitivity.method = parse_method(it->at("method").get<std::string>());
    }
  }
  if (auto it = j.find("mutuality"); it != j.end())
  {
    check_keys(*it, {"thetas", "runs", "rounds", "history_uses"}, "mutuality");
    read(*it, "thetas", s.mutuality.thetas);
    read(*it, "runs", s.mutuality.runs);
    read(*it, "rounds", s.mutuality.rounds);
    read(*it, "history_uses", s.mutuality.history_uses);
  }
  if (auto it = j.find("inference"); it != j.end())
  {
    check_keys(*it,
               {"runs", "dishonest_fraction", "penalty", "taint", "competence_lo", "competence_hi"},
               "inference");
    auto &c = s.inference;
    read(*it, "runs", c.runs);
    read(*it, "dishonest_fraction", c.dishonest_fraction);
    read(*it, "penalty", c.penalty);
    read(*it, "competence_lo", c.competence_lo);
    read(*it, "competence_hi", c.competence_hi);
    if (it->contains("taint"))
    {
      c.taint = detail::parse_taint(it->at("taint").get<std::string>());
    }
  }
  if (auto it = j.find("transitivity_experiment"); it != j.end())
  {
    check_keys(*it,
               {"characteristics", "methods", "runs", "requests_per_trustor", "tasks_per_node",
                "service_contacts", "recommendation_contacts", "competence_lo", "use_features"},
               "transitivity_experiment");
    auto &c = s.transitivity_experiment;
    read(*it, "characteristics", c.characteristics);
    read(*it, "runs", c.runs);
    read(*it, "requests_per_trustor", c.requests_per_trustor);
    read(*it, "tasks_per_node", c.tasks_per_node);
    read(*it, "service_contacts", c.service_contacts);
    read(*it, "recommendation_contacts", c.recommendation_contacts);
    read(*it, "competence_lo", c.competence_lo);
    read(*it, "use_features", c.use_features);
    if (it->contains("methods"))
    {
      c.methods.clear();
      for (auto const &m : it->at("methods"))
      {
        c.methods.push_back(parse_method(m.get<std::string>()));
      }
    }
  }
  if (auto it = j.find("profit"); it != j.end())
  {
    check_keys(*it, {"runs", "iterations", "attack_tasks", "attacker_fraction", "cost_multiplier"},
               "profit");
    auto &c = s.profit;
    read(*it, "runs", c.runs);
    read(*it, "iterations", c.iterations);
    read(*it, "attack_tasks", c.attack_tasks);
    read(*it, "attacker_fraction", c.attacker_fraction);
    read(*it, "cost_multiplier", c.cost_multiplier);
  }
  if (auto it = j.find("environment"); it != j.end())
  {
    check_keys(*it, {"runs", "competence", "initial_s", "trials_per_iteration", "epochs"},
               "environment");
    auto &c = s.environment;
    read(*it, "runs", c.runs);
    read(*it, "competence", c.competence);
    read(*it, "initial_s", c.initial_s);
    read(*it, "trials_per_iteration", c.trials_per_iteration);
    if (it->contains("epochs"))
    {
      c.epochs.clear();
      for (auto const &e : it->at("epochs"))
      {
        check_keys(e, {"iterations", "env"}, "environment.epochs[]");
        EpochSpec spec;
        read(e, "iterations", spec.iterations);
        read(e, "env", spec.env);
        c.epochs.push_back(spec);
      }
    }
  }
  s.validate();
  return s;
}

/// Parameter echo for summaries.
inline nlohmann::json scenario_to_json(Scenario const &s)
{
  using nlohmann::json;
  json methods = json::array();
  for (auto m : s.transitivity_experiment.methods)
  {
    methods.push_back(to_string(m));
  }
  json epochs = json::array();
  for (auto const &e : s.environment.epochs)
  {
    epochs.push_back({{"iterations", e.iterations}, {"env", e.env}});
  }
  auto const &t = s.transitivity_experiment;
  return json{
      {"seed", s.seed},
      {"role_fraction", s.role_fraction},
      {"disjoint_roles", s.disjoint_roles},
      {"prior", {{"s_hat", s.prior.s_hat}, {"g_hat", s.prior.g_hat}, {"d_hat", s.prior.d_hat},
                 {"c_hat", s.prior.c_hat}}},
      {"transitivity", {{"omega1", s.transitivity.omega1}, {"omega2", s.transitivity.omega2},
                        {"max_hops", s.transitivity.max_hops},
                        {"method", to_string(s.transitivity.method)}}},
      {"beta", s.update.beta_s},
      {"mutuality", {{"thetas", s.mutuality.thetas}, {"runs", s.mutuality.runs},
                     {"rounds", s.mutuality.rounds}, {"history_uses", s.mutuality.history_uses}}},
      {"inference", {{"runs", s.inference.runs},
                     {"dishonest_fraction", s.inference.dishonest_fraction},
                     {"penalty", s.inference.penalty},
                     {"taint", detail::to_string(s.inference.taint)},
                     {"competence_lo", s.inference.competence_lo},
                     {"competence_hi", s.inference.competence_hi}}},
      {"transitivity_experiment",
       {{"characteristics", t.characteristics}, {"methods", methods}, {"runs", t.runs},
        {"requests_per_trustor", t.requests_per_trustor}, {"tasks_per_node", t.tasks_per_node},
        {"service_contacts", t.service_contacts},
        {"recommendation_contacts", t.recommendation_contacts},
        {"competence_lo", t.competence_lo}, {"use_features", t.use_features}}},
      {"profit", {{"runs", s.profit.runs}, {"iterations", s.profit.iterations},
                  {"attack_tasks", s.profit.attack_tasks},
                  {"attacker_fraction", s.profit.attacker_fraction},
                  {"cost_multiplier", s.profit.cost_multiplier}}},
      {"environment", {{"runs", s.environment.runs}, {"competence", s.environment.competence},
                       {"initial_s", s.environment.initial_s},
                       {"trials_per_iteration", s.environment.trials_per_iteration},
                       {"epochs", epochs}}},
  };
}

inline Scenario load_scenario_file(std::string const &path)
{
  std::ifstream in{path};
  if (!in)
  {
    throw std::runtime_error("cannot open scenario file '" + path + "'");
  }
  try
  {
    return scenario_from_json(nlohmann::json::parse(in));
  }
  catch (nlohmann::json::exception const &e)
  {
    throw std::runtime_error("scenario file '" + path + "': " + e.what());
  }
}

}  // namespace siot
