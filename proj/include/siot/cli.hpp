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

#include "siot/experiments.hpp"
#include "siot/graph.hpp"
#include "siot/report.hpp"
#include "siot/scenario.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace siot::cli {

/// Raw flag values; unset optionals leave the scenario untouched.
struct Options
{
  std::string                             graph;
  std::string                             features;
  std::string                             scenario;
  std::string                             out{"out"};
  std::optional<std::uint64_t>            seed;
  std::optional<std::size_t>              runs;
  std::optional<std::size_t>              jobs;
  std::optional<std::size_t>              iterations;
  std::vector<double>                     theta;
  std::optional<double>                   beta;
  std::optional<double>                   omega1;
  std::optional<double>                   omega2;
  std::optional<int>                      max_hops;
  std::optional<std::string>              method;
  std::vector<std::size_t>                characteristics;
  bool                                    trace{false};
  bool                                    use_features{false};
  bool                                    verbose{false};
};

/// Applies flags over a scenario; flags win.
inline void apply_flags(Options const &o, Scenario &sc)
{
  if (o.seed)
  {
    sc.seed = *o.seed;
  }
  if (o.runs)
  {
    sc.set_runs(*o.runs);
  }
  if (o.jobs)
  {
    sc.jobs = *o.jobs;
  }
  if (o.iterations)
  {
    sc.set_iterations(*o.iterations);
  }
  if (!o.theta.empty())
  {
    sc.mutuality.thetas = o.theta;
  }
  if (o.beta)
  {
    sc.set_beta(*o.beta);
  }
  if (o.omega1)
  {
    sc.transitivity.omega1 = *o.omega1;
  }
  if (o.omega2)
  {
    sc.transitivity.omega2 = *o.omega2;
  }
  if (o.max_hops)
  {
    sc.transitivity.max_hops = *o.max_hops;
  }
  if (o.method)
  {
    auto m                              = parse_method(*o.method);
    sc.transitivity.method              = m;
    sc.transitivity_experiment.methods = {m};
  }
  if (!o.characteristics.empty())
  {
    sc.transitivity_experiment.characteristics = o.characteristics;
  }
  if (o.trace)
  {
    sc.trace = true;
  }
  if (o.use_features)
  {
    sc.transitivity_experiment.use_features = true;
  }
  sc.validate();
}

/// Where the default graph comes from when --graph is absent.
struct Defaults
{
  std::string bundled_graph;  // edge-list text
};

inline SocialGraph load_graph(Options const &o, Defaults const &d)
{
  SocialGraph g;
  if (o.graph.empty())
  {
    std::istringstream in{d.bundled_graph};
    g = load_edge_list(in);
  }
  else
  {
    g = load_edge_list_file(o.graph);
  }
  if (!o.features.empty())
  {
    g = load_features_file(o.features, g);
  }
  return g;
}

inline void print_stats(SocialGraph const &g, std::ostream &out)
{
  out << stats_csv_header() << '\n' << stats_csv_row(compute_stats(g)) << '\n';
}

/// Entry point. 0 on success, 1 on a runtime error, 2 on a usage error.
inline int run(int argc, char const *const *argv, Defaults const &defaults,
               std::ostream &out = std::cout, std::ostream &err = std::cerr)
{
  CLI::App app{"Social-IoT trust model simulator"};
  app.name("siot-trust");
  app.require_subcommand(1);
  Options o;

  auto common = [&o](CLI::App *sub, bool experiment) {
    sub->add_option("--graph", o.graph, "Edge list (default: bundled 50-node graph)");
    sub->add_option("--features", o.features, "Node feature file");
    if (!experiment)
    {
      return;
    }
    sub->add_option("--scenario", o.scenario, "Scenario JSON; flags override its keys");
    sub->add_option("--out", o.out, "Output directory")->capture_default_str();
    sub->add_option("--seed", o.seed, "Master seed (default 1)");
    sub->add_option("--runs", o.runs, "Runs per experiment")->check(CLI::PositiveNumber);
    sub->add_option("--jobs", o.jobs, "Concurrent runs")->check(CLI::PositiveNumber);
    sub->add_option("--iterations", o.iterations, "Iterations, rounds or tasks per run")
        ->check(CLI::PositiveNumber);
    sub->add_option("--theta", o.theta, "Reverse-evaluation thresholds")->delimiter(',');
    sub->add_option("--beta", o.beta, "Forgetting factor")->check(CLI::Range(0.0, 1.0));
    sub->add_option("--omega1", o.omega1, "Recommendation-hop gate")->check(CLI::Range(0.0, 1.0));
    sub->add_option("--omega2", o.omega2, "Final-hop gate")->check(CLI::Range(0.0, 1.0));
    sub->add_option("--max-hops", o.max_hops, "Path length bound")->check(CLI::Range(1, 8));
    sub->add_option("--method", o.method, "traditional | conservative | aggressive")
        ->check(CLI::IsMember({"traditional", "conservative", "aggressive"}));
    sub->add_option("--characteristics", o.characteristics, "Characteristic counts")
        ->delimiter(',');
    sub->add_flag("--trace", o.trace, "Write per-delegation trace of the first run");
    sub->add_flag("--use-features", o.use_features, "Characteristics from node features");
    sub->add_flag("-v,--verbose", o.verbose, "Print the effective parameters");
  };

  auto *stats = app.add_subcommand("stats", "Connectivity statistics of a graph");
  common(stats, false);
  std::vector<std::pair<CLI::App *, std::vector<ExperimentKind>>> experiment_commands;
  for (auto k : kAllExperiments)
  {
    auto *sub = app.add_subcommand(to_string(k), std::string{"Run the "} + to_string(k) +
                                                     " experiment");
    common(sub, true);
    experiment_commands.emplace_back(sub, std::vector<ExperimentKind>{k});
  }
  auto *all = app.add_subcommand("all", "Run every experiment");
  common(all, true);
  experiment_commands.emplace_back(
      all, std::vector<ExperimentKind>(std::begin(kAllExperiments), std::end(kAllExperiments)));

  try
  {
    app.parse(argc, argv);
  }
  catch (CLI::CallForHelp const &)
  {
    out << app.help();
    return 0;
  }
  catch (CLI::CallForAllHelp const &)
  {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  }
  catch (CLI::ParseError const &e)
  {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  try
  {
    SocialGraph g = load_graph(o, defaults);
    if (stats->parsed())
    {
      print_stats(g, out);
      return 0;
    }

    Scenario sc = o.scenario.empty() ? Scenario{} : load_scenario_file(o.scenario);
    apply_flags(o, sc);
    if (o.verbose)
    {
      err << scenario_to_json(sc).dump(2) << '\n';
    }
    for (auto const &[sub, kinds] : experiment_commands)
    {
      if (!sub->parsed())
      {
        continue;
      }
      for (auto k : kinds)
      {
        auto const t0     = std::chrono::steady_clock::now();
        auto       result = run_experiment(k, g, sc);
        auto       bundle = write_report(result, o.out, sc.trace);
        double const secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        char timing[32];
        std::snprintf(timing, sizeof timing, "%.2f", secs);
        out << result.name << ": " << result.runs << " runs, " << result.rows.size()
            << " rows -> " << bundle.metrics.string() << " (" << timing << " s)\n";
      }
    }
    return 0;
  }
  catch (std::exception const &e)
  {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace siot::cli
