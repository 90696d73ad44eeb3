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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails. Measured values are printed alongside.

#include "path_oracle.hpp"
#include "siot/bundled_graph.hpp"
#include "siot/experiments.hpp"
#include "siot/report.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

using namespace siot;

namespace {

std::string const kData = SIOT_DATA_DIR;

struct Check
{
  bool        ok{true};
  std::string detail;

  void expect(bool cond, std::string const &what)
  {
    if (!cond)
    {
      ok = false;
      detail += " [failed: " + what + "]";
    }
  }

  void note(std::string const &s)
  {
    detail += " " + s;
  }
};

std::string fmt(double v, int digits = 4)
{
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

double aggregate(ExperimentResult const &r, std::string const &param, std::string const &metric)
{
  auto v = find_aggregate(r.rows, param, metric);
  if (!v)
  {
    throw std::runtime_error("missing aggregate " + param + " / " + metric);
  }
  return *v;
}

int failures = 0;

void criterion(int id, char const *title, double limit_s, std::function<void(Check &)> body)
{
  Check      c;
  auto const t0 = std::chrono::steady_clock::now();
  try
  {
    body(c);
  }
  catch (std::exception const &e)
  {
    c.ok = false;
    c.note(std::string{"exception: "} + e.what());
  }
  double const secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (limit_s > 0)
  {
    c.expect(secs < limit_s, "runtime " + fmt(secs, 2) + " s >= " + fmt(limit_s, 0) + " s");
  }
  failures += c.ok ? 0 : 1;
  std::printf("%s criterion %d: %s (%.2f s)%s\n", c.ok ? "PASS" : "FAIL", id, title, secs,
              c.detail.c_str());
  std::fflush(stdout);
}

struct OracleStats
{
  std::size_t nodes, edges, diameter;
  double      avg_degree, apl, clustering;
};

OracleStats read_oracle(std::string const &path)
{
  std::ifstream in{path};
  std::string   header, row;
  std::getline(in, header);
  std::getline(in, row);
  for (char &ch : row)
  {
    ch = ch == ',' ? ' ' : ch;
  }
  std::istringstream ss{row};
  OracleStats        o{};
  ss >> o.nodes >> o.edges >> o.avg_degree >> o.diameter >> o.apl >> o.clustering;
  return o;
}

}  // namespace

int main()
{
  SocialGraph const facebook = load_edge_list_file(kData + "/facebook_like.edges");

  criterion(1, "graph statistics", 10.0, [&](Check &c) {
    auto s = compute_stats(load_edge_list_file(kData + "/facebook_like.edges"));
    c.expect(s.node_count == 347 && s.edge_count == 5038, "347 nodes / 5038 edges");
    c.expect(std::abs(s.avg_degree - 29.04) <= 0.01, "avg_degree 29.04 +- 0.01");
    c.expect(s.diameter == 11, "diameter 11");
    c.expect(std::abs(s.avg_clustering - 0.49) <= 0.01, "avg_clustering 0.49 +- 0.01");
    // the published 3.75 path length belongs to the original SNAP extract;
    // this 347/5038 extract is held to its own oracle file
    auto fo = read_oracle(kData + "/facebook_like.stats.csv");
    c.expect(std::abs(s.avg_path_length - fo.apl) <= 0.01, "facebook avg_path_length vs oracle");
    c.note("facebook: N=" + std::to_string(s.node_count) + " E=" + std::to_string(s.edge_count) +
           " deg=" + fmt(s.avg_degree, 2) + " diam=" + std::to_string(s.diameter) +
           " apl=" + fmt(s.avg_path_length, 3) + " (published 3.75) cc=" + fmt(s.avg_clustering, 3));

    std::istringstream in{bundled::synthetic50_edges};
    auto               b  = compute_stats(load_edge_list(in));
    auto               so = read_oracle(kData + "/synthetic50.stats.csv");
    c.expect(b.node_count == so.nodes && b.edge_count == so.edges && b.diameter == so.diameter,
             "synthetic counts and diameter exact");
    c.expect(std::abs(b.avg_degree - so.avg_degree) <= 0.01 &&
                 std::abs(b.avg_path_length - so.apl) <= 0.01 &&
                 std::abs(b.avg_clustering - so.clustering) <= 0.01,
             "synthetic stats vs oracle");
    c.note("synthetic50: apl=" + fmt(b.avg_path_length, 4) + " oracle=" + fmt(so.apl, 4));
  });

  criterion(2, "mutuality", 60.0, [&](Check &c) {
    Scenario sc;
    auto     r = run_experiment(ExperimentKind::mutuality, facebook, sc);
    std::vector<double> abuse, unavail;
    for (double t : sc.mutuality.thetas)
    {
      std::string const p = "theta=" + format_number(t);
      abuse.push_back(aggregate(r, p, "abuse_rate"));
      unavail.push_back(aggregate(r, p, "unavailable_rate"));
      c.note(p + ": abuse=" + fmt(abuse.back()) + " unavailable=" + fmt(unavail.back()));
    }
    c.expect(sc.mutuality.runs == 100, "100 runs");
    c.expect(abuse[0] > 0.35, "abuse rate at theta=0 > 0.35");
    for (std::size_t i = 1; i < abuse.size(); ++i)
    {
      c.expect(abuse[i] < abuse[i - 1], "abuse strictly decreasing");
      c.expect(unavail[i] > unavail[i - 1], "unavailable strictly increasing");
    }
  });

  criterion(3, "inference", 30.0, [&](Check &c) {
    Scenario    sc;
    auto        r    = run_experiment(ExperimentKind::inference, facebook, sc);
    auto        with = per_run_values(r.rows, "taint=related", "honest_pct_with");
    auto        wo   = per_run_values(r.rows, "taint=related", "honest_pct_without");
    std::size_t wins = 0;
    for (std::size_t i = 0; i < with.size(); ++i)
    {
      wins += with[i] > wo[i] ? 1 : 0;
    }
    double const gain = aggregate(r, "taint=related", "improvement_pp");
    c.expect(with.size() == 50, "50 repetitions");
    c.expect(wins >= 45, "inference wins in >= 45 of 50");
    c.expect(gain >= 10.0, "mean improvement >= 10 pp");
    c.note("wins=" + std::to_string(wins) + "/" + std::to_string(with.size()) +
           " improvement=" + fmt(gain, 2) + " pp");
  });

  criterion(4, "transitivity", 120.0, [&](Check &c) {
    Scenario sc;
    auto     r = run_experiment(ExperimentKind::transitivity, facebook, sc);
    for (auto k : sc.transitivity_experiment.characteristics)
    {
      auto v = [&](char const *m, char const *metric) {
        return aggregate(r, "k=" + std::to_string(k) + ";method=" + m, metric);
      };
      double const st = v("traditional", "success_rate"), sc_ = v("conservative", "success_rate"),
                   sa = v("aggressive", "success_rate");
      double const ut = v("traditional", "unavailable_rate"),
                   uc = v("conservative", "unavailable_rate"),
                   ua = v("aggressive", "unavailable_rate");
      double const nt = v("traditional", "potential_trustees"),
                   nc = v("conservative", "potential_trustees"),
                   na = v("aggressive", "potential_trustees");
      std::string const tag = "k=" + std::to_string(k);
      c.expect(sa >= sc_ && sc_ >= st, tag + " success ordering");
      c.expect(ua <= uc && uc <= ut, tag + " unavailable ordering");
      c.expect(nt < nc && nc < na, tag + " potential-trustee ordering");
      if (k == 4)
      {
        c.expect(sa - st >= 0.15, "k=4 success gain >= 0.15");
        c.expect(ut - ua >= 0.2, "k=4 unavailable improvement >= 0.2");
      }
      c.note(tag + ": success " + fmt(st, 3) + "/" + fmt(sc_, 3) + "/" + fmt(sa, 3) +
             " unavailable " + fmt(ut, 3) + "/" + fmt(uc, 3) + "/" + fmt(ua, 3) + " trustees " +
             fmt(nt, 2) + "/" + fmt(nc, 2) + "/" + fmt(na, 2) + ";");
    }
  });

  criterion(5, "profit", 60.0, [&](Check &c) {
    Scenario sc;
    auto     r    = run_experiment(ExperimentKind::profit, facebook, sc);
    double   full = aggregate(r, "strategy=full_profit", "net_profit_final");
    double   succ = aggregate(r, "strategy=success_only", "net_profit_final");
    c.expect(sc.update.beta_s == 0.1 && sc.profit.runs == 100, "beta 0.1, 100 runs");
    c.expect(full > succ, "full_profit net profit at the last iteration exceeds success_only");

    auto diff = [&](char const *strategy) {
      std::string const p     = std::string{"strategy="} + strategy;
      auto              early = per_run_values(r.rows, p, "cost_early");
      auto              late  = per_run_values(r.rows, p, "cost_late");
      std::vector<double> d;
      for (std::size_t i = 0; i < early.size(); ++i)
      {
        d.push_back(late[i] - early[i]);
      }
      return mean_sd(d);
    };
    double const fe = aggregate(r, "strategy=full_profit", "cost_early");
    double const fl = aggregate(r, "strategy=full_profit", "cost_late");
    auto const   sd = diff("success_only");
    c.expect(fl < fe, "full_profit late cost below early cost");
    c.expect(sd.mean >= -sd.sd, "success_only cost drop within one sd");
    c.note("net profit full=" + fmt(full) + " success_only=" + fmt(succ) + "; attack cost full " +
           fmt(fe) + "->" + fmt(fl) + ", success_only change " + fmt(sd.mean) + " (sd " +
           fmt(sd.sd) + ")");
  });

  criterion(6, "environment", 30.0, [&](Check &c) {
    Scenario sc;
    auto     r = run_experiment(ExperimentKind::environment, facebook, sc);
    auto     s = [&](char const *regime, int it) {
      return aggregate(r, std::string{"regime="} + regime + ";iteration=" + std::to_string(it),
                           "s_hat");
    };
    double const u200 = s("uncorrected", 200), u300 = s("uncorrected", 300);
    c.expect(std::abs(u200 - 0.32) <= 0.03, "uncorrected 0.32 +- 0.03 at 200");
    c.expect(std::abs(u300 - 0.56) <= 0.03, "uncorrected 0.56 +- 0.03 at 300");
    double lo = 1.0, hi = 0.0;
    for (int it = 120; it <= 300; ++it)
    {
      lo = std::min(lo, s("corrected", it));
      hi = std::max(hi, s("corrected", it));
    }
    c.expect(lo >= 0.75 && hi <= 0.85, "corrected within 0.80 +- 0.05 over 120-300");
    double blo = 1.0, bhi = 0.0;
    for (int it = 100; it <= 300; ++it)
    {
      blo = std::min(blo, s("baseline", it));
      bhi = std::max(bhi, s("baseline", it));
    }
    c.expect(blo >= 0.78 && bhi <= 0.82, "baseline within 0.80 +- 0.02 from 100");
    c.note("uncorrected@200=" + fmt(u200) + " @300=" + fmt(u300) + " corrected[120,300]=[" +
           fmt(lo) + "," + fmt(hi) + "] baseline[100,300]=[" + fmt(blo) + "," + fmt(bhi) + "]");
  });

  criterion(7, "property suites", 0.0, [&](Check &c) {
    auto rng = make_rng(7);

    bool geometric = true;
    for (int t = 0; t < 1000; ++t)
    {
      double const beta = uniform01(rng), target = uniform01(rng), s0 = uniform01(rng);
      double       s = s0;
      for (int n = 1; n <= 40; ++n)
      {
        s = forget(beta, s, target);
        geometric =
            geometric && std::abs(std::abs(s - target) - std::pow(beta, n) * std::abs(s0 - target)) <= 1e-12;
      }
    }
    c.expect(geometric, "geometric convergence");

    bool pair = true;
    for (int i = 0; i < 10000; ++i)
    {
      double const a = uniform01(rng), t = uniform01(rng), v = transit_pair(a, t);
      pair = pair && std::abs(transit_pair(1, t) - t) <= 1e-15 &&
             std::abs(transit_pair(0, t) - (1 - t)) <= 1e-15 &&
             std::abs(transit_pair(0.5, t) - 0.5) <= 1e-15 &&
             std::abs(v - transit_pair(t, a)) <= 1e-15 && v >= 0 && v <= 1;
    }
    c.expect(pair, "transit_pair identities");

    bool infer = true;
    for (int trial = 0; trial < 1000; ++trial)
    {
      std::size_t const k = 2 + rng() % 6;
      std::vector<Task> tasks;
      std::vector<bool> covered(k, false);
      for (TaskId id = 0; id < 3; ++id)
      {
        std::vector<TaskPart> parts;
        for (CharacteristicId ch = 0; ch < k; ++ch)
        {
          if (bernoulli(rng, 0.4))
          {
            parts.push_back({ch, uniform(rng, 0.1, 1.0)});
            covered[ch] = true;
          }
        }
        if (parts.empty())
        {
          parts.push_back({0, 1.0});
          covered[0] = true;
        }
        tasks.push_back(make_task(id, parts));
      }
      double const           t = uniform01(rng);
      std::vector<TaskTrust> hist;
      for (auto const &task : tasks)
      {
        hist.push_back({&task, t});
      }
      std::vector<TaskPart> target;
      bool                  all = true;
      for (CharacteristicId ch = 0; ch < k; ++ch)
      {
        if (bernoulli(rng, 0.5))
        {
          target.push_back({ch, uniform(rng, 0.1, 1.0)});
          all = all && covered[ch];
        }
      }
      if (target.empty())
      {
        continue;
      }
      auto got = infer_task_tw(hist, make_task(99, target));
      infer    = infer && got.has_value() == all && (!all || std::abs(*got - t) <= 1e-12);
    }
    c.expect(infer, "inference fixed point and coverage");

    bool        oracle_ok = true, monotone = true;
    auto        orng      = make_rng(2026);
    std::size_t nonempty  = 0;
    for (int trial = 0; trial < 200; ++trial)
    {
      auto in = oracle::make_instance(orng);
      std::vector<std::map<NodeId, double>> sets;
      for (auto m : {TransitivityMethod::traditional, TransitivityMethod::conservative,
                     TransitivityMethod::aggressive})
      {
        auto got = oracle::found(in, m);
        oracle_ok = oracle_ok && got == oracle::Oracle{in, m}.candidates();
        nonempty += got.empty() ? 0 : 1;
        sets.push_back(std::move(got));
      }
      monotone = monotone && oracle::subset(sets[0], sets[1]) && oracle::subset(sets[1], sets[2]);
    }
    c.expect(oracle_ok, "candidate sets and values match exhaustive enumeration");
    c.expect(monotone, "traditional within conservative within aggressive");
    c.expect(nonempty > 100, "oracle instances exercise the search");

    bool reduce = true;
    for (int i = 0; i < 10000; ++i)
    {
      TrustRecord       r{uniform01(rng), uniform01(rng), uniform01(rng), uniform01(rng), 0,
                    TrustKind::service};
      DelegationOutcome o;
      o.success = bernoulli(rng, 0.5);
      o.gain    = o.success ? uniform01(rng) : 0.0;
      o.damage  = o.success ? 0.0 : uniform01(rng);
      o.cost    = uniform01(rng);
      UpdateParams p{uniform01(rng), uniform01(rng), uniform01(rng), uniform01(rng)};
      auto         a = update_estimates_env(r, o, p), b = update_estimates(r, o, p);
      reduce = reduce && std::memcmp(&a.s_hat, &b.s_hat, sizeof(double)) == 0 &&
               std::memcmp(&a.g_hat, &b.g_hat, sizeof(double)) == 0 &&
               std::memcmp(&a.d_hat, &b.d_hat, sizeof(double)) == 0 &&
               std::memcmp(&a.c_hat, &b.c_hat, sizeof(double)) == 0;
    }
    c.expect(reduce, "ideal environment reduces bit for bit");

    bool     deterministic = true;
    Scenario sc;
    sc.set_runs(3);
    sc.set_iterations(10);
    for (auto k : kAllExperiments)
    {
      auto a = run_experiment(k, facebook, sc);
      auto b = run_experiment(k, facebook, sc);
      bool same = metrics_csv(a.rows) == metrics_csv(b.rows) && a.plots.size() == b.plots.size();
      for (std::size_t i = 0; same && i < a.plots.size(); ++i)
      {
        same = render_plot(a.plots[i]) == render_plot(b.plots[i]);
      }
      deterministic = deterministic && same;
    }
    c.expect(deterministic, "byte-identical CSV and SVG for equal seeds");
  });

  std::printf("%s: %d criteria failed\n", failures == 0 ? "ALL PASS" : "FAILURES", failures);
  return failures == 0 ? 0 : 1;
}
