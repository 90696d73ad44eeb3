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

#include "siot/graph.hpp"

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace siot {

using CharacteristicId = std::uint32_t;
using TaskId           = std::uint32_t;

inline bool in_unit_interval(double x) noexcept
{
  return x >= 0.0 && x <= 1.0;
}

/// Dense characteristic ids with optional labels.
class CharacteristicRegistry
{
public:
  CharacteristicId add(std::string name = {})
  {
    names_.push_back(std::move(name));
    return static_cast<CharacteristicId>(names_.size() - 1);
  }

  std::size_t size() const noexcept
  {
    return names_.size();
  }

  std::string const &name(CharacteristicId id) const
  {
    return names_.at(id);
  }

private:
  std::vector<std::string> names_;
};

struct TaskPart
{
  CharacteristicId characteristic{0};
  double           weight{0.0};

  friend bool operator==(TaskPart const &, TaskPart const &) = default;
};

/// A weighted bag of characteristics. Weights are positive and sum to one;
/// parts are kept sorted by characteristic id.
class Task
{
public:
  Task() = default;

  TaskId id() const noexcept
  {
    return id_;
  }

  std::span<const TaskPart> parts() const noexcept
  {
    return parts_;
  }

  std::size_t size() const noexcept
  {
    return parts_.size();
  }

  /// Weight of `c` in this task, 0 when absent.
  double weight_of(CharacteristicId c) const noexcept
  {
    auto it = std::lower_bound(parts_.begin(), parts_.end(), c,
                               [](TaskPart const &p, CharacteristicId id) {
                                 return p.characteristic < id;
                               });
    return (it != parts_.end() && it->characteristic == c) ? it->weight : 0.0;
  }

  bool contains(CharacteristicId c) const noexcept
  {
    return weight_of(c) > 0.0;
  }

  friend bool operator==(Task const &, Task const &) = default;

  friend Task make_task(TaskId id, std::vector<TaskPart> parts);

private:
  TaskId                id_{0};
  std::vector<TaskPart> parts_;
};

/// Validates and renormalizes. Throws std::invalid_argument on an empty part
/// list, a non-positive weight, or a repeated characteristic.
inline Task make_task(TaskId id, std::vector<TaskPart> parts)
{
  if (parts.empty())
  {
    throw std::invalid_argument("task " + std::to_string(id) + " has no characteristics");
  }
  double total = 0.0;
  for (auto const &p : parts)
  {
    if (!(p.weight > 0.0) || !std::isfinite(p.weight))
    {
      throw std::invalid_argument("task " + std::to_string(id) + " has a non-positive weight");
    }
    total += p.weight;
  }
  std::sort(parts.begin(), parts.end(), [](TaskPart const &a, TaskPart const &b) {
    return a.characteristic < b.characteristic;
  });
  for (std::size_t i = 1; i < parts.size(); ++i)
  {
    if (parts[i].characteristic == parts[i - 1].characteristic)
    {
      throw std::invalid_argument("task " + std::to_string(id) + " repeats characteristic " +
                                  std::to_string(parts[i].characteristic));
    }
  }
  for (auto &p : parts)
  {
    p.weight /= total;
  }
  Task t;
  t.id_    = id;
  t.parts_ = std::move(parts);
  return t;
}

/// Task definitions by id.
class TaskRegistry
{
public:
  Task const &add(Task task)
  {
    auto [it, inserted] = tasks_.emplace(task.id(), std::move(task));
    if (!inserted)
    {
      throw std::invalid_argument("duplicate task id " + std::to_string(it->first));
    }
    return it->second;
  }

  Task const &at(TaskId id) const
  {
    auto it = tasks_.find(id);
    if (it == tasks_.end())
    {
      throw std::out_of_range("unknown task id " + std::to_string(id));
    }
    return it->second;
  }

  Task const *find(TaskId id) const
  {
    auto it = tasks_.find(id);
    return it == tasks_.end() ? nullptr : &it->second;
  }

  std::size_t size() const noexcept
  {
    return tasks_.size();
  }

  TaskId next_id() const noexcept
  {
    return tasks_.empty() ? 0 : tasks_.rbegin()->first + 1;
  }

  auto begin() const
  {
    return tasks_.begin();
  }
  auto end() const
  {
    return tasks_.end();
  }

private:
  std::map<TaskId, Task> tasks_;
};

enum class TrustKind : std::uint8_t
{
  service,
  recommendation,
};

inline char const *to_string(TrustKind k)
{
  return k == TrustKind::service ? "service" : "recommendation";
}

/// One observer's expectations about one subject in one context:
/// success rate, gain, damage and cost, each in [0, 1].
struct TrustRecord
{
  double        s_hat{0.5};
  double        g_hat{0.5};
  double        d_hat{0.5};
  double        c_hat{0.5};
  std::uint32_t interaction_count{0};
  TrustKind     kind{TrustKind::service};

  bool valid() const noexcept
  {
    return in_unit_interval(s_hat) && in_unit_interval(g_hat) && in_unit_interval(d_hat) &&
           in_unit_interval(c_hat);
  }

  friend bool operator==(TrustRecord const &, TrustRecord const &) = default;
};

/// Initial estimates for records that have seen no interaction yet.
struct RecordPrior
{
  double s_hat{0.5};
  double g_hat{0.5};
  double d_hat{0.5};
  double c_hat{0.5};

  TrustRecord make(TrustKind kind) const
  {
    return TrustRecord{s_hat, g_hat, d_hat, c_hat, 0, kind};
  }
};

/// Trust context: a whole task or a single characteristic.
struct Context
{
  enum class Scope : std::uint8_t
  {
    task,
    characteristic,
  };

  Scope         scope{Scope::task};
  std::uint32_t id{0};

  static constexpr Context of_task(TaskId t) noexcept
  {
    return Context{Scope::task, t};
  }

  static constexpr Context of_characteristic(CharacteristicId c) noexcept
  {
    return Context{Scope::characteristic, c};
  }

  bool is_task() const noexcept
  {
    return scope == Scope::task;
  }

  friend auto operator<=>(Context const &, Context const &) = default;
};

/// (observer, subject, context, kind) -> TrustRecord. Absent keys yield
/// nullptr, never a default record.
class TrustStore
{
public:
  struct PairKey
  {
    NodeId    observer{0};
    NodeId    subject{0};
    TrustKind kind{TrustKind::service};

    friend auto operator<=>(PairKey const &, PairKey const &) = default;
  };

  using Entry = std::pair<Context, TrustRecord>;

private:
  template <class Vec>
  static auto lower(Vec &entries, Context ctx) -> decltype(entries.begin())
  {
    return std::lower_bound(entries.begin(), entries.end(), ctx,
                            [](Entry const &e, Context c) { return e.first < c; });
  }

public:

  TrustRecord const *find(NodeId observer, NodeId subject, Context ctx, TrustKind kind) const
  {
    auto it = pairs_.find(PairKey{observer, subject, kind});
    if (it == pairs_.end())
    {
      return nullptr;
    }
    auto const &entries = it->second;
    auto        e       = lower(entries, ctx);
    return (e != entries.end() && e->first == ctx) ? &e->second : nullptr;
  }

  /// Inserts or replaces. The record's kind is part of the key.
  void put(NodeId observer, NodeId subject, Context ctx, TrustRecord record)
  {
    if (!record.valid())
    {
      throw std::invalid_argument("trust record estimates must lie in [0, 1]");
    }
    auto &entries = pairs_[PairKey{observer, subject, record.kind}];
    auto  e       = lower(entries, ctx);
    if (e != entries.end() && e->first == ctx)
    {
      e->second = record;
    }
    else
    {
      entries.insert(e, Entry{ctx, record});
      ++size_;
    }
  }

  /// All records one observer holds about one subject of one kind, sorted by
  /// context.
  std::span<const Entry> records(NodeId observer, NodeId subject, TrustKind kind) const
  {
    auto it = pairs_.find(PairKey{observer, subject, kind});
    if (it == pairs_.end())
    {
      return {};
    }
    return it->second;
  }

  /// Visits (subject, kind, entries) for every subject the observer holds
  /// records about, in ascending subject order.
  template <class Fn>
  void for_each_subject(NodeId observer, Fn &&fn) const
  {
    for (auto it = pairs_.lower_bound(PairKey{observer, 0, TrustKind::service});
         it != pairs_.end() && it->first.observer == observer; ++it)
    {
      fn(it->first.subject, it->first.kind, std::span<const Entry>{it->second});
    }
  }

  /// Subjects with at least one record by `observer`, sorted, unique.
  std::vector<NodeId> subjects(NodeId observer) const
  {
    std::vector<NodeId> out;
    for_each_subject(observer, [&](NodeId s, TrustKind, std::span<const Entry>) {
      if (out.empty() || out.back() != s)
      {
        out.push_back(s);
      }
    });
    return out;
  }

  std::size_t size() const noexcept
  {
    return size_;
  }

  auto begin() const
  {
    return pairs_.begin();
  }
  auto end() const
  {
    return pairs_.end();
  }

private:
  std::map<PairKey, std::vector<Entry>> pairs_;
  std::size_t                           size_{0};
};

/// What a trustee charges and delivers. Realized gain/damage/cost of a
/// delegation are drawn from these.
struct ServiceTerms
{
  double gain{1.0};
  double damage{1.0};
  double cost{0.0};
};

/// A node's role flags and hidden ground truth.
struct AgentProfile
{
  NodeId node{0};
  bool   is_trustor{false};
  bool   is_trustee{false};
  /// Success probability per characteristic, indexed by CharacteristicId.
  std::vector<double> competence;
  /// Probability that one use of a trustee's resource is responsive.
  double integrity{1.0};
  /// Reverse-evaluation threshold; per-task overrides in `task_thresholds`.
  double                   reverse_threshold{0.0};
  std::map<TaskId, double> task_thresholds;
  bool                     honest{true};
  ServiceTerms             terms;
  /// Dishonest cost inflation (e.g. padding an exchange with fragments).
  double cost_multiplier{1.0};

  double competence_for(CharacteristicId c) const noexcept
  {
    return c < competence.size() ? competence[c] : 0.0;
  }

  /// Weighted mean of characteristic competences.
  double success_probability(Task const &task) const noexcept
  {
    double p = 0.0;
    for (auto const &part : task.parts())
    {
      p += part.weight * competence_for(part.characteristic);
    }
    return std::clamp(p, 0.0, 1.0);
  }

  double threshold_for(TaskId task) const
  {
    auto it = task_thresholds.find(task);
    return it == task_thresholds.end() ? reverse_threshold : it->second;
  }
};

/// Per-node instantaneous environment in (0, 1]; 1 is ideal and is the value
/// of every node not set explicitly.
class Environment
{
public:
  explicit Environment(double baseline = 1.0)
    : baseline_{checked(baseline)}
  {}

  void set(NodeId n, double value)
  {
    values_[n] = checked(value);
  }

  double at(NodeId n) const
  {
    auto it = values_.find(n);
    return it == values_.end() ? baseline_ : it->second;
  }

  double baseline() const noexcept
  {
    return baseline_;
  }

  std::map<NodeId, double> const &overrides() const noexcept
  {
    return values_;
  }

private:
  static double checked(double v)
  {
    if (!(v > 0.0 && v <= 1.0))
    {
      throw std::invalid_argument("environment values must lie in (0, 1]");
    }
    return v;
  }

  double                   baseline_;
  std::map<NodeId, double> values_;
};

/// Piecewise-constant environment over epochs.
class EnvironmentSchedule
{
public:
  EnvironmentSchedule() = default;

  /// Environment in force from `first_epoch` until the next entry.
  void add(std::uint32_t first_epoch, Environment env)
  {
    epochs_.insert_or_assign(first_epoch, std::move(env));
  }

  Environment const &at(std::uint32_t epoch) const
  {
    static Environment const ideal{};
    auto                     it = epochs_.upper_bound(epoch);
    if (it == epochs_.begin())
    {
      return ideal;
    }
    return std::prev(it)->second;
  }

  bool empty() const noexcept
  {
    return epochs_.empty();
  }

  std::map<std::uint32_t, Environment> const &entries() const noexcept
  {
    return epochs_;
  }

private:
  std::map<std::uint32_t, Environment> epochs_;
};

/// Environment values seen by one delegation.
struct EnvSnapshot
{
  double              trustor{1.0};
  double              trustee{1.0};
  std::vector<double> intermediates;

  /// The worst environment dominates.
  double min() const noexcept
  {
    double m = std::min(trustor, trustee);
    for (double e : intermediates)
    {
      m = std::min(m, e);
    }
    return m;
  }

  static EnvSnapshot capture(Environment const &env, NodeId trustor, NodeId trustee,
                             std::span<const NodeId> intermediates)
  {
    EnvSnapshot s{env.at(trustor), env.at(trustee), {}};
    s.intermediates.reserve(intermediates.size());
    for (NodeId n : intermediates)
    {
      s.intermediates.push_back(env.at(n));
    }
    return s;
  }

  friend bool operator==(EnvSnapshot const &, EnvSnapshot const &) = default;
};

/// Realized result of one delegation.
struct DelegationOutcome
{
  bool        success{false};
  double      gain{0.0};
  double      damage{0.0};
  double      cost{0.0};
  bool        abusive{false};
  EnvSnapshot env;

  bool valid() const noexcept
  {
    return in_unit_interval(gain) && in_unit_interval(damage) && in_unit_interval(cost) &&
           (success ? damage == 0.0 : gain == 0.0);
  }

  friend bool operator==(DelegationOutcome const &, DelegationOutcome const &) = default;
};

/// Observed success rate, gain, damage and cost. For a single delegation the
/// success rate is 1 or 0; a block of trials yields a fraction.
struct RealizedResult
{
  double success{0.0};
  double gain{0.0};
  double damage{0.0};
  double cost{0.0};

  static RealizedResult from(DelegationOutcome const &o) noexcept
  {
    return RealizedResult{o.success ? 1.0 : 0.0, o.gain, o.damage, o.cost};
  }
};

/// Responsive / abusive use counts a trustee keeps for each trustor.
struct UsageCounts
{
  std::uint32_t responsive{0};
  std::uint32_t total{0};

  friend bool operator==(UsageCounts const &, UsageCounts const &) = default;
};

class UsageLog
{
public:
  UsageCounts counts(NodeId trustee, NodeId trustor) const
  {
    auto it = log_.find({trustee, trustor});
    return it == log_.end() ? UsageCounts{} : it->second;
  }

  void record(NodeId trustee, NodeId trustor, bool abusive)
  {
    auto &c = log_[{trustee, trustor}];
    ++c.total;
    if (!abusive)
    {
      ++c.responsive;
    }
  }

  std::size_t size() const noexcept
  {
    return log_.size();
  }

private:
  std::map<std::pair<NodeId, NodeId>, UsageCounts> log_;
};

}  // namespace siot
