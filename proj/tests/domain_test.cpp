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

#include "siot/domain.hpp"

#include "gtest/gtest.h"

#include <stdexcept>

using namespace siot;

TEST(DomainTests, SingleCharacteristicTask)
{
  auto t = make_task(1, {{0, 1.0}});
  ASSERT_EQ(t.size(), 1u);
  EXPECT_DOUBLE_EQ(t.weight_of(0), 1.0);
  EXPECT_TRUE(t.contains(0));
  EXPECT_FALSE(t.contains(1));
}

TEST(DomainTests, WeightsRenormalize)
{
  auto t = make_task(4, {{3, 2.0}, {1, 2.0}});
  EXPECT_DOUBLE_EQ(t.weight_of(1), 0.5);
  EXPECT_DOUBLE_EQ(t.weight_of(3), 0.5);
  EXPECT_EQ(t.parts()[0].characteristic, 1u);  // sorted by characteristic
}

TEST(DomainTests, InvalidTasksRejected)
{
  EXPECT_THROW(make_task(0, {}), std::invalid_argument);
  EXPECT_THROW(make_task(0, {{0, 0.0}}), std::invalid_argument);
  EXPECT_THROW(make_task(0, {{0, -1.0}}), std::invalid_argument);
  EXPECT_THROW(make_task(0, {{2, 1.0}, {2, 1.0}}), std::invalid_argument);
}

TEST(DomainTests, TaskRegistryLookup)
{
  TaskRegistry reg;
  reg.add(make_task(3, {{0, 1.0}}));
  EXPECT_EQ(reg.next_id(), 4u);
  EXPECT_NE(reg.find(3), nullptr);
  EXPECT_EQ(reg.find(2), nullptr);
  EXPECT_THROW(reg.at(2), std::out_of_range);
  EXPECT_THROW(reg.add(make_task(3, {{1, 1.0}})), std::invalid_argument);
}

TEST(DomainTests, TrustStoreRoundTrip)
{
  TrustStore  store;
  TrustRecord rec{0.8, 0.6, 0.4, 0.2, 3, TrustKind::service};
  store.put(1, 2, Context::of_task(5), rec);
  auto const *got = store.find(1, 2, Context::of_task(5), TrustKind::service);
  ASSERT_NE(got, nullptr);
  EXPECT_DOUBLE_EQ(got->s_hat, 0.8);
  EXPECT_EQ(got->interaction_count, 3u);

  // absent keys never materialize a default record
  EXPECT_EQ(store.find(1, 2, Context::of_task(6), TrustKind::service), nullptr);
  EXPECT_EQ(store.find(1, 2, Context::of_task(5), TrustKind::recommendation), nullptr);
  EXPECT_EQ(store.find(2, 1, Context::of_task(5), TrustKind::service), nullptr);
  EXPECT_EQ(store.find(1, 2, Context::of_characteristic(5), TrustKind::service), nullptr);
  EXPECT_EQ(store.size(), 1u);

  rec.s_hat = 0.1;
  store.put(1, 2, Context::of_task(5), rec);
  EXPECT_EQ(store.size(), 1u);
  EXPECT_DOUBLE_EQ(store.find(1, 2, Context::of_task(5), TrustKind::service)->s_hat, 0.1);
}

TEST(DomainTests, TrustStoreEnumeration)
{
  TrustStore store;
  store.put(1, 9, Context::of_task(2), TrustRecord{});
  store.put(1, 4, Context::of_task(1), TrustRecord{});
  store.put(1, 4, Context::of_task(0), TrustRecord{});
  TrustRecord rec{};
  rec.kind = TrustKind::recommendation;
  store.put(1, 4, Context::of_task(0), rec);
  store.put(2, 3, Context::of_task(0), TrustRecord{});

  EXPECT_EQ(store.subjects(1), (std::vector<NodeId>{4, 9}));
  auto entries = store.records(1, 4, TrustKind::service);
  ASSERT_EQ(entries.size(), 2u);
  EXPECT_EQ(entries[0].first, Context::of_task(0));
  EXPECT_EQ(store.size(), 5u);
}

TEST(DomainTests, InvalidRecordRejected)
{
  TrustStore  store;
  TrustRecord bad{1.5, 0.5, 0.5, 0.5, 0, TrustKind::service};
  EXPECT_THROW(store.put(0, 1, Context::of_task(0), bad), std::invalid_argument);
}

TEST(DomainTests, EnvironmentDefaultsAndSchedule)
{
  Environment env;
  EXPECT_DOUBLE_EQ(env.at(17), 1.0);
  env.set(3, 0.4);
  EXPECT_DOUBLE_EQ(env.at(3), 0.4);
  EXPECT_THROW(env.set(3, 0.0), std::invalid_argument);
  EXPECT_THROW(Environment{1.2}, std::invalid_argument);

  EnvironmentSchedule sched;
  sched.add(100, Environment{0.4});
  sched.add(200, Environment{0.7});
  EXPECT_DOUBLE_EQ(sched.at(0).at(0), 1.0);
  EXPECT_DOUBLE_EQ(sched.at(150).at(0), 0.4);
  EXPECT_DOUBLE_EQ(sched.at(999).at(0), 0.7);
}

TEST(DomainTests, SnapshotTakesTheMinimum)
{
  Environment env;
  env.set(1, 0.9);
  env.set(5, 0.3);
  std::vector<NodeId> mids{5, 6};
  auto                snap = EnvSnapshot::capture(env, 1, 2, mids);
  EXPECT_DOUBLE_EQ(snap.min(), 0.3);
  EXPECT_DOUBLE_EQ(EnvSnapshot::capture(env, 1, 2, {}).min(), 0.9);
}

TEST(DomainTests, SuccessProbabilityIsWeightedCompetence)
{
  AgentProfile p;
  p.competence = {0.2, 0.8};
  EXPECT_DOUBLE_EQ(p.success_probability(make_task(0, {{0, 1.0}, {1, 1.0}})), 0.5);
  EXPECT_DOUBLE_EQ(p.success_probability(make_task(1, {{7, 1.0}})), 0.0);
  p.reverse_threshold  = 0.3;
  p.task_thresholds[4] = 0.9;
  EXPECT_DOUBLE_EQ(p.threshold_for(4), 0.9);
  EXPECT_DOUBLE_EQ(p.threshold_for(5), 0.3);
}

TEST(DomainTests, UsageLogCounts)
{
  UsageLog log;
  EXPECT_EQ(log.counts(1, 2), (UsageCounts{0, 0}));
  log.record(1, 2, false);
  log.record(1, 2, true);
  EXPECT_EQ(log.counts(1, 2), (UsageCounts{1, 2}));
  EXPECT_EQ(log.counts(2, 1), (UsageCounts{0, 0}));
}
