// Copyright 2026 The mecbend Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <algorithm>
#include <string>

#include "mecbend/model.hpp"
#include "mecbend/scenario.hpp"
#include "test_support.hpp"

namespace {

using namespace mecbend;

bool contains(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

TEST(Validate, GeneratedInstanceIsClean) {
  for (int seed = 1; seed <= 20; ++seed) {
    GeneratorConfig c = preset("desk");
    c.seed = seed;
    EXPECT_TRUE(validate(generate(c)).empty()) << "seed " << seed;
  }
}

TEST(Validate, ZeroStorage) {
  Instance inst = fixtures::tiny_instance(1, 2, 2);
  inst.topology.storage[0] = 0.0;
  const auto v = validate(inst);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0], "C_1 must be > 0");
}

TEST(Validate, MissingCloudLink) {
  Instance inst = fixtures::tiny_instance(1, 2, 2);
  inst.topology.remove_link(0, inst.cloud());
  const auto v = validate(inst);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0], "link 1→cloud required");
}

TEST(Validate, OtherInvariants) {
  Instance inst = fixtures::tiny_instance(1, 2, 2);
  inst.demand(1, 0) = -1.0;
  inst.params.alpha = 1.5;
  inst.services[1].max_delay = 0.0;
  inst.topology.remove_link(1, 0);
  const auto v = validate(inst);
  EXPECT_GE(v.size(), 4u);
  EXPECT_TRUE(contains(v, "alpha must be in [0,1]"));
  EXPECT_TRUE(contains(v, "link 1→2 must be present in both directions"));
}

TEST(Topology, SelfLinkConvention) {
  Topology t(3);
  for (int e = 0; e < 3; ++e) {
    EXPECT_TRUE(t.has_link(e, e));
    EXPECT_EQ(t.link(e, e).propagation, 0.0);
    EXPECT_EQ(t.link(e, e).bandwidth, kInf);
  }
  EXPECT_FALSE(t.has_link(0, 3));
  EXPECT_EQ(t.cloud(), 3);
}

TEST(Model, Containers) {
  Demand d(2, 3);
  d(1, 2) = 4.0;
  EXPECT_EQ(d(1, 2), 4.0);
  PriceBook p(2, 3);
  EXPECT_EQ(p.storage.size(), 3u);
  EXPECT_EQ(p.cpu.size(), 3u);
}

}  // namespace
