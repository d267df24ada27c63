#include <gtest/gtest.h>

#include <cmath>

#include "netopt/flow.hpp"
#include "netopt/generate.hpp"
#include "netopt/rng.hpp"
#include "netopt/validate.hpp"
#include "oracle.hpp"
#include "test_util.hpp"

namespace netopt {
namespace {

using testutil::make_arc;
using testutil::make_demand;
using testutil::make_instance;

TEST(PropagateFlows, SingleDirectDemand) {
  Instance inst = make_instance(2);
  inst.arcs.push_back(make_arc(0, 1));
  inst.demands.push_back(make_demand(0, 1, 10.0));
  RoutingTable rt;
  rt.set(0, 1, 1);
  FlowState fs = propagate_flows(inst, rt);
  EXPECT_DOUBLE_EQ(fs.flow_at(0, 1), 10.0);
  EXPECT_DOUBLE_EQ(fs.service_flow_at(0, 1), 10.0);
  EXPECT_TRUE(fs.sort_load.empty());
}

// Two demands toward the same destination, one transferring at the other's
// origin: the transferred volume joins the onward flow and the sorting load.
TEST(PropagateFlows, MergeAtTransferNode) {
  Instance inst = make_instance(3);
  inst.arcs.push_back(make_arc(0, 1));
  inst.arcs.push_back(make_arc(1, 2));
  inst.demands.push_back(make_demand(0, 2, 10.0));
  inst.demands.push_back(make_demand(1, 2, 5.0));
  RoutingTable rt;
  rt.set(0, 2, 1);
  rt.set(0, 1, 1);
  rt.set(1, 2, 2);
  FlowState fs = propagate_flows(inst, rt);
  EXPECT_DOUBLE_EQ(fs.flow_at(1, 2), 15.0);
  EXPECT_DOUBLE_EQ(fs.sort_load_at(1), 10.0);
  EXPECT_DOUBLE_EQ(fs.service_flow_at(0, 1), 10.0);
  EXPECT_DOUBLE_EQ(fs.service_flow_at(1, 2), 15.0);

  auto oracle_flows = oracle::fixpoint_flows(inst, rt);
  ASSERT_TRUE(oracle_flows.has_value());
  EXPECT_NEAR(oracle_flows->at({1, 2}), 15.0, 1e-12);
  EXPECT_NEAR(oracle_flows->at({0, 2}), 10.0, 1e-12);
}

TEST(PropagateFlows, FrequencyIsFlowOverCarrierSize) {
  Instance inst = make_instance(2);
  inst.arcs.push_back(make_arc(0, 1, 10.0, 100.0, 60.0));
  inst.demands.push_back(make_demand(0, 1, 240.0));
  RoutingTable rt;
  rt.set(0, 1, 1);
  FlowState fs = propagate_flows(inst, rt);
  EXPECT_DOUBLE_EQ(fs.frequency.at({0, 1}), 4.0);
}

TEST(PropagateFlows, CycleIsAnError) {
  Instance inst = make_instance(3);
  inst.arcs.push_back(make_arc(0, 1));
  inst.arcs.push_back(make_arc(1, 0));
  inst.demands.push_back(make_demand(0, 2, 1.0));
  RoutingTable rt;
  rt.set(0, 2, 1);
  rt.set(0, 1, 1);
  rt.set(1, 2, 0);
  rt.set(1, 0, 0);
  try {
    propagate_flows(inst, rt);
    FAIL() << "expected CycleError";
  } catch (const CycleError& e) {
    EXPECT_EQ(e.dest, 2);
    EXPECT_EQ(e.cycle.size(), 2u);
  }
}

TEST(ExtractChain, DirectAndTransfer) {
  Instance inst = make_instance(4);
  inst.arcs.push_back(make_arc(0, 1));
  inst.arcs.push_back(make_arc(1, 2));
  inst.arcs.push_back(make_arc(2, 3));
  inst.arcs.push_back(make_arc(0, 3));
  Demand direct = make_demand(0, 3, 1.0);

  RoutingTable rt;
  rt.set(0, 3, 3);
  TransferChain chain = extract_chain(inst, rt, direct);
  EXPECT_EQ(chain.nodes, (std::vector<NodeId>{0, 3}));
  EXPECT_TRUE(chain.direct());

  RoutingTable via;
  via.set(0, 3, 1);
  via.set(0, 1, 1);
  via.set(1, 3, 2);
  via.set(1, 2, 2);
  via.set(2, 3, 3);
  chain = extract_chain(inst, via, direct);
  EXPECT_EQ(chain.nodes, (std::vector<NodeId>{0, 1, 2, 3}));
}

TEST(ExtractChain, ReportsTwoCycle) {
  Instance inst = make_instance(3);
  inst.arcs.push_back(make_arc(0, 1));
  inst.arcs.push_back(make_arc(1, 0));
  RoutingTable rt;
  rt.set(0, 2, 1);
  rt.set(1, 2, 0);
  try {
    extract_chain(inst, rt, testutil::make_demand(0, 2, 1.0));
    FAIL() << "expected CycleError";
  } catch (const CycleError& e) {
    EXPECT_EQ(e.cycle, (std::vector<NodeId>{0, 1}));
  }
}

TEST(EnumerateChains, DirectOnlyAtZeroTransfers) {
  Instance inst = make_instance(3);
  inst.arcs.push_back(make_arc(0, 2));
  inst.arcs.push_back(make_arc(0, 1));
  inst.arcs.push_back(make_arc(1, 2));
  auto chains = enumerate_chains(inst, testutil::make_demand(0, 2, 1.0), 0);
  ASSERT_EQ(chains.size(), 1u);
  EXPECT_EQ(chains[0].nodes, (std::vector<NodeId>{0, 2}));
}

TEST(EnumerateChains, UnreachableDestinationIsEmpty) {
  Instance inst = make_instance(3);
  inst.arcs.push_back(make_arc(0, 1));
  EXPECT_TRUE(enumerate_chains(inst, testutil::make_demand(0, 2, 1.0), 4).empty());
}

TEST(EnumerateChains, LexicographicOrderAndCandidateFilter) {
  Instance inst = make_instance(4);
  inst.arcs.push_back(make_arc(0, 3));
  inst.arcs.push_back(make_arc(0, 1));
  inst.arcs.push_back(make_arc(0, 2));
  inst.arcs.push_back(make_arc(1, 3));
  inst.arcs.push_back(make_arc(2, 3));
  inst.arcs.push_back(make_arc(1, 2));
  auto chains = enumerate_chains(inst, testutil::make_demand(0, 3, 1.0), 2);
  ASSERT_EQ(chains.size(), 4u);
  EXPECT_EQ(chains[0].nodes, (std::vector<NodeId>{0, 1, 2, 3}));
  EXPECT_EQ(chains[1].nodes, (std::vector<NodeId>{0, 1, 3}));
  EXPECT_EQ(chains[2].nodes, (std::vector<NodeId>{0, 2, 3}));
  EXPECT_EQ(chains[3].nodes, (std::vector<NodeId>{0, 3}));

  inst.candidate_transfers[{0, 3}] = {2};  // node 1 no longer allowed en route
  chains = enumerate_chains(inst, testutil::make_demand(0, 3, 1.0), 2);
  ASSERT_EQ(chains.size(), 2u);
  EXPECT_EQ(chains[0].nodes, (std::vector<NodeId>{0, 2, 3}));
  EXPECT_EQ(chains[1].nodes, (std::vector<NodeId>{0, 3}));
}

GeneratorSpec small_spec(std::uint64_t seed) {
  GeneratorSpec spec;
  spec.seed = seed;
  spec.local_centers = 2;
  spec.sorting_centers = 2;
  spec.terminals = 2;
  spec.demand_count = 3;
  spec.road_density = 0.7;
  return spec;
}

// Flow invariants on random solved instances: conservation into each
// destination, monotonicity above original demand, the balance between
// transferred and directly departing volume, and purity.
TEST(FlowProperties, RandomInstances) {
  Rng rng(7);
  int checked = 0;
  for (std::uint64_t seed = 0; seed < 60 && checked < 40; ++seed) {
    Instance inst = generate(small_spec(seed));
    auto rt = oracle::random_valid_table(inst, rng);
    if (!rt) continue;
    ++checked;
    FlowState fs = propagate_flows(inst, *rt);
    EXPECT_EQ(fs, propagate_flows(inst, *rt));

    std::map<NodeId, double> inbound, demand_total;
    for (const Demand& d : inst.demands) demand_total[d.dest] += d.volume;
    for (const auto& [pair, f] : fs.flow) {
      auto hop = rt->next(pair.first, pair.second);
      ASSERT_TRUE(hop.has_value());
      if (*hop == pair.second) inbound[pair.second] += f;
    }
    for (const auto& [dest, total] : demand_total)
      EXPECT_NEAR(inbound[dest], total, 1e-9 * std::max(1.0, total));

    for (const Demand& d : inst.demands)
      EXPECT_GE(fs.flow_at(d.origin, d.dest), d.volume - 1e-12);

    double total_flow = 0.0, direct_flow = 0.0, total_sorted = 0.0;
    for (const auto& [pair, f] : fs.flow) {
      total_flow += f;
      if (rt->next(pair.first, pair.second) == std::optional<NodeId>(pair.second))
        direct_flow += f;
    }
    for (const auto& [node, load] : fs.sort_load) total_sorted += load;
    EXPECT_NEAR(total_sorted, total_flow - direct_flow,
                1e-9 * std::max(1.0, total_flow));

    for (const Demand& d : inst.demands) {
      TransferChain chain = extract_chain(inst, *rt, d);
      for (std::size_t m = 0; m + 1 < chain.nodes.size(); ++m)
        EXPECT_GE(fs.flow_at(chain.nodes[m], d.dest), d.volume - 1e-12);
    }
  }
  EXPECT_GE(checked, 20);
}

}  // namespace
}  // namespace netopt
