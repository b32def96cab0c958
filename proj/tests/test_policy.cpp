#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cstdint>
#include <limits>
#include <vector>

#include "capacity.hpp"
#include "errors.hpp"
#include "helpers.hpp"
#include "policy.hpp"

using namespace dagcast;
using namespace dagcast::testing;

namespace {

// r feeds a, b, c which all feed j; lets one node pick among three suppliers.
Network fan_net() {
  return Network::build({"r", "a", "b", "c", "j"}, "r",
                        {{"r", "a", 20},
                         {"r", "b", 20},
                         {"r", "c", 20},
                         {"a", "j", 10},
                         {"b", "j", 10},
                         {"c", "j", 10}});
}

FrontierState frontier(std::vector<std::int64_t> r) { return FrontierState{std::move(r)}; }

// Random frontier consistent with in-order delivery: every node trails the
// slowest in-neighbor by 0..3 packets.
FrontierState random_frontier(const Network& net, RngStream& rng) {
  FrontierState state = make_frontier(net);
  for (int v : topological_order(net)) {
    if (v == net.source()) {
      state.r[static_cast<std::size_t>(v)] = 100;
      continue;
    }
    std::int64_t lead = std::numeric_limits<std::int64_t>::max();
    for (int e : net.in_edges(v))
      lead = std::min(lead, state.r[static_cast<std::size_t>(net.edge(e).src)]);
    state.r[static_cast<std::size_t>(v)] =
        lead - static_cast<std::int64_t>(rng.bits() % 4);
  }
  return state;
}

}  // namespace

TEST_CASE("deficits take the slowest in-neighbor, ties to the smaller id") {
  Network net = fan_net();
  // a=18, b=15, c=14 feed j=10: deficit 4 via c.
  VirtualQueues vq = compute_virtual_queues(net, frontier({20, 18, 15, 14, 10}));
  CHECK(vq.x[4] == 4);
  CHECK(vq.supplier[4] == 3);
  CHECK(vq.x[1] == 2);
  CHECK(vq.supplier[1] == 0);
  CHECK(vq.x[0] == 0);
  CHECK(vq.supplier[0] == -1);

  // b and c tied at 14: the smaller node id wins.
  VirtualQueues tie = compute_virtual_queues(net, frontier({20, 18, 14, 14, 10}));
  CHECK(tie.x[4] == 4);
  CHECK(tie.supplier[4] == 2);

  VirtualQueues flat = compute_virtual_queues(net, frontier({9, 9, 9, 9, 9}));
  for (int j = 1; j < 5; ++j) CHECK(flat.x[static_cast<std::size_t>(j)] == 0);
}

TEST_CASE("dependents invert the supplier map") {
  Network chain = chain3_net();
  VirtualQueues vq = compute_virtual_queues(chain, frontier({7, 5, 0}));
  auto dep = compute_dependents(chain, vq);
  CHECK(dep[0] == std::vector<int>{1});
  CHECK(dep[1] == std::vector<int>{2});
  CHECK(dep[2].empty());

  Network net = fan_net();
  auto fan_dep = compute_dependents(net, compute_virtual_queues(net, frontier({20, 18, 15, 14, 10})));
  CHECK(fan_dep[3] == std::vector<int>{4});  // j leans on c
  CHECK(fan_dep[1].empty());
  CHECK(fan_dep[2].empty());
}

TEST_CASE("link weights price the receiver minus its dependents") {
  Network chain = chain3_net();
  FrontierState state = frontier({7, 5, 0});  // deficits a=2, b=5
  VirtualQueues vq = compute_virtual_queues(chain, state);
  auto dep = compute_dependents(chain, vq);

  auto w = link_weights(chain, vq, dep, 0b11);
  CHECK(w == std::vector<std::int64_t>{2 - 5, 5});

  // OFF edges weigh exactly zero no matter the deficits.
  CHECK(link_weights(chain, vq, dep, 0b10) == std::vector<std::int64_t>{0, 5});
  CHECK(link_weights(chain, vq, dep, 0b00) == std::vector<std::int64_t>{0, 0});
}

TEST_CASE("max-weight activation and its tie-breaking") {
  Network net = two_link_net();
  const std::size_t limit = default_matching_limit();

  CHECK(max_weight_activation(net, 0b11, {5, 3}, limit) == 0b01);
  CHECK(max_weight_activation(net, 0b11, {3, 5}, limit) == 0b10);
  // Equal scores: the numerically smaller mask.
  CHECK(max_weight_activation(net, 0b11, {4, 4}, limit) == 0b01);
  // Nothing positive on offer: stay silent.
  CHECK(max_weight_activation(net, 0b11, {-2, 0}, limit) == 0);
  CHECK(max_weight_activation(net, 0b00, {7, 7}, limit) == 0);

  // A negative-weight edge never rides along with a positive one.
  Network chain = chain3_net();
  CHECK(max_weight_activation(chain, 0b11, {-3, 5}, limit) == 0b10);
}

TEST_CASE("activation choice is invariant to scaling all deficits") {
  RngStream rng(20240817);
  int checked = 0;
  for (int trial = 0; trial < 40; ++trial) {
    Network net = random_dag(rng, 5 + static_cast<int>(rng.bits() % 2), 0.5);
    FrontierState base = random_frontier(net, rng);
    const EdgeMask sigma = rng.bits() & net.full_mask();
    VirtualQueues vq = compute_virtual_queues(net, base);
    auto dep = compute_dependents(net, vq);
    auto w = link_weights(net, vq, dep, sigma);
    // Triple every deficit: same argmax, since scores scale linearly and the
    // tie order is positional.
    auto w3 = w;
    for (auto& v : w3) v *= 3;
    const auto candidates = enumerate_matchings(net, sigma);
    CHECK(max_weight_activation(net, sigma, w, candidates) ==
          max_weight_activation(net, sigma, w3, candidates));
    ++checked;
  }
  CHECK(checked == 40);
}

TEST_CASE("packet transfers respect capacity, ceilings, and slot-start state") {
  Network net = fan_net();
  FrontierState state = frontier({20, 18, 15, 14, 10});

  // j's ceiling is min(18,15,14)-10 = 4 even though the link could carry 10.
  ScheduleOutcome out = schedule_packets(net, state, EdgeMask{1} << 5);  // c->j
  CHECK(out.next.r[4] == 14);
  CHECK(out.edge_packets[5] == 4);
  CHECK(out.next.r[3] == 14);  // senders unchanged

  // Unit capacity caps the transfer instead.
  Network chain = chain3_net();
  ScheduleOutcome one = schedule_packets(chain, frontier({7, 5, 0}), 0b10);
  CHECK(one.next.r[2] == 1);

  // Zero deficit moves nothing.
  ScheduleOutcome idle = schedule_packets(chain, frontier({4, 4, 4}), 0b11);
  CHECK(idle.next.r == std::vector<std::int64_t>{4, 4, 4});
  CHECK(idle.edge_packets == std::vector<std::int64_t>{0, 0});

  // No relaying within a slot: b cannot receive what a gets this slot.
  ScheduleOutcome first = schedule_packets(chain, frontier({5, 0, 0}), 0b01);
  CHECK(first.next.r == std::vector<std::int64_t>{5, 1, 0});
  ScheduleOutcome second = schedule_packets(chain, first.next, 0b10);
  CHECK(second.next.r == std::vector<std::int64_t>{5, 1, 1});
}

TEST_CASE("queue recursion check accepts honest slots and flags corrupted ones") {
  Network chain = chain3_net();
  FrontierState state = frontier({5, 2, 1});
  VirtualQueues prev = compute_virtual_queues(chain, state);  // x = {-, 3, 1}

  ScheduleOutcome out = schedule_packets(chain, state, 0b01);  // a receives 1
  FrontierState next_state = out.next;
  next_state.r[0] += 2;  // two fresh arrivals land at the source
  VirtualQueues next = compute_virtual_queues(chain, next_state);
  CHECK(next.x[1] == 4);  // both bounds below are tight
  CHECK(next.x[2] == 2);
  CHECK(lindley_violation(chain, prev, out.edge_packets, 2, next) == -1);

  VirtualQueues corrupt = next;
  corrupt.x[2] += 1;
  CHECK(lindley_violation(chain, prev, out.edge_packets, 2, corrupt) == 2);

  VirtualQueues corrupt_a = next;
  corrupt_a.x[1] += 1;
  CHECK(lindley_violation(chain, prev, out.edge_packets, 2, corrupt_a) == 1);
}

TEST_CASE("stale tables only refresh across participating edges") {
  Network net = Network::build({"r", "a"}, "r", {{"r", "a", 1}});
  DelayedView view(net);
  CHECK(view.value(1, 0) == 0);

  FrontierState truth = frontier({3, 0});
  view.update(net, 0b0, truth, 1);  // link OFF: nothing learned
  CHECK(view.value(1, 0) == 0);
  CHECK(view.value(1, 1) == 0);  // own row is always true

  view.update(net, 0b1, truth, 2);  // link ON: both sides refresh
  CHECK(view.value(1, 0) == 3);
  CHECK(view.stamp(1, 0) == 2);
  CHECK(view.value(0, 1) == 0);

  truth.r[0] = 9;
  for (int slot = 3; slot < 8; ++slot) view.update(net, 0b0, truth, slot);
  CHECK(view.value(1, 0) == 3);  // five OFF slots: still the last ON value

  // Gated exchange: probability 0 behaves like OFF and needs a stream.
  RngStream rng(7);
  view.update(net, 0b1, truth, 8, 0.0, &rng);
  CHECK(view.value(1, 0) == 3);
  CHECK_THROWS_AS(view.update(net, 0b1, truth, 9, 0.5, nullptr), Error);
}

TEST_CASE("second-hop values arrive through common neighbors") {
  Network net = diamond_net();  // r->a, r->b, a->t, b->t
  DelayedView view(net);
  FrontierState truth = frontier({10, 4, 6, 1});
  view.update(net, net.full_mask(), truth, 1);
  // a never met b, yet r and t both relayed b's counter.
  CHECK(view.value(1, 2) == 6);
  CHECK(view.stamp(1, 2) == 1);
  CHECK(view.value(2, 1) == 4);

  // With everything fresh the stale-view weights match the true ones.
  VirtualQueues vq = compute_virtual_queues(net, truth);
  auto dep = compute_dependents(net, vq);
  CHECK(delayed_link_weights(net, view, net.full_mask()) ==
        link_weights(net, vq, dep, net.full_mask()));
}

TEST_CASE("with all links ON the delayed policy reproduces the instant one") {
  for (const Network& net : {diamond_net(), chain3_net(), grid3x3_net()}) {
    const auto candidates = enumerate_matchings(net, net.full_mask());
    DelayedView view(net);
    FrontierState state = make_frontier(net);
    for (int slot = 1; slot <= 40; ++slot) {
      state.r[static_cast<std::size_t>(net.source())] += 1;  // steady arrivals
      view.update(net, net.full_mask(), state, slot);

      VirtualQueues vq = compute_virtual_queues(net, state);
      auto dep = compute_dependents(net, vq);
      const EdgeMask instant = max_weight_activation(
          net, net.full_mask(), link_weights(net, vq, dep, net.full_mask()), candidates);
      const EdgeMask delayed = delayed_activation(net, net.full_mask(), view, candidates);
      REQUIRE(instant == delayed);
      state = schedule_packets(net, state, delayed).next;
    }
  }
}

TEST_CASE("randomized policy construction solves the inflow targets") {
  Network net = two_link_net();
  ConfigTable table;
  table.masks = {0b01, 0b10};
  table.probs = {0.5, 0.5};
  CapacityResult cap = compute_capacity(net, table);
  REQUIRE(cap.lambda_star == doctest::Approx(0.5).epsilon(1e-9));

  RandPolicy policy = build_rand_policy(net, table, 0.3, cap);
  CHECK(policy.label == std::vector<int>{1, 2, 3});
  CHECK(policy.accept[0] == 1.0);
  // accept * served rate reproduces the target inflow exactly.
  const double eps = cap.lambda_star - 0.3;
  for (int v = 1; v <= 2; ++v) {
    const double target = 0.3 + eps * policy.label[static_cast<std::size_t>(v)] / 3.0;
    CHECK(policy.accept[static_cast<std::size_t>(v)] *
              cap.node_cut_rate[static_cast<std::size_t>(v)] ==
          doctest::Approx(target).epsilon(1e-12));
  }
  // Equal served rates make the acceptance strictly increase along the order.
  CHECK(policy.accept[1] < policy.accept[2]);

  // Zero target rate still thins with positive probabilities.
  RandPolicy zero = build_rand_policy(net, table, 0.0, cap);
  CHECK(zero.accept[1] > 0.0);
  CHECK(zero.accept[1] < zero.accept[2]);

  CHECK_THROWS_AS(build_rand_policy(net, table, 0.5, cap), Error);
  try {
    build_rand_policy(net, table, 0.6, cap);
    FAIL("expected a failure");
  } catch (const Error& e) {
    CHECK(e.kind() == Err::RateAboveCapacity);
  }
  CHECK_THROWS_AS(build_rand_policy(net, table, -0.1, cap), Error);
}

TEST_CASE("randomized activation samples, thins, and rejects unknown configurations") {
  Network net = two_link_net();
  RandPolicy manual;
  manual.support = {0b11};
  manual.dists = {ActivationDist{{0b01, 0b10}, {0.5, 0.5}}};
  manual.accept = {1.0, 1.0, 1.0};
  manual.label = {1, 2, 3};

  RngStream rng = RngStream::derive(42, kStreamPolicy, 0);
  bool saw_a = false;
  bool saw_b = false;
  for (int i = 0; i < 200; ++i) {
    const EdgeMask act = rand_activation(net, manual, 0b11, rng);
    REQUIRE((act == 0b01 || act == 0b10));  // acceptance 1 keeps the sample intact
    saw_a = saw_a || act == 0b01;
    saw_b = saw_b || act == 0b10;
  }
  CHECK(saw_a);
  CHECK(saw_b);

  // Acceptance 0 silences everything.
  RandPolicy mute = manual;
  mute.accept = {1.0, 0.0, 0.0};
  for (int i = 0; i < 50; ++i) CHECK(rand_activation(net, mute, 0b11, rng) == 0);

  try {
    rand_activation(net, manual, 0b01, rng);
    FAIL("expected a failure");
  } catch (const Error& e) {
    CHECK(e.kind() == Err::UnknownConfiguration);
  }

  // Same seed, same draw sequence.
  RngStream r1 = RngStream::derive(7, kStreamPolicy, 3);
  RngStream r2 = RngStream::derive(7, kStreamPolicy, 3);
  for (int i = 0; i < 20; ++i)
    CHECK(rand_activation(net, manual, 0b11, r1) == rand_activation(net, manual, 0b11, r2));
}

TEST_CASE("supplier chains walk back to the source and telescope the counters") {
  Network chain = chain3_net();
  VirtualQueues vq = compute_virtual_queues(chain, frontier({7, 5, 0}));
  CHECK(construct_path(chain, vq, 2) == std::vector<int>{0, 1, 2});
  CHECK(construct_path(chain, vq, 1) == std::vector<int>{0, 1});
  CHECK_THROWS_AS(construct_path(chain, vq, 0), Error);

  Network net = fan_net();
  VirtualQueues fan_vq = compute_virtual_queues(net, frontier({20, 18, 15, 14, 10}));
  CHECK(construct_path(net, fan_vq, 4) == std::vector<int>{0, 3, 4});

  RngStream rng(99);
  for (int trial = 0; trial < 30; ++trial) {
    Network g = random_dag(rng, 6, 0.5);
    FrontierState state = random_frontier(g, rng);
    VirtualQueues q = compute_virtual_queues(g, state);
    for (int j = 0; j < g.node_count(); ++j) {
      if (j == g.source()) continue;
      std::int64_t drop = 0;
      for (int v : construct_path(g, q, j)) {
        if (v != g.source()) drop += q.x[static_cast<std::size_t>(v)];
      }
      CHECK(state.r[static_cast<std::size_t>(j)] ==
            state.r[static_cast<std::size_t>(g.source())] - drop);
    }
  }
}
