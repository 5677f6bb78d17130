#include "doctest.h"
#include "pqsim/error.hpp"
#include "pqsim/predictor.hpp"
#include "pqsim/rng.hpp"

using namespace pqsim;

TEST_CASE("delay is completion minus issue") {
  CHECK(compute_delay(2, 6) == 4);
  CHECK(compute_delay(17, 17) == 0);
  CHECK(compute_delay(13, 14) == 1);
  CHECK_THROWS_AS(compute_delay(10, 9), InternalError);
}

TEST_CASE("predicted issue follows the max rule with a dispatch floor") {
  CHECK(predict_issue(13, {}) == 14);
  CHECK(predict_issue(14, {{14, 4, false}}) == 18);
  CHECK(predict_issue(18, {{17, 4, false}, {18, 4, false}}) == 22);
  // Completed producers contribute nothing.
  CHECK(predict_issue(20, {{5, 100, true}}) == 21);
  CHECK(predict_issue(20, {{5, 100, true}, {19, 3, false}}) == 22);
}

TEST_CASE("prediction is monotone in producer delays and floored") {
  Rng rng(5);
  for (int i = 0; i < 2000; ++i) {
    uint64_t dispatch = rng.below(1000);
    std::vector<ProducerTiming> prods;
    for (size_t p = rng.below(4); p-- > 0;)
      prods.push_back({rng.below(1000), rng.below(100), rng.chance(1, 4)});
    uint64_t base = predict_issue(dispatch, prods);
    CHECK(base >= dispatch + 1);
    if (!prods.empty()) {
      size_t bump = rng.below(prods.size());
      prods[bump].delay += 1 + rng.below(50);
      CHECK(predict_issue(dispatch, prods) >= base);
    }
  }
}

TEST_CASE("learned lookups fall back to the L1 hit value") {
  DelayCache cache(512, 4);
  DelayPolicy policy;
  CHECK(delay_lookup(cache, 0x400, policy, 4, 12, 92, false) == 4);
  cache.train(0x400, 10, 47, true, 1, policy);
  CHECK(delay_lookup(cache, 0x400, policy, 4, 12, 92, false) == 37);
  CHECK(cache.lookups() == 2);
  CHECK(cache.hits() == 1);
}

TEST_CASE("each policy resolves load delays its own way") {
  DelayCache cache(512, 4);
  cache.train(0x400, 0, 50, true, 1, DelayPolicy{});
  DelayPolicy p;
  p.selector = DelaySelector::StaticL1;
  CHECK(delay_lookup(cache, 0x400, p, 4, 12, 92, false) == 4);
  p.selector = DelaySelector::HitMissL2;
  CHECK(delay_lookup(cache, 0x400, p, 4, 12, 92, true) == 4);
  CHECK(delay_lookup(cache, 0x400, p, 4, 12, 92, false) == 12);
  p.selector = DelaySelector::HitMissDram;
  CHECK(delay_lookup(cache, 0x400, p, 4, 12, 92, false) == 92);
  p.selector = DelaySelector::DependenceOnly;
  CHECK(delay_lookup(cache, 0x400, p, 4, 12, 92, false) == 0);
  // None of the above touched the learned hit-rate counters.
  CHECK(cache.lookups() == 0);
}

TEST_CASE("training ignores L1 hits") {
  DelayCache cache(512, 4);
  cache.train(0x400, 10, 60, false, 1, DelayPolicy{});
  CHECK_FALSE(cache.probe(0x400));
}

TEST_CASE("training interval gates updates by per-pc execution count") {
  DelayCache cache(512, 4);
  DelayPolicy p;
  p.training_interval = 3;
  cache.train(0x400, 0, 20, true, 1, p);
  CHECK_FALSE(cache.probe(0x400));
  cache.train(0x400, 0, 20, true, 2, p);
  CHECK_FALSE(cache.probe(0x400));
  cache.train(0x400, 0, 20, true, 3, p);
  CHECK(cache.stored_delay(0x400) == uint64_t{20});
  cache.train(0x400, 0, 31, true, 4, p);
  CHECK(cache.stored_delay(0x400) == uint64_t{20});  // stale until 6
  cache.train(0x400, 0, 31, true, 6, p);
  CHECK(cache.stored_delay(0x400) == uint64_t{31});
}

TEST_CASE("saturating counter requires consecutive confirmation") {
  DelayCache cache(512, 4);
  DelayPolicy p;
  p.saturating_threshold = 2;
  cache.train(0x400, 0, 12, true, 1, p);  // installs 12
  REQUIRE(cache.stored_delay(0x400) == uint64_t{12});

  SUBCASE("two identical observations update") {
    cache.train(0x400, 0, 20, true, 2, p);
    CHECK(cache.stored_delay(0x400) == uint64_t{12});
    cache.train(0x400, 0, 20, true, 3, p);
    CHECK(cache.stored_delay(0x400) == uint64_t{20});
  }
  SUBCASE("alternating delays never update") {
    for (uint64_t it = 2; it < 12; ++it) {
      cache.train(0x400, 0, it % 2 == 0 ? 20 : 12, true, it, p);
      CHECK(cache.stored_delay(0x400) == uint64_t{12});
    }
  }
}

TEST_CASE("direct-mapped conflicts overwrite unconditionally") {
  DelayCache cache(64, 4);
  DelayPolicy p;
  p.saturating_threshold = 3;  // even with a threshold, conflicts replace
  cache.train(0x400, 0, 30, true, 1, p);
  uint64_t conflicting = 0x400 + 64 * 4;  // same index, different tag
  cache.train(conflicting, 0, 55, true, 1, p);
  CHECK_FALSE(cache.probe(0x400));
  CHECK(cache.stored_delay(conflicting) == uint64_t{55});
}

TEST_CASE("learned lookup returns the trained delay exactly") {
  Rng rng(9);
  DelayCache cache(128, 4);
  DelayPolicy p;
  for (int i = 0; i < 1000; ++i) {
    uint64_t pc = rng.below(1 << 20);
    uint64_t issue = rng.below(10000);
    uint64_t delay = 12 + rng.below(200);
    cache.train(pc, issue, issue + delay, true, 1, p);
    CHECK(cache.lookup(pc) == delay);
  }
}

TEST_CASE("repeat accuracy splits constant from alternating delays") {
  RepeatAccuracyTracker constant;
  for (int i = 0; i < 10; ++i) constant.observe(0x10, 40);
  CHECK(constant.accuracy() == 1.0);

  RepeatAccuracyTracker alternating;
  for (int i = 0; i < 10; ++i) alternating.observe(0x10, i % 2 ? 40 : 12);
  CHECK(alternating.accuracy() == 0.0);

  RepeatAccuracyTracker empty;
  CHECK_FALSE(empty.accuracy().has_value());
  empty.observe(0x10, 12);  // first observation has nothing to compare against
  CHECK_FALSE(empty.accuracy().has_value());
}
