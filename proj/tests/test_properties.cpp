#include <doctest.h>

#include "bod/synth.hpp"
#include "properties.hpp"

using namespace bod;
using namespace bod::testing;

#define CHECK_PROPERTY(expr)                     \
  do {                                           \
    const auto failure = (expr);                 \
    INFO(failure.value_or(""));                  \
    CHECK_FALSE(failure.has_value());            \
  } while (false)

TEST_CASE("engine agrees with the naive oracle") { CHECK_PROPERTY(check_oracle_equivalence(1, 300)); }
TEST_CASE("complete sessions ask exactly d questions") { CHECK_PROPERTY(check_query_bound(2, 200)); }
TEST_CASE("alive sets form a descending chain") { CHECK_PROPERTY(check_survivor_chain(3, 200)); }
TEST_CASE("the pivot always survives") { CHECK_PROPERTY(check_pivot_survival(4, 200)); }
TEST_CASE("the final round keeps the utility maxima") { CHECK_PROPERTY(check_terminal_collapse(5, 200)); }
TEST_CASE("per-column rescaling changes nothing") { CHECK_PROPERTY(check_scale_invariance(6, 200)); }
TEST_CASE("sessions are deterministic") { CHECK_PROPERTY(check_determinism(7, 100)); }

TEST_CASE("partial rankings also match the oracle") {
  std::mt19937_64 rng(8);
  for (int t = 0; t < 200; ++t) {
    auto inst = random_instance(rng, 30, 8);
    inst.choices.resize(rng() % (inst.choices.size() + 1));
    const auto session = run_all(inst.table, inst.choices);
    REQUIRE(replay_oracle(*inst.table, inst.choices) == session.history());
  }
}
