#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "support/fixtures.hpp"
#include "support/oracle.hpp"
#include "uctt/evaluation.hpp"

using namespace uctt;
using testsupport::toy_instance;

namespace {

Timetable timetable_of(std::vector<int> slots) {
    Timetable tt;
    tt.event_slot = std::move(slots);
    return tt;
}

}  // namespace

TEST_CASE("two lectures of different courses in one room-period is one HC2 pair") {
    const Instance toy = toy_instance();
    // C1_1 and C2_1 both in slot 0 (R1, period 0); the rest spread out.
    const Timetable tt = timetable_of({0, 2, 0, 3});
    const ViolationReport rep = hard_violations(toy, tt);
    CHECK(rep.hc2 == 1);
    CHECK(rep.hc1 == 0);
    CHECK(rep.hc3 == 0);
    CHECK(rep.hc4 == 0);
    CHECK(rep.hc5 == 0);
}

TEST_CASE("the worked soft genome decodes to a clash-free schedule") {
    const Instance toy = toy_instance();
    const Timetable tt = timetable_of({7, 0, 3, 1});
    CHECK(hard_violations(toy, tt).hard_total() == 0);
    CHECK(is_feasible(toy, tt));
}

TEST_CASE("an instance without courses evaluates to all zeros") {
    const Instance empty = Instance::from_parts("empty", {}, {{"R1", 10}}, {}, {}, 2, 2);
    const Timetable tt = Timetable::unassigned(0);
    CHECK(hard_violations(empty, tt) == ViolationReport{});
    CHECK(soft_penalty(empty, tt) == ViolationReport{});
    CHECK(is_feasible(empty, tt));
}

TEST_CASE("unassigned events count toward HC1") {
    const Instance toy = toy_instance();
    Timetable tt = Timetable::unassigned(4);
    CHECK(hard_violations(toy, tt).hc1 == 4);
    CHECK_FALSE(is_feasible(toy, tt));
    CHECK_THROWS_AS(soft_penalty(toy, tt), std::invalid_argument);

    tt.event_slot = {7, kUnassigned, 3, 1};
    CHECK(hard_violations(toy, tt).hc1 == 1);
}

TEST_CASE("timetable length must match the instance") {
    const Instance toy = toy_instance();
    CHECK_THROWS_AS(hard_violations(toy, Timetable::unassigned(3)), std::invalid_argument);
}

TEST_CASE("SC1 charges one point per student over capacity") {
    // One course, 30 students, one lecture in a 25-seat room.
    const Instance inst =
        Instance::from_parts("sc1", {{"C1", "T1", 1, 1, 30}}, {{"R1", 25}}, {}, {}, 1, 1);
    CHECK(soft_penalty(inst, timetable_of({0})).sc1 == 5);
}

TEST_CASE("SC2 charges five points per missing working day") {
    // Two lectures required on two days, both scheduled on day 0.
    const Instance inst =
        Instance::from_parts("sc2", {{"C1", "T1", 2, 2, 0}}, {{"R1", 10}}, {}, {}, 2, 2);
    const ViolationReport rep = soft_penalty(inst, timetable_of({0, 1}));
    CHECK(rep.sc2 == 5);
    // Spread over both days: no penalty.
    CHECK(soft_penalty(inst, timetable_of({0, 2})).sc2 == 0);
}

TEST_CASE("SC4 charges extra rooms used by a course") {
    const Instance toy = toy_instance();
    // C1 in R1 twice, C2 in R1 twice -> single room each.
    CHECK(soft_penalty(toy, timetable_of({0, 1, 2, 3})).sc4 == 0);
    // C1 split across R1 and R2.
    CHECK(soft_penalty(toy, timetable_of({0, 5, 2, 3})).sc4 == 1);
}

TEST_CASE("SC3 charges isolated curriculum lectures") {
    // Three courses in one curriculum on a 1-day, 4-period grid.
    const Instance inst = Instance::from_parts(
        "sc3", {{"A", "T1", 1, 1, 0}, {"B", "T2", 1, 1, 0}, {"C", "T3", 1, 1, 0}},
        {{"R1", 10}, {"R2", 10}}, {{"Q1", {"A", "B", "C"}}}, {}, 1, 4);
    // Periods 0,1,2: all adjacent to something.
    CHECK(soft_penalty(inst, timetable_of({0, 1, 2})).sc3 == 0);
    // Periods 0,2,2: nothing adjacent (a same-period lecture does not help).
    CHECK(soft_penalty(inst, timetable_of({0, 2, 6})).sc3 == 6);
    // Periods 0,1,3: only the lecture at period 3 is isolated.
    CHECK(soft_penalty(inst, timetable_of({0, 1, 3})).sc3 == 2);
}

TEST_CASE("stage fitness weights hard violations by 1000 in the soft stage") {
    const Instance toy = toy_instance();
    const Timetable feasible = timetable_of({7, 0, 3, 1});
    const ViolationReport rep = evaluate(toy, feasible);
    CHECK(rep.hard_total() == 0);
    CHECK(fitness(toy, feasible, Stage::Soft) == rep.soft_total());

    // C1's two lectures in the same period: 1 hard violation.
    const Timetable clash = timetable_of({1, 5, 2, 3});
    const ViolationReport clash_rep = evaluate(toy, clash);
    CHECK(clash_rep.hard_total() == 1);
    CHECK(fitness(toy, clash, Stage::Soft) == 1000 + clash_rep.soft_total());
    CHECK(fitness(toy, clash, Stage::Hard) == 1);
}

TEST_CASE("feasibility is exactly zero hard violations") {
    const Instance toy = toy_instance();
    CHECK(is_feasible(toy, timetable_of({7, 0, 3, 1})));
    CHECK_FALSE(is_feasible(toy, timetable_of({0, 2, 0, 3})));
    CHECK_FALSE(is_feasible(toy, Timetable::unassigned(4)));
}

TEST_CASE("solution text lists one line per assigned lecture") {
    const Instance toy = toy_instance();
    CHECK(solution_to_text(toy, timetable_of({7, 0, 3, 1})) ==
          "C1 R2 1 1\nC1 R1 0 0\nC2 R1 1 1\nC2 R1 0 1\n");
}

TEST_CASE("evaluator agrees with the brute-force oracle on random inputs") {
    std::mt19937_64 rng(20240601);
    for (int trial = 0; trial < 120; ++trial) {
        const Instance inst = testsupport::random_instance(rng);
        const Timetable tt = trial % 3 == 0 ? testsupport::random_partial_assignment(inst, rng)
                                            : testsupport::random_full_assignment(inst, rng);
        const ViolationReport expected = testsupport::oracle_report(inst, tt);
        ViolationReport got = hard_violations(inst, tt);
        if (tt.fully_assigned()) {
            const ViolationReport soft = soft_penalty(inst, tt);
            got.sc1 = soft.sc1;
            got.sc2 = soft.sc2;
            got.sc3 = soft.sc3;
            got.sc4 = soft.sc4;
        }
        INFO("trial " << trial << " on " << to_ctt(inst));
        REQUIRE(got == expected);
    }
}

TEST_CASE("assigning a clashing event never lowers the hard total") {
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 40; ++trial) {
        const Instance inst = testsupport::random_instance(rng);
        Timetable tt = testsupport::random_partial_assignment(inst, rng);
        int unassigned = -1, occupied_slot = -1;
        for (int e = 0; e < tt.size(); ++e) {
            if (!tt.assigned(e)) unassigned = e;
            else occupied_slot = tt.event_slot[e];
        }
        if (unassigned < 0 || occupied_slot < 0) continue;
        const int before = hard_violations(inst, tt).hard_total();
        tt.event_slot[unassigned] = occupied_slot;  // forces at least an HC2 pair
        CHECK(hard_violations(inst, tt).hard_total() >= before);
    }
}

TEST_CASE("lectures of a course are interchangeable") {
    std::mt19937_64 rng(4242);
    for (int trial = 0; trial < 40; ++trial) {
        const Instance inst = testsupport::random_instance(rng);
        const Timetable tt = testsupport::random_full_assignment(inst, rng);
        Timetable permuted = tt;
        // Reverse each course's block of slots.
        int event = 0;
        for (const Course& c : inst.courses()) {
            std::reverse(permuted.event_slot.begin() + event,
                         permuted.event_slot.begin() + event + c.lectures);
            event += c.lectures;
        }
        CHECK(evaluate(inst, tt) == evaluate(inst, permuted));
    }
}

TEST_CASE("soft fitness mod 1000 recovers the soft total for small penalties") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 40; ++trial) {
        const Instance inst = testsupport::random_instance(rng);
        const Timetable tt = testsupport::random_full_assignment(inst, rng);
        const ViolationReport rep = evaluate(inst, tt);
        if (rep.soft_total() < 1000)
            CHECK(fitness(inst, tt, Stage::Soft) % 1000 == rep.soft_total());
    }
}
