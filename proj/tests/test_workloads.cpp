#include <doctest.h>

#include <random>

#include "warmslice/workloads.hpp"

using namespace warmslice;

namespace {

std::vector<std::pair<int, int>> timed_pairs(const ResizePlan& plan) {
    std::vector<std::pair<int, int>> out;
    for (const auto& s : plan.timed_steps()) out.emplace_back(s.from.value, s.to.value);
    return out;
}

}  // namespace

TEST_CASE("catalog holds the six measured workloads") {
    const auto& c = catalog();
    REQUIRE(c.size() == 6);
    CHECK(find_workload("helloworld").runtime_at_1000m_ms == 5.31);
    CHECK(find_workload("helloworld").work.amount == doctest::Approx(5310.0));
    CHECK(find_workload("cpu").runtime_at_1000m_ms == 2465.18);
    CHECK(find_workload("io").runtime_at_1000m_ms == 2258.22);
    CHECK(find_workload("videos-10s").runtime_at_1000m_ms == 1659.03);
    CHECK(find_workload("videos-1m").runtime_at_1000m_ms == 13888.03);
    CHECK(find_workload("videos-10m").runtime_at_1000m_ms == 119028.34);
    CHECK_THROWS_AS(find_workload("nonexistent"), NotFoundError);
    for (const auto& w : c) CHECK(w.cpu_bound_fraction == 1.0);
}

TEST_CASE("catalog is stable across calls") {
    const auto& a = catalog();
    const auto& b = catalog();
    CHECK(&a == &b);
}

TEST_CASE("incremental up plan steps climb the 100m ladder") {
    const auto plan = resize_plan(100_mcpu, Pattern::Incremental, Direction::Up, 1_mcpu, 1000_mcpu);
    const std::vector<std::pair<int, int>> expected = {
        {1, 100},   {100, 200}, {200, 300}, {300, 400}, {400, 500},
        {500, 600}, {600, 700}, {700, 800}, {800, 900}, {900, 1000}};
    CHECK(timed_pairs(plan) == expected);
    CHECK(plan.steps.size() == 10);
}

TEST_CASE("cumulative up plan resets to the initial value between steps") {
    const auto plan = resize_plan(100_mcpu, Pattern::Cumulative, Direction::Up, 1_mcpu, 1000_mcpu);
    const auto timed = timed_pairs(plan);
    REQUIRE(timed.size() == 10);
    for (std::size_t i = 0; i < timed.size(); ++i) {
        CHECK(timed[i].first == 1);
        CHECK(timed[i].second == static_cast<int>((i + 1) * 100));
    }
    // 10 timed steps interleaved with 9 untimed resets back to 1m
    CHECK(plan.steps.size() == 19);
    for (const auto& s : plan.steps)
        if (!s.timed) CHECK(s.to.value == 1);
}

TEST_CASE("incremental down plan with 1000m steps ends on the short hop to 1m") {
    const auto plan =
        resize_plan(1000_mcpu, Pattern::Incremental, Direction::Down, 6000_mcpu, 1_mcpu);
    const std::vector<std::pair<int, int>> expected = {{6000, 5000}, {5000, 4000}, {4000, 3000},
                                                       {3000, 2000}, {2000, 1000}, {1000, 1}};
    CHECK(timed_pairs(plan) == expected);
}

TEST_CASE("oversized step collapses to a single hop") {
    const auto plan = resize_plan(100_mcpu, Pattern::Incremental, Direction::Down, 100_mcpu, 1_mcpu);
    CHECK(timed_pairs(plan) == std::vector<std::pair<int, int>>{{100, 1}});
    CHECK_THROWS_AS(
        resize_plan(100_mcpu, Pattern::Incremental, Direction::Up, 500_mcpu, 500_mcpu),
        std::invalid_argument);
}

TEST_CASE("fine plans walk 5m steps in both directions") {
    const auto [up, down] = fine_plan();
    const auto up_pairs = timed_pairs(up);
    REQUIRE(up_pairs.size() == 199);
    CHECK(up_pairs[0] == std::pair{5, 10});
    CHECK(up_pairs[1] == std::pair{10, 15});
    CHECK(up_pairs.back() == std::pair{995, 1000});

    const auto down_pairs = timed_pairs(down);
    REQUIRE(down_pairs.size() == 199);
    CHECK(down_pairs.front() == std::pair{1000, 995});
    CHECK(down_pairs.back() == std::pair{10, 5});
}

TEST_CASE("the stepped-resize suite covers all eight configurations") {
    const auto suite = table2_suite();
    REQUIRE(suite.size() == 8);

    auto find_plan = [&](MilliCpu step, Pattern p, Direction d) -> const ResizePlan& {
        for (const auto& plan : suite)
            if (plan.step_size == step && plan.pattern == p && plan.direction == d) return plan;
        FAIL("missing plan");
        return suite[0];
    };

    CHECK(find_plan(100_mcpu, Pattern::Incremental, Direction::Up).initial.value == 1);
    CHECK(find_plan(100_mcpu, Pattern::Incremental, Direction::Up).target.value == 1000);
    CHECK(find_plan(100_mcpu, Pattern::Incremental, Direction::Down).initial.value == 1000);
    CHECK(find_plan(100_mcpu, Pattern::Incremental, Direction::Down).target.value == 1);
    CHECK(find_plan(100_mcpu, Pattern::Cumulative, Direction::Up).target.value == 1000);
    // measured-data endpoints for the cumulative/down fine row
    CHECK(find_plan(100_mcpu, Pattern::Cumulative, Direction::Down).initial.value == 100);
    CHECK(find_plan(100_mcpu, Pattern::Cumulative, Direction::Down).target.value == 1);
    CHECK(find_plan(1000_mcpu, Pattern::Incremental, Direction::Up).target.value == 6000);
    CHECK(find_plan(1000_mcpu, Pattern::Incremental, Direction::Down).initial.value == 6000);
    CHECK(find_plan(1000_mcpu, Pattern::Cumulative, Direction::Up).target.value == 6000);
    CHECK(find_plan(1000_mcpu, Pattern::Cumulative, Direction::Down).target.value == 1);

    // the literal-endpoints variant restores the published 1000m start
    const auto literal = table2_suite(true);
    bool found = false;
    for (const auto& plan : literal)
        if (plan.step_size == 100_mcpu && plan.pattern == Pattern::Cumulative &&
            plan.direction == Direction::Down) {
            CHECK(plan.initial.value == 1000);
            CHECK(plan.target.value == 1);
            found = true;
        }
    CHECK(found);
}

TEST_CASE("generated plans chain correctly and stay in range") {
    std::mt19937 meta(23);
    std::uniform_int_distribution<int> step_dist(1, 1500);
    std::uniform_int_distribution<int> end_dist(1, 8000);
    for (int trial = 0; trial < 300; ++trial) {
        const int step = step_dist(meta);
        int a = end_dist(meta), b = end_dist(meta);
        if (a == b) continue;
        const Direction dir = b > a ? Direction::Up : Direction::Down;
        const Pattern pat = trial % 2 ? Pattern::Incremental : Pattern::Cumulative;
        const auto plan = resize_plan(MilliCpu(step), pat, dir, MilliCpu(a), MilliCpu(b));

        REQUIRE(!plan.steps.empty());
        const auto timed = plan.timed_steps();
        CHECK(timed.back().to.value == b);
        const int lo = std::min(a, b), hi = std::max(a, b);
        int cursor = a;
        for (const auto& s : plan.steps) {
            CHECK(s.from.value == cursor);  // replay continuity, resets included
            CHECK(s.from.value >= lo);
            CHECK(s.from.value <= hi);
            CHECK(s.to.value >= lo);
            CHECK(s.to.value <= hi);
            if (pat == Pattern::Cumulative && s.timed) CHECK(s.from.value == a);
            cursor = s.to.value;
        }
        if (pat == Pattern::Incremental)
            for (std::size_t i = 1; i < timed.size(); ++i)
                CHECK(timed[i].from == timed[i - 1].to);
    }
}

TEST_CASE("plan csv round-trips") {
    const auto plan = resize_plan(100_mcpu, Pattern::Cumulative, Direction::Up, 1_mcpu, 500_mcpu);
    const auto back = plan_from_csv(plan_to_csv(plan), plan.id);
    REQUIRE(back.steps.size() == plan.steps.size());
    for (std::size_t i = 0; i < plan.steps.size(); ++i) {
        CHECK(back.steps[i].from == plan.steps[i].from);
        CHECK(back.steps[i].to == plan.steps[i].to);
        CHECK(back.steps[i].timed == plan.steps[i].timed);
    }
    CHECK(back.initial == plan.initial);
    CHECK(back.target == plan.target);
    CHECK_THROWS_AS(plan_from_csv("step_index,from_mcpu,to_mcpu,timed\n"), FormatError);
    CHECK_THROWS_AS(plan_from_csv("step_index,from_mcpu,to_mcpu,timed\n0,x,100,true\n"),
                    FormatError);
}

TEST_CASE("reference ratios cover the catalog") {
    for (const auto& w : catalog()) {
        const auto& r = find_reference_ratios(w.name);
        CHECK(r.cold >= r.inplace);
        CHECK(r.inplace >= r.warm);
        CHECK(r.warm >= 1.0);
    }
    CHECK(find_reference_ratios("helloworld").cold == 286.99);
    CHECK(find_reference_ratios("helloworld").inplace == 15.81);
    CHECK(find_reference_ratios("helloworld").warm == 3.87);
    CHECK_THROWS_AS(find_reference_ratios("nope"), NotFoundError);
}

TEST_CASE("arrival plan validation") {
    ArrivalPlan p;
    p.workload = "helloworld";
    CHECK_NOTHROW(p.validate());
    p.vus = 0;
    CHECK_THROWS_AS(p.validate(), ValidationError);
    p.vus = 1;
    p.mode = ArrivalPlan::Mode::Poisson;
    CHECK_THROWS_AS(p.validate(), ValidationError);  // rate/horizon unset
    p.rate_rps = 2.0;
    p.horizon_ms = 1000.0;
    CHECK_NOTHROW(p.validate());
}
