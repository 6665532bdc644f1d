#include <doctest.h>

#include <algorithm>
#include <random>

#include "warmslice/units.hpp"

using namespace warmslice;

namespace {

std::vector<MilliCpu> mcpu_list(std::initializer_list<int> values) {
    std::vector<MilliCpu> out;
    for (int v : values) out.push_back(MilliCpu(v));
    return out;
}

}  // namespace

TEST_CASE("cfs shares split 2:1 for 100m vs 50m under full contention") {
    for (int cap : {1000, 3000, 8000}) {
        const auto limits = mcpu_list({100, 50});
        const Allocation a = cfs_allocate_contended(limits, MilliCpu(cap));
        CHECK(a.rates[0] / cap == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
        CHECK(a.rates[1] / cap == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
        CHECK(a.total() == doctest::Approx(cap).epsilon(1e-12));
    }
}

TEST_CASE("cfs_allocate hands out limits when the node is not contended") {
    const auto limits = mcpu_list({1000});
    const Allocation a = cfs_allocate(limits, MilliCpu(8000));
    CHECK(a.rates == std::vector<double>{1000.0});

    const auto two = mcpu_list({100, 50});
    const Allocation b = cfs_allocate(two, MilliCpu(3000));
    CHECK(b.rates == std::vector<double>{100.0, 50.0});
}

TEST_CASE("cfs_allocate splits capacity equally between equal claimants") {
    // hand water-fill: four equal weights over 2000m -> 500m each
    const auto limits = mcpu_list({1000, 1000, 1000, 1000});
    const Allocation a = cfs_allocate(limits, MilliCpu(2000));
    for (double r : a.rates) CHECK(r == doctest::Approx(500.0).epsilon(1e-12));
}

TEST_CASE("cfs_allocate caps fast claimants and redistributes the surplus") {
    // hand water-fill with weights != even: limits {100, 1000, 1000} over
    // 1500m. Proportional shares {71.4, 714.3, 714.3} cap nobody, so the
    // split is purely proportional.
    const auto limits = mcpu_list({100, 1000, 1000});
    const Allocation a = cfs_allocate(limits, MilliCpu(1500));
    CHECK(a.rates[0] == doctest::Approx(1500.0 * 100 / 2100).epsilon(1e-12));
    CHECK(a.rates[1] == doctest::Approx(1500.0 * 1000 / 2100).epsilon(1e-12));
    CHECK(a.total() == doctest::Approx(1500.0).epsilon(1e-12));
}

TEST_CASE("cfs_allocate rejects empty input") {
    CHECK_THROWS_AS(cfs_allocate({}, MilliCpu(1000)), std::invalid_argument);
    CHECK_THROWS_AS(MilliCpu(0), std::invalid_argument);
}

TEST_CASE("cfs_allocate conserves, respects limits, and is order/scale covariant") {
    std::mt19937 meta(7);
    std::uniform_int_distribution<int> limit_dist(1, 4000);
    std::uniform_int_distribution<int> cap_dist(1000, 16000);
    std::uniform_int_distribution<int> n_dist(1, 12);

    for (int trial = 0; trial < 200; ++trial) {
        const int n = n_dist(meta);
        std::vector<MilliCpu> limits;
        double limit_sum = 0;
        for (int i = 0; i < n; ++i) {
            limits.push_back(MilliCpu(limit_dist(meta)));
            limit_sum += limits.back().value;
        }
        const MilliCpu cap(cap_dist(meta));
        const Allocation a = cfs_allocate(limits, cap);

        CHECK(a.total() ==
              doctest::Approx(std::min(limit_sum, static_cast<double>(cap.value))).epsilon(1e-9));
        for (int i = 0; i < n; ++i) CHECK(a.rates[i] <= limits[i].value * (1 + 1e-12));

        // permutation equivariance
        std::vector<std::size_t> perm(n);
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), meta);
        std::vector<MilliCpu> shuffled;
        for (std::size_t p : perm) shuffled.push_back(limits[p]);
        const Allocation b = cfs_allocate(shuffled, cap);
        for (int i = 0; i < n; ++i)
            CHECK(b.rates[i] == doctest::Approx(a.rates[perm[i]]).epsilon(1e-12));
    }
}

TEST_CASE("doubling capacity doubles oversubscribed identical rates") {
    const auto limits = mcpu_list({1000, 1000, 1000, 1000});
    const Allocation lo = cfs_allocate(limits, MilliCpu(2000));
    const Allocation hi = cfs_allocate(limits, MilliCpu(4000));
    for (int i = 0; i < 4; ++i) CHECK(hi.rates[i] == doctest::Approx(2 * lo.rates[i]));
}

TEST_CASE("task_duration_at matches the linear model") {
    CHECK(task_duration_at(CpuWork(5310.0), 1000.0) == doctest::Approx(5.31).epsilon(1e-12));
    CHECK(task_duration_at(CpuWork(0.0), 123.0) == 0.0);
    CHECK(task_duration_at(CpuWork(5310.0), 1.0) == doctest::Approx(5310.0).epsilon(1e-12));
    CHECK_THROWS_AS(task_duration_at(CpuWork(1.0), 0.0), std::invalid_argument);
    CHECK_THROWS_AS(task_duration_at(CpuWork(1.0), -5.0), std::invalid_argument);
}

TEST_CASE("advance_work drains linearly and clamps at zero") {
    CHECK(advance_work(CpuWork(5310.0), 1000.0, 5.31).amount == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(advance_work(CpuWork(5310.0), 0.0, 100.0).amount == 5310.0);
    CHECK(advance_work(CpuWork(5310.0), 1.0, 56.44).amount ==
          doctest::Approx(5253.56).epsilon(1e-12));
    CHECK(advance_work(CpuWork(10.0), 1000.0, 100.0).amount == 0.0);
    CHECK_THROWS_AS(advance_work(CpuWork(1.0), 1.0, -1.0), std::invalid_argument);
}

TEST_CASE("advancing for task_duration_at leaves nothing behind") {
    std::mt19937 meta(11);
    std::uniform_real_distribution<double> work_dist(0.1, 1e7);
    std::uniform_real_distribution<double> rate_dist(0.5, 8000.0);
    for (int trial = 0; trial < 500; ++trial) {
        const CpuWork w(work_dist(meta));
        const double rate = rate_dist(meta);
        const double left = advance_work(w, rate, task_duration_at(w, rate)).amount;
        CHECK(left <= 1e-9 * w.amount);
    }
}

TEST_CASE("relative_latency normalizes against the baseline") {
    CHECK(relative_latency(286.99 * 5.31, 5.31) == doctest::Approx(286.99).epsilon(1e-12));
    CHECK(relative_latency(1.13 * 2465.18, 2465.18) == doctest::Approx(1.13).epsilon(1e-12));
    for (double x : {0.001, 5.31, 2465.18, 119028.34}) CHECK(relative_latency(x, x) == 1.0);
    CHECK_THROWS_AS(relative_latency(1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(relative_latency(1.0, -2.0), std::invalid_argument);
}
