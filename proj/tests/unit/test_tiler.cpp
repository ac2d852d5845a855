#include "../common/fixtures.hpp"

#include "mmmdse/errors.hpp"
#include "mmmdse/tiler.hpp"

#include <doctest.h>

#include <string>

using namespace mmmdse;

TEST_CASE("greedy selection on the toy target") {
    const auto hw = fixtures::toy();
    const auto dt = fixtures::toy_int32();
    const auto sel = select_parameters(hw, dt, std::nullopt);
    const auto& d = sel.design;
    CHECK(d.cfg.x_c == 1);
    CHECK(d.cfg.y_c == 2);
    CHECK(d.cfg.x_p == 2);
    CHECK(d.cfg.y_p == 1);
    // 2 PEs * ceil(2*32 / 36) blocks
    CHECK(d.min_blocks == 4);
    CHECK(d.usable_blocks == 4);
    CHECK(d.capacity_words == 4096);
    CHECK(d.x_tot * d.y_tot <= 4096);
    CHECK(d.feasible());
    CHECK(sel.steps.size() == 3);
}

TEST_CASE("toy brute force: no feasible configuration has more compute units") {
    const auto hw = fixtures::toy();
    const auto dt = fixtures::toy_int32();
    std::uint64_t best_units = 0;
    for (std::uint64_t y_c = 1; y_c <= 4; ++y_c) {
        for (std::uint64_t x_p = 1; x_p <= 4; ++x_p) {
            const TileConfig c{1, y_c, x_p, 1, 1024, 1, 1, 1};
            if (check_resource_feasibility(c, hw, dt).feasible()) best_units = std::max(best_units, c.compute_units());
        }
    }
    CHECK(best_units == 4);
    CHECK(select_parameters(hw, dt, std::nullopt).design.compute_units == best_units);
}

TEST_CASE("sweep ranks the greedy choice first on the toy target") {
    const auto hw = fixtures::toy();
    const auto dt = fixtures::toy_int32();
    const auto ranked = sweep(hw, dt, std::nullopt);
    REQUIRE_FALSE(ranked.empty());
    CHECK(ranked.front().cfg.y_c == 2);
    CHECK(ranked.front().cfg.x_p == 2);
    const auto greedy = select_parameters(hw, dt, std::nullopt).design;
    CHECK(ranked.front().cfg == greedy.cfg);
    for (const auto& d : ranked) CHECK(check_resource_feasibility(d.cfg, hw, dt, d.layout).feasible());
    for (std::size_t i = 1; i < ranked.size(); ++i) CHECK_FALSE(ranks_before(ranked[i], ranked[i - 1]));
}

TEST_CASE("unit bounds leave a single candidate") {
    const auto hw = fixtures::toy();
    const auto dt = fixtures::toy_int32();
    SearchBounds b;
    b.max_y_c = 1;
    b.max_x_p = 1;
    b.max_x_t = 1;
    b.max_y_t = 1;
    b.max_x_b = 1;
    b.max_y_b = 1;
    const auto ranked = sweep(hw, dt, std::nullopt, b);
    REQUIRE(ranked.size() == 1);
    CHECK(ranked.front().cfg == TileConfig{});
}

TEST_CASE("degenerate single-unit design") {
    const auto hw = fixtures::toy();
    const auto dt = fixtures::toy_int32();
    SearchBounds b;
    b.fixed_y_c = 1;
    b.fixed_n_p = 1;
    const ProblemSize p{256, 256, 64};
    const auto d = select_parameters(hw, dt, p, b).design;
    CHECK(d.compute_units == 1);
    // Four blocks of 1024 words: the square optimum is 64 x 64.
    CHECK(d.usable_blocks == 4);
    CHECK(d.x_tot == 64);
    CHECK(d.y_tot == 64);
    CHECK(*d.io_volume == io_volume(p, 64, 64));
}

TEST_CASE("greedy is never dominated by a sweep member") {
    const auto hw = fixtures::vu9p();
    const auto dt = fixtures::fp32();
    SearchBounds b;
    b.max_y_c = 8;
    b.max_x_p = 48;
    const auto greedy = select_parameters(hw, dt, std::nullopt, b).design;
    const auto ranked = sweep(hw, dt, std::nullopt, b);
    REQUIRE_FALSE(ranked.empty());
    CHECK(ranked.front().peak_ops_per_cycle == greedy.peak_ops_per_cycle);
    for (const auto& d : ranked) {
        const bool dominated = d.peak_ops_per_cycle > greedy.peak_ops_per_cycle &&
                               d.computational_intensity > greedy.computational_intensity;
        CHECK_FALSE(dominated);
    }
}

TEST_CASE("sweep is deterministic across thread counts") {
    const auto hw = fixtures::vu9p();
    const auto dt = fixtures::fp32();
    SearchBounds b;
    b.max_y_c = 6;
    b.max_x_p = 24;
    b.threads = 1;
    const auto one = sweep(hw, dt, std::nullopt, b);
    b.threads = 4;
    const auto four = sweep(hw, dt, std::nullopt, b);
    REQUIRE(one.size() == four.size());
    for (std::size_t i = 0; i < one.size(); ++i) CHECK(one[i].cfg == four[i].cfg);
}

TEST_CASE("bus-width infeasibility is explained") {
    const auto hw = fixtures::toy();
    const auto dt = fixtures::toy_int32();
    SearchBounds b;
    b.fixed_y_c = 3;  // 96 bit > 64 bit bus
    try {
        select_parameters(hw, dt, std::nullopt, b);
        FAIL("expected InfeasibleError");
    } catch (const InfeasibleError& e) {
        const std::string what = e.what();
        CHECK(what.find("infeasible") != std::string::npos);
        CHECK(what.find("w_p,max") != std::string::npos);
    }
}

TEST_CASE("vu9p fp32 selection is feasible and fills the bus") {
    const auto hw = fixtures::vu9p();
    const auto dt = fixtures::fp32();
    const auto sel = select_parameters(hw, dt, ProblemSize{16384, 16384, 16384});
    const auto& d = sel.design;
    CHECK(d.feasible());
    CHECK(d.memory_feasible());
    CHECK(d.cfg.y_c * dt.width_bits <= hw.max_bus_width_bits);
    CHECK(d.cfg.x_t * d.cfg.y_t >= d.processing_elements);
    SearchBounds fixed;
    fixed.fixed_y_c = 8;
    fixed.fixed_n_p = 192;
    const auto pinned = select_parameters(hw, dt, std::nullopt, fixed).design;
    CHECK(pinned.compute_units == 1536);
    CHECK(pinned.feasible());
}

TEST_CASE("memory shapes fill the block capacity") {
    const auto hw = fixtures::vu9p();
    const auto dt = fixtures::fp32();
    const auto shape = choose_memory_shape(hw, dt, {1, 8, 192, 1, 1, 1, 1, 1}, std::nullopt, {});
    REQUIRE(shape);
    CHECK(shape->x_t * shape->y_t == 1024);
    CHECK(shape->x_t * shape->y_t >= 192);
}
