#include "../common/fixtures.hpp"

#include "mmmdse/errors.hpp"
#include "mmmdse/hardware_model.hpp"

#include <doctest.h>

using namespace mmmdse;

namespace {

HardwareSpec single(const std::string& kind, std::uint64_t amount) {
    auto hw = fixtures::vu9p();
    hw.resources_max = {{kind, amount}};
    return hw;
}

DataTypeSpec costs(ResourceVector rc, ResourceVector rp, std::uint64_t width = 32) {
    DataTypeSpec dt;
    dt.name = "t";
    dt.width_bits = width;
    dt.cost_per_compute_unit = std::move(rc);
    dt.overhead_per_pe = std::move(rp);
    return dt;
}

}  // namespace

TEST_CASE("resource vectors reject duplicate kinds and compare kind sets") {
    CHECK_THROWS_AS(ResourceVector({{"LUT", 1}, {"LUT", 2}}), ConfigError);
    const ResourceVector a{{"LUT", 1}, {"DSP", 2}};
    const ResourceVector b{{"DSP", 5}, {"LUT", 0}};
    CHECK(a.same_kinds(b));
    CHECK_FALSE(a.same_kinds(ResourceVector{{"LUT", 1}}));
    CHECK(a.amount("DSP") == 2);
    CHECK_THROWS_AS(a.amount("FF"), ConfigError);
    CHECK(a.scaled(3).amount("LUT") == 3);
}

TEST_CASE("max compute units") {
    CHECK(max_compute_units(single("LUT", 100), costs({{"LUT", 10}}, {{"LUT", 0}})) == 10);

    auto hw = fixtures::vu9p();
    CHECK(max_compute_units(hw, costs({{"LUT", 0}, {"FF", 0}, {"DSP", 1}}, {{"LUT", 0}, {"FF", 0}, {"DSP", 0}})) ==
          6834);

    HardwareSpec two = hw;
    two.resources_max = {{"LUT", 100}, {"DSP", 6}};
    // floor(100/12) = 8 against floor(6/1) = 6
    CHECK(max_compute_units(two, costs({{"LUT", 12}, {"DSP", 1}}, {{"LUT", 0}, {"DSP", 0}})) == 6);

    CHECK_THROWS_AS(max_compute_units(hw, costs({{"LUT", 1}}, {{"LUT", 0}})), ConfigError);
}

TEST_CASE("block words pick the narrowest port holding one element") {
    const auto hw = fixtures::vu9p();
    auto dt = fixtures::fp32();
    auto bw = block_words(hw, dt);
    CHECK(bw.port_width_bits == 36);
    CHECK(bw.words_per_block == 1024);

    dt.width_bits = 16;
    bw = block_words(hw, dt);
    CHECK(bw.port_width_bits == 18);
    CHECK(bw.words_per_block == 2048);

    dt.width_bits = 64;
    bw = block_words(hw, dt);
    CHECK(bw.port_width_bits == 72);
    CHECK(bw.words_per_block == 512);

    dt.width_bits = 128;
    CHECK_THROWS_AS(block_words(hw, dt), UnsupportedTypeError);

    dt.width_bits = 8;
    dt.port_width_override_bits = 36;
    bw = block_words(hw, dt);
    CHECK(bw.port_width_bits == 36);
    dt.port_width_override_bits = 40;
    CHECK_THROWS_AS(block_words(hw, dt), UnsupportedTypeError);
}

TEST_CASE("minimum memory blocks") {
    const auto hw = fixtures::vu9p();
    auto dt = fixtures::fp32();
    // 144 PEs of 8 units: 144 * ceil(256 / 36)
    CHECK(min_memory_blocks({1, 8, 144, 1, 1, 1, 1, 1}, hw, dt) == 1152);
    CHECK(min_memory_blocks({2, 4, 12, 12, 1, 1, 1, 1}, hw, dt) == 1152);
    CHECK(min_memory_blocks(TileConfig{}, hw, dt) == 1);

    auto u8 = fixtures::dtype("uint8", 8, false, 30, 28, 1);
    CHECK(min_memory_blocks({1, 32, 132, 1, 1, 1, 1, 1}, hw, u8) == 132 * 29);
    CHECK(min_memory_blocks({1, 32, 132, 1, 1, 1, 1, 1}, hw, u8) == 3828);
}

TEST_CASE("usable memory blocks round down to multiples of the minimum") {
    auto hw = fixtures::vu9p();
    const auto dt = fixtures::fp32();
    CHECK(usable_memory_blocks({1, 8, 144, 1, 1, 1, 1, 1}, hw, dt) == 1152);

    hw.memory_blocks_max = 2048;
    // 128 PEs * 8 blocks = 1024 fits exactly twice
    CHECK(usable_memory_blocks({1, 8, 128, 1, 1, 1, 1, 1}, hw, dt) == 2048);

    hw.memory_blocks_max = 1906;
    auto narrow = dt;
    narrow.width_bits = 36;  // one block per unit at 36 bit
    // 500 units, one block each: floor(1906 / 500) = 3
    CHECK(usable_memory_blocks({1, 1, 500, 1, 1, 1, 1, 1}, hw, narrow) == 1500);

    CHECK_THROWS_AS(usable_memory_blocks({1, 8, 300, 1, 1, 1, 1, 1}, hw, dt), InfeasibleError);
}

TEST_CASE("feasibility of the 1536-unit fp32 design") {
    const auto hw = fixtures::vu9p();
    const auto dt = fixtures::fp32();
    const TileConfig cfg{1, 8, 192, 1, 5, 204, 1, 1};
    const auto r = check_resource_feasibility(cfg, hw, dt);
    CHECK(r.feasible());
    // Hand evaluation of N_p * (r_p + r_c * 8) for every kind.
    CHECK(192 * (200 + 520 * 8) <= 1033608);
    CHECK(192 * (400 + 600 * 8) <= 2174048);
    CHECK(192 * (0 + 2 * 8) <= 6834);
    for (const char* name : {"resources.LUT", "resources.FF", "resources.DSP", "bus_width_x", "bus_width_y",
                             "memory_blocks", "chain_depth"}) {
        INFO(name);
        REQUIRE(r.find(name) != nullptr);
        CHECK(r.find(name)->satisfied);
    }
}

TEST_CASE("bus width bound") {
    const auto hw = fixtures::vu9p();
    const auto dt = costs({{"LUT", 0}, {"FF", 0}, {"DSP", 1}}, {{"LUT", 0}, {"FF", 0}, {"DSP", 0}});
    auto r = check_resource_feasibility({1, 17, 1, 1, 17, 1, 1, 1}, hw, dt);
    CHECK_FALSE(r.find(constraint::bus_y)->satisfied);  // 17 * 32 = 544 > 512
    CHECK(r.find(constraint::bus_x)->satisfied);
    r = check_resource_feasibility({1, 16, 1, 1, 16, 1, 1, 1}, hw, dt);
    CHECK(r.find(constraint::bus_y)->satisfied);  // equality passes
}

TEST_CASE("resource bound is inclusive") {
    auto hw = single("DSP", 64);
    hw.memory_blocks_max = 10000;
    const auto dt = costs({{"DSP", 1}}, {{"DSP", 0}});
    const TileConfig at_bound{1, 8, 8, 1, 8, 8, 1, 1};  // 64 units
    CHECK(check_resource_feasibility(at_bound, hw, dt).find("resources.DSP")->satisfied);
    const TileConfig over{1, 8, 9, 1, 8, 8, 1, 1};
    CHECK_FALSE(check_resource_feasibility(over, hw, dt).find("resources.DSP")->satisfied);
}

TEST_CASE("chain depth and layout shape apply to the 1D chain only") {
    const auto hw = fixtures::vu9p();
    const auto dt = fixtures::fp32();
    const TileConfig shallow{1, 8, 192, 1, 10, 10, 1, 1};  // 100 < 192
    CHECK_FALSE(check_resource_feasibility(shallow, hw, dt, Layout::chain_1d).find(constraint::chain_depth)->satisfied);
    CHECK(check_resource_feasibility(shallow, hw, dt, Layout::grid_2d).find(constraint::chain_depth) == nullptr);

    const TileConfig grid{2, 4, 4, 4, 8, 8, 1, 1};
    CHECK_FALSE(check_resource_feasibility(grid, hw, dt, Layout::chain_1d).find(constraint::layout_shape)->satisfied);
    CHECK(check_resource_feasibility(grid, hw, dt, Layout::grid_2d).feasible());
}

TEST_CASE("kind mismatch is a configuration error") {
    const auto hw = fixtures::vu9p();
    const auto dt = costs({{"DSP", 1}}, {{"DSP", 0}});
    CHECK_THROWS_AS(check_resource_feasibility(TileConfig{}, hw, dt), ConfigError);
    CHECK_THROWS_AS(dt.validate_against(hw), ConfigError);
}

TEST_CASE("hardware validation") {
    auto hw = fixtures::vu9p();
    CHECK_NOTHROW(hw.validate());
    hw.supported_port_widths_bits = {18, 9};
    CHECK_THROWS_AS(hw.validate(), ConfigError);
    hw = fixtures::vu9p();
    hw.supported_port_widths_bits = {7};
    CHECK_THROWS_AS(hw.validate(), ConfigError);  // 36864 % 7 != 0
    hw = fixtures::vu9p();
    hw.memory_blocks_max = 0;
    CHECK_THROWS_AS(hw.validate(), ConfigError);
}

TEST_CASE("tile config derived quantities") {
    const TileConfig c{2, 3, 5, 7, 11, 13, 17, 19};
    CHECK(c.x_tot() == 2 * 5 * 11 * 17);
    CHECK(c.y_tot() == 3 * 7 * 13 * 19);
    CHECK(c.compute_units() == 2 * 3 * 5 * 7);
    CHECK(c.processing_elements() == 35);
    TileConfig bad;
    bad.y_t = 0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    CHECK(parse_layout("2D") == Layout::grid_2d);
    CHECK_THROWS_AS(parse_layout("3d"), ConfigError);
}
