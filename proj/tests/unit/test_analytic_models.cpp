#include "../common/fixtures.hpp"

#include "mmmdse/analytic_models.hpp"
#include "mmmdse/errors.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace mmmdse;

namespace {

// Element transfers counted the slow way: every memory tile loads x + y
// elements per k step, every output element is stored once.
std::uint64_t count_transfers(std::uint64_t m, std::uint64_t n, std::uint64_t k, std::uint64_t x, std::uint64_t y) {
    std::uint64_t q = 0;
    for (std::uint64_t i = 0; i < m; i += x) {
        for (std::uint64_t j = 0; j < n; j += y) {
            for (std::uint64_t kk = 0; kk < k; ++kk) q += x + y;
        }
    }
    return q + m * n;
}

}  // namespace

TEST_CASE("execution time") {
    CHECK(execution_time({1, 1, 1}, 1, 1.0) == doctest::Approx(1.0));
    const ProblemSize big{16384, 16384, 16384};
    CHECK(execution_time(big, 1536, 145.7e6) == doctest::Approx(19.65).epsilon(0.001));
    CHECK(execution_time(big, 3072, 145.7e6) == doctest::Approx(execution_time(big, 1536, 145.7e6) / 2));
}

TEST_CASE("tile extents") {
    CHECK(tile_extents({1, 8, 192, 1, 5, 204, 1, 1}) == TileExtents{960, 1632});
    CHECK(tile_extents(TileConfig{}) == TileExtents{1, 1});
    CHECK(tile_extents({2, 1, 3, 1, 5, 1, 7, 1}).x_tot == 210);
}

TEST_CASE("intensities") {
    CHECK(computational_intensity(960, 1632).value() == doctest::Approx(604.44).epsilon(1e-4));
    CHECK(arithmetic_intensity(960, 1632, 32).value() == doctest::Approx(302.22).epsilon(1e-4));
    CHECK(computational_intensity(1904, 1920).value() == doctest::Approx(955.98).epsilon(1e-5));
    CHECK(arithmetic_intensity(1904, 1920, 16).value() == doctest::Approx(955.98).epsilon(1e-5));
    CHECK(computational_intensity(2, 2) == Ratio(1));
    for (std::uint64_t x = 1; x < 200; ++x) CHECK(computational_intensity(x, x) == Ratio(x, 2));
}

TEST_CASE("io volume matches a direct count") {
    CHECK(io_volume({4, 4, 4}, 2, 2) == 80);
    CHECK(count_transfers(4, 4, 4, 2, 2) == 80);
    CHECK(io_volume({1, 1, 1}, 1, 1) == 3);
    for (std::uint64_t x : {1, 2, 4, 8}) {
        for (std::uint64_t y : {1, 2, 4, 8, 16}) {
            CHECK(io_volume({16, 32, 5}, x, y) == count_transfers(16, 32, 5, x, y));
        }
    }
    // m = n = k = S, square tile of side sqrt(S): 2*m*n*k/sqrt(S) + m*n
    const std::uint64_t s = 64;
    CHECK(io_volume({s, s, s}, 8, 8) == 2 * s * s * s / 8 + s * s);
    CHECK_THROWS_AS(io_volume({4, 4, 4}, 8, 2), DimensionError);
}

TEST_CASE("io volume is symmetric under swapping both m/n and x/y") {
    for (std::uint64_t x : {1, 3, 4, 6}) {
        for (std::uint64_t y : {2, 5, 12}) CHECK(io_volume({24, 60, 7}, x, y) == io_volume({60, 24, 7}, y, x));
    }
}

TEST_CASE("square tile is optimal by brute force") {
    CHECK(optimal_square_tile(1024) == TileExtents{32, 32});
    CHECK(optimal_square_tile(1000) == TileExtents{31, 31});
    const std::uint64_t s = 1024;
    const ProblemSize p{s, s, s};
    const auto best = io_volume(p, 32, 32);
    for (std::uint64_t x = 1; x <= s; ++x) {
        for (std::uint64_t y = 1; x * y <= s && x + y <= s; ++y) {
            // Continuous form avoids partial-tile rounding: m*n*(1 + k*(1/x + 1/y)).
            const double q = double(s) * s * (1.0 + double(s) * (1.0 / x + 1.0 / y));
            CHECK(q >= double(best) * (1 - 1e-12));
        }
    }
}

TEST_CASE("for a fixed tile area the square shape minimises transfers") {
    for (std::uint64_t side = 1; side <= 64; ++side) {
        const auto area = side * side;
        const ProblemSize p{area * 4, area * 4, 3};
        const auto sq = io_volume(p, side, side);
        for (std::uint64_t x = 1; x <= area; ++x) {
            if (area % x != 0) continue;
            CHECK(io_volume(p, x, area / x) >= sq);
        }
    }
}

TEST_CASE("drain efficiency") {
    CHECK(drain_efficiency({192, 192, 192}, {1, 1, 192, 1, 1, 192, 1, 1}) == doctest::Approx(0.5));
    const TileConfig cfg{1, 8, 192, 1, 5, 204, 1, 1};
    CHECK(drain_efficiency({16384, 16384, 16384}, cfg) == doctest::Approx(16384.0 / (16384 + 192)));
    CHECK(drain_efficiency({16384, 16384, 16384}, cfg) == doctest::Approx(0.9884).epsilon(1e-4));
    double prev = 0.0;
    for (std::uint64_t k = 1; k <= 1 << 16; k *= 2) {
        const double e = drain_efficiency({960, 1632, k}, cfg);
        CHECK(e > prev);
        prev = e;
    }
}

TEST_CASE("collision distance") {
    CHECK(collision_distance({1, 1, 1, 1, 32, 32, 1, 1}) == 1024);
    CHECK(collision_distance({1, 8, 192, 1, 5, 204, 1, 1}) == 1020);
    CHECK_FALSE(pipeline_safe({1, 1, 1, 1, 2, 2, 1, 1}, 8));
    CHECK(pipeline_safe({1, 1, 1, 1, 2, 4, 1, 1}, 8));
}

TEST_CASE("average bandwidth of the fp32 design at 409 GOp/s") {
    // 16320 is a multiple of both tile sides.
    const ProblemSize p{16320, 16320, 16320};
    // Q * 4 bytes over T = 2mnk / 409e9
    const double q = 16320.0 * 16320.0 * (1.0 + 16320.0 * (1.0 / 960 + 1.0 / 1632));
    const double expect = q * 4.0 / (2.0 * 16320.0 * 16320.0 * 16320.0 / 409e9);
    const double got = average_bandwidth(p, 960, 1632, 32, 409e9);
    CHECK(got == doctest::Approx(expect).epsilon(0.01));
    CHECK(got / 1e9 == doctest::Approx(1.35).epsilon(0.10));
}

TEST_CASE("fp32 design point at 960 x 1632") {
    const auto hw = fixtures::vu9p();
    const auto dt = fixtures::fp32();
    const auto d = evaluate_design(hw, dt, {1, 8, 192, 1, 5, 204, 1, 1}, Layout::chain_1d,
                                   ProblemSize{16384, 16384, 16384}, 145.7e6);
    CHECK(d.compute_units == 1536);
    CHECK(d.processing_elements == 192);
    CHECK(d.min_blocks == 192 * 8);
    CHECK(d.usable_blocks == 1536);
    CHECK(d.capacity_words == 1536 * 1024);
    CHECK(d.x_tot * d.y_tot <= d.capacity_words);
    CHECK(d.x_tot + d.y_tot <= d.capacity_words);
    CHECK(d.peak_ops_per_cycle == 3072);
    CHECK(d.arithmetic_intensity.value() == doctest::Approx(302.2).epsilon(0.001));
    CHECK(d.feasible());
    CHECK(d.memory_feasible());
    REQUIRE(d.io_volume);
    CHECK(*d.io_volume == io_volume({16384, 16384, 16384}, 960, 1632));
}
