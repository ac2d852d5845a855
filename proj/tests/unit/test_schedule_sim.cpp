#include "../common/fixtures.hpp"

#include "mmmdse/errors.hpp"
#include "mmmdse/schedule_sim.hpp"

#include <doctest.h>

using namespace mmmdse;

namespace {

DataTypeSpec int_type(std::uint64_t width) { return fixtures::dtype("u" + std::to_string(width), width, false, 1, 1, 1); }
DataTypeSpec float_type(std::uint64_t width) {
    return fixtures::dtype("f" + std::to_string(width), width, true, 1, 1, 1, 8);
}

std::vector<std::uint64_t> as_ints(const MatrixBuffer& m) {
    std::vector<std::uint64_t> out;
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) out.push_back(static_cast<std::uint64_t>(m.value(i, j)));
    }
    return out;
}

}  // namespace

TEST_CASE("reference product") {
    const ElementFormat u32{ArithmeticKind::exact_integer, 32};
    const auto a1 = MatrixBuffer::from_values<std::uint64_t>(u32, 1, 1, {2});
    const auto b1 = MatrixBuffer::from_values<std::uint64_t>(u32, 1, 1, {3});
    CHECK(reference_mmm(a1, b1).value(0, 0) == 6);

    const auto a = MatrixBuffer::random(u32, 8, 8, 5);
    CHECK(reference_mmm(a, MatrixBuffer::identity(u32, 8)) == a);

    // Pinned against an independent numpy evaluation.
    const auto a4 = MatrixBuffer::from_values<std::uint64_t>(u32, 4, 4, {3, 1, 4, 1, 5, 9, 2, 6, 5, 3, 5, 8, 9, 7, 9, 3});
    const auto b4 = MatrixBuffer::from_values<std::uint64_t>(u32, 4, 4, {2, 7, 1, 8, 2, 8, 1, 8, 2, 8, 4, 5, 9, 0, 4, 5});
    CHECK(as_ints(reference_mmm(a4, b4)) ==
          std::vector<std::uint64_t>{25, 61, 24, 57, 86, 123, 46, 152, 98, 99, 60, 129, 77, 191, 64, 188});

    // Wrap-around modulo 2^8.
    const ElementFormat u8{ArithmeticKind::exact_integer, 8};
    const auto a8 = MatrixBuffer::from_values<std::uint64_t>(u8, 2, 2, {200, 100, 255, 3});
    const auto b8 = MatrixBuffer::from_values<std::uint64_t>(u8, 2, 2, {2, 5, 7, 255});
    CHECK(as_ints(reference_mmm(a8, b8)) == std::vector<std::uint64_t>{76, 132, 19, 248});

    CHECK_THROWS_AS(reference_mmm(MatrixBuffer::random(u32, 2, 3, 1), MatrixBuffer::random(u32, 2, 3, 1)),
                    DimensionError);
}

TEST_CASE("transfer counts of the 4x4x4 example") {
    const auto dt = int_type(32);
    const auto fmt = ElementFormat::of(dt);
    const ProblemSize p{4, 4, 4};
    const TileConfig cfg{1, 2, 2, 1, 1, 1, 1, 1};
    const auto a = MatrixBuffer::random(fmt, 4, 4, 1);
    const auto b = MatrixBuffer::random(fmt, 4, 4, 2);
    SimOptions opt;
    opt.record_log = true;
    const auto r = simulate_schedule(p, cfg, dt, a, b, opt);
    // 4 memory tiles x 4 k steps x 2 elements per operand, 16 stores
    CHECK(r.io.loads_a == 32);
    CHECK(r.io.loads_b == 32);
    CHECK(r.io.stores_c == 16);
    CHECK(r.io.total() == 80);
    CHECK(r.io.total() == io_volume(p, 2, 2));
    CHECK(r.io.log.size() == 80);
    CHECK(r.c == reference_mmm(a, b));
}

TEST_CASE("single element trace") {
    const auto dt = int_type(16);
    const auto fmt = ElementFormat::of(dt);
    const auto a = MatrixBuffer::from_values<std::uint64_t>(fmt, 1, 1, {7});
    const auto b = MatrixBuffer::from_values<std::uint64_t>(fmt, 1, 1, {6});
    SimOptions opt;
    opt.record_log = true;
    const auto r = simulate_schedule({1, 1, 1}, TileConfig{}, dt, a, b, opt);
    REQUIRE(r.io.log.size() == 3);
    CHECK(r.io.log[0].operand == Operand::a);
    CHECK(r.io.log[1].operand == Operand::b);
    CHECK(r.io.log[2].operand == Operand::c);
    CHECK(r.c.value(0, 0) == 42);
}

TEST_CASE("64^3 uint16 run") {
    const auto dt = int_type(16);
    const auto fmt = ElementFormat::of(dt);
    const ProblemSize p{64, 64, 64};
    const TileConfig cfg{1, 4, 4, 1, 4, 2, 1, 2};  // 16 x 16
    REQUIRE(cfg.x_tot() == 16);
    REQUIRE(cfg.y_tot() == 16);
    const auto a = MatrixBuffer::random(fmt, 64, 64, 11);
    const auto b = MatrixBuffer::random(fmt, 64, 64, 12);
    const auto r = simulate_schedule(p, cfg, dt, a, b);
    CHECK(r.c == reference_mmm(a, b));
    // 64*64*(1 + 64*(1/16 + 1/16))
    CHECK(r.io.total() == 36864);
    CHECK(r.compute_cycles == 64ull * 64 * 64 / cfg.compute_units());
}

TEST_CASE("access log is consistent with the counters") {
    const auto dt = int_type(8);
    const auto fmt = ElementFormat::of(dt);
    const ProblemSize p{8, 12, 5};
    const TileConfig cfg{1, 2, 2, 1, 2, 3, 1, 1};
    SimOptions opt;
    opt.record_log = true;
    const auto r = simulate_schedule(p, cfg, dt, MatrixBuffer::random(fmt, 8, 5, 1), MatrixBuffer::random(fmt, 5, 12, 2), opt);
    std::uint64_t na = 0, nb = 0, nc = 0;
    for (const auto& rec : r.io.log) {
        if (rec.operand == Operand::a) ++na;
        if (rec.operand == Operand::b) ++nb;
        if (rec.operand == Operand::c) ++nc;
    }
    CHECK(na == r.io.loads_a);
    CHECK(nb == r.io.loads_b);
    CHECK(nc == r.io.stores_c);
    CHECK(nc == p.m * p.n);
}

TEST_CASE("chain model matches the schedule") {
    const auto dt = int_type(32);
    const auto fmt = ElementFormat::of(dt);
    const ProblemSize p{8, 8, 8};
    const TileConfig cfg{1, 2, 4, 1, 2, 4, 1, 1};  // N_p = 4, 8 x 8, x_t*y_t = 8 >= 4
    const auto a = MatrixBuffer::random(fmt, 8, 8, 3);
    const auto b = MatrixBuffer::random(fmt, 8, 8, 4);
    SimOptions opt;
    opt.record_log = true;
    const auto s = simulate_schedule(p, cfg, dt, a, b, opt);
    const auto c = simulate_pe_chain(p, cfg, dt, a, b, opt);
    CHECK(c.c == s.c);
    CHECK(c.io == s.io);
    CHECK(c.compute_cycles == s.compute_cycles);
    CHECK(c.drain_cycles == s.drain_cycles);
    CHECK(c.stall_cycles == 4);  // only the initial fill; later prefetches hide behind compute and drain
}

TEST_CASE("chain with a single PE") {
    const auto dt = int_type(32);
    const auto fmt = ElementFormat::of(dt);
    const ProblemSize p{4, 6, 3};
    const TileConfig cfg{1, 3, 1, 1, 2, 1, 1, 2};
    const auto a = MatrixBuffer::random(fmt, 4, 3, 3);
    const auto b = MatrixBuffer::random(fmt, 3, 6, 4);
    const auto s = simulate_schedule(p, cfg, dt, a, b);
    const auto c = simulate_pe_chain(p, cfg, dt, a, b);
    CHECK(c.c == s.c);
    CHECK(c.io == s.io);
}

TEST_CASE("drain accounting") {
    const auto dt = int_type(32);
    const auto fmt = ElementFormat::of(dt);
    const ProblemSize p{16, 16, 16};
    const TileConfig cfg{1, 2, 4, 1, 2, 4, 2, 1};  // N_c = 8, N_p = 4, 16 x 8 tiles
    const auto r = simulate_pe_chain(p, cfg, dt, MatrixBuffer::random(fmt, 16, 16, 1), MatrixBuffer::random(fmt, 16, 16, 2));
    CHECK(r.compute_cycles == 512);  // 16^3 / 8
    CHECK(r.drain_cycles == 128);    // 16^2 / 2
    CHECK(r.drain_efficiency() == doctest::Approx(0.8));
    CHECK(r.drain_efficiency() == doctest::Approx(16.0 / (16 + 4)));
    const auto counts = count_schedule(p, cfg);
    CHECK(counts.compute_cycles == 512);
    CHECK(counts.drain_cycles == 128);
    CHECK(counts.io.loads_a == r.io.loads_a);
    CHECK(counts.io.loads_b == r.io.loads_b);
    CHECK(counts.io.stores_c == r.io.stores_c);
}

TEST_CASE("chain preconditions") {
    const auto dt = int_type(32);
    const auto fmt = ElementFormat::of(dt);
    const auto a = MatrixBuffer::random(fmt, 8, 8, 1);
    CHECK_THROWS_AS(simulate_pe_chain({8, 8, 8}, {1, 1, 8, 1, 1, 1, 1, 1}, dt, a, a), InfeasibleError);  // 1 < 8
    CHECK_THROWS_AS(simulate_pe_chain({8, 8, 8}, {2, 1, 2, 1, 2, 8, 1, 1}, dt, a, a), InfeasibleError);  // x_c = 2
}

TEST_CASE("stalls when compute tiles per phase are fewer than PEs") {
    const auto dt = int_type(32);
    const auto fmt = ElementFormat::of(dt);
    // y_t*y_b = 2 cycles per phase while 4 values shift in.
    const TileConfig cfg{1, 1, 4, 1, 2, 2, 1, 1};
    const ProblemSize p{8, 2, 3};
    const auto a = MatrixBuffer::random(fmt, 8, 3, 1);
    const auto b = MatrixBuffer::random(fmt, 3, 2, 2);
    const auto r = simulate_pe_chain(p, cfg, dt, a, b);
    CHECK(r.c == reference_mmm(a, b));
    CHECK(r.stall_cycles > 0);
}

TEST_CASE("divisibility and padding") {
    const auto dt = int_type(16);
    const auto fmt = ElementFormat::of(dt);
    const ProblemSize p{10, 7, 3};
    const TileConfig cfg{1, 2, 2, 1, 2, 2, 1, 1};  // 4 x 4
    const auto a = MatrixBuffer::random(fmt, 10, 3, 1);
    const auto b = MatrixBuffer::random(fmt, 3, 7, 2);
    CHECK_THROWS_AS(simulate_schedule(p, cfg, dt, a, b), DimensionError);
    SimOptions pad;
    pad.pad = true;
    const auto r = simulate_schedule(p, cfg, dt, a, b, pad);
    CHECK(r.c == reference_mmm(a, b));
    CHECK(r.io.stores_c == 70);
    // 3 x 2 tiles padded to 12 x 8
    CHECK(r.io.loads_a == 2 * 3 * 10);
    CHECK(r.io.padded_loads_a == 2 * 3 * 2);
    CHECK(r.io.loads_b == 3 * 3 * 7);
    CHECK(r.io.padded_loads_b == 3 * 3 * 1);
    CHECK(r.io.padded_stores_c == 96 - 70);
    CHECK(r.io.total() + r.io.padded_loads_a + r.io.padded_loads_b == io_volume(p, 4, 4));
    const auto counts = count_schedule(p, cfg, true);
    CHECK(counts.io.loads_a == r.io.loads_a);
    CHECK(counts.io.padded_stores_c == r.io.padded_stores_c);
    const auto chain = simulate_pe_chain(p, {1, 2, 2, 1, 2, 2, 1, 1}, dt, a, b, pad);
    CHECK(chain.c == r.c);

    CHECK_THROWS_AS(simulate_schedule({2, 2, 2}, cfg, dt, MatrixBuffer::random(fmt, 2, 2, 1),
                                      MatrixBuffer::random(fmt, 2, 2, 1), pad),
                    DimensionError);
}

TEST_CASE("floats accumulate in the reference order") {
    for (std::uint64_t w : {16, 32, 64}) {
        const auto dt = float_type(w);
        const auto fmt = ElementFormat::of(dt);
        const ProblemSize p{8, 8, 32};
        const TileConfig cfg{1, 2, 2, 1, 2, 2, 1, 1};
        const auto a = MatrixBuffer::random(fmt, 8, 32, 7);
        const auto b = MatrixBuffer::random(fmt, 32, 8, 8);
        const auto s = simulate_schedule(p, cfg, dt, a, b);
        const auto c = simulate_pe_chain(p, cfg, dt, a, b);
        CHECK(compare(s.c, reference_mmm(a, b)).equal_bits);
        CHECK(c.c == s.c);
    }
}

TEST_CASE("pipeline safety flag") {
    const auto dt = float_type(32);  // latency 8
    const auto fmt = ElementFormat::of(dt);
    const auto a = MatrixBuffer::random(fmt, 4, 4, 1);
    CHECK_FALSE(simulate_schedule({4, 4, 4}, {1, 1, 1, 1, 2, 2, 1, 1}, dt, a, a).pipeline_safe);
    // 4 * 4 compute-tile positions separate two updates of one element.
    CHECK(simulate_schedule({4, 4, 4}, {1, 1, 1, 1, 4, 4, 1, 1}, dt, a, a).pipeline_safe);
}

TEST_CASE("transpose module read pattern") {
    const TileConfig cfg4{1, 1, 4, 1, 1, 4, 1, 1};
    auto t = transpose_access_analysis({4, 4, 4}, cfg4, 4);
    CHECK(t.without_module.runs == std::map<std::uint64_t, std::uint64_t>{{1, 16}});
    CHECK(t.with_module.runs == std::map<std::uint64_t, std::uint64_t>{{4, 4}});
    CHECK(t.fifo_count == 4);
    CHECK(t.fifo_depth == 4);

    t = transpose_access_analysis({4, 4, 4}, cfg4, 1);
    CHECK(t.with_module.runs == t.without_module.runs);

    const TileConfig cfg16{1, 1, 16, 1, 1, 16, 1, 1};
    t = transpose_access_analysis({64, 64, 64}, cfg16, 8);
    CHECK(t.with_module.runs == std::map<std::uint64_t, std::uint64_t>{{8, 512}});
    CHECK(t.with_module.min_run() >= 8);
    CHECK(t.with_module.element_count() == 64 * 64);
    CHECK(t.passes_over_a == 4);

    CHECK_THROWS_AS(transpose_access_analysis({64, 64, 64}, cfg16, 8, 15), ConfigError);
    CHECK_NOTHROW(transpose_access_analysis({64, 64, 64}, cfg16, 8, 16));
}
