#include "mmmdse/analytic_models.hpp"

#include "mmmdse/errors.hpp"

#include <cmath>
#include <string>

namespace mmmdse {

namespace {

std::uint64_t ceil_div(std::uint64_t a, std::uint64_t b) { return (a + b - 1) / b; }

std::uint64_t isqrt(std::uint64_t v) {
    auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<long double>(v)));
    while (r > 0 && r * r > v) --r;
    while ((r + 1) * (r + 1) <= v) ++r;
    return r;
}

}  // namespace

void ProblemSize::validate() const {
    if (m < 1 || n < 1 || k < 1) throw DimensionError("matrix extents m, n, k must be >= 1");
}

double execution_time(const ProblemSize& p, std::uint64_t compute_units, double frequency_hz) {
    p.validate();
    if (compute_units < 1) throw ConfigError("execution_time: N_c must be >= 1");
    if (!(frequency_hz > 0.0)) throw ConfigError("execution_time: frequency must be > 0");
    return static_cast<double>(p.m) * static_cast<double>(p.n) * static_cast<double>(p.k) /
           (frequency_hz * static_cast<double>(compute_units));
}

TileExtents tile_extents(const TileConfig& cfg) {
    cfg.validate();
    return {cfg.x_tot(), cfg.y_tot()};
}

Ratio computational_intensity(std::uint64_t x_tot, std::uint64_t y_tot) {
    if (x_tot < 1 || y_tot < 1) throw DimensionError("tile extents must be >= 1");
    return Ratio(x_tot * y_tot, x_tot + y_tot);
}

Ratio arithmetic_intensity(std::uint64_t x_tot, std::uint64_t y_tot, std::uint64_t width_bits) {
    if (width_bits < 1) throw ConfigError("element width must be >= 1 bit");
    const auto ci = computational_intensity(x_tot, y_tot);
    // 2 ops per multiply-add, w_c/8 bytes per element.
    return Ratio(16 * ci.num(), width_bits * ci.den());
}

std::uint64_t io_volume(const ProblemSize& p, std::uint64_t x_tot, std::uint64_t y_tot) {
    p.validate();
    if (x_tot < 1 || y_tot < 1) throw DimensionError("tile extents must be >= 1");
    if (x_tot > p.m || y_tot > p.n) {
        throw DimensionError("memory tile " + std::to_string(x_tot) + "x" + std::to_string(y_tot) +
                             " exceeds the " + std::to_string(p.m) + "x" + std::to_string(p.n) + " output");
    }
    const auto tiles = ceil_div(p.m, x_tot) * ceil_div(p.n, y_tot);
    return p.m * p.n + tiles * p.k * (x_tot + y_tot);
}

TileExtents optimal_square_tile(std::uint64_t capacity_words) {
    if (capacity_words < 1) throw ConfigError("on-chip capacity must be >= 1 word");
    const auto side = isqrt(capacity_words);
    return {side, side};
}

double drain_efficiency(const ProblemSize& p, const TileConfig& cfg) {
    p.validate();
    cfg.validate();
    const double compute = static_cast<double>(p.m) * static_cast<double>(p.n) * static_cast<double>(p.k) /
                           static_cast<double>(cfg.compute_units());
    const double drain = static_cast<double>(p.m) * static_cast<double>(p.n) / static_cast<double>(cfg.y_c);
    return compute / (compute + drain);
}

std::uint64_t collision_distance(const TileConfig& cfg) {
    cfg.validate();
    return cfg.x_t * cfg.x_b * cfg.y_t * cfg.y_b;
}

bool pipeline_safe(const TileConfig& cfg, std::uint64_t accumulation_latency_cycles) {
    return collision_distance(cfg) >= accumulation_latency_cycles;
}

double average_bandwidth(const ProblemSize& p, std::uint64_t x_tot, std::uint64_t y_tot, std::uint64_t width_bits,
                         double ops_per_second) {
    if (!(ops_per_second > 0.0)) throw ConfigError("operating point must be > 0 op/s");
    const double bytes = static_cast<double>(io_volume(p, x_tot, y_tot)) * static_cast<double>(width_bits) / 8.0;
    const double seconds = 2.0 * static_cast<double>(p.m) * static_cast<double>(p.n) *
                           static_cast<double>(p.k) / ops_per_second;
    return bytes / seconds;
}

bool DesignPoint::memory_feasible() const {
    for (const char* name : {constraint::memory_blocks, constraint::block_depth, constraint::block_count}) {
        const auto* o = feasibility.find(name);
        if (o == nullptr || !o->satisfied) return false;
    }
    return x_tot * y_tot <= capacity_elements && x_tot + y_tot <= capacity_elements;
}

DesignPoint evaluate_design(const HardwareSpec& hw, const DataTypeSpec& dt, const TileConfig& cfg, Layout layout,
                            const std::optional<ProblemSize>& problem, std::optional<double> frequency_hz) {
    DesignPoint d;
    d.cfg = cfg;
    d.layout = layout;
    d.feasibility = check_resource_feasibility(cfg, hw, dt, layout);

    d.compute_units = cfg.compute_units();
    d.processing_elements = cfg.processing_elements();
    const auto bw = block_words(hw, dt);
    d.port_width_bits = bw.port_width_bits;
    d.words_per_block = bw.words_per_block;
    d.min_blocks = min_memory_blocks(cfg, hw, dt);
    if (d.min_blocks <= hw.memory_blocks_max) {
        const auto block_tiles = hw.memory_blocks_max / d.min_blocks;
        d.usable_blocks = block_tiles * d.min_blocks;
        d.capacity_elements = block_tiles * bw.words_per_block * d.compute_units;
    }
    d.used_blocks = cfg.x_b * cfg.y_b * d.min_blocks;
    d.capacity_words = d.usable_blocks * bw.words_per_block;
    d.x_tot = cfg.x_tot();
    d.y_tot = cfg.y_tot();

    d.computational_intensity = computational_intensity(d.x_tot, d.y_tot);
    d.arithmetic_intensity = arithmetic_intensity(d.x_tot, d.y_tot, dt.width_bits);
    d.peak_ops_per_cycle = 2 * d.compute_units;
    d.collision_distance = collision_distance(cfg);
    d.pipeline_safe = d.collision_distance >= dt.accumulation_latency_cycles;

    if (problem) {
        d.problem = problem;
        if (d.x_tot <= problem->m && d.y_tot <= problem->n) d.io_volume = io_volume(*problem, d.x_tot, d.y_tot);
        d.drain_efficiency = drain_efficiency(*problem, cfg);
        const double f = frequency_hz.value_or(hw.target_frequency_hz);
        d.execution_time_s = execution_time(*problem, d.compute_units, f);
    }
    return d;
}

}  // namespace mmmdse
