#pragma once

/**
 * @file analytic_models.hpp
 * @brief Closed-form time, transfer-volume and intensity models for the tiled
 *        matrix-multiplication schedule, plus the DesignPoint summary record.
 */

#include "mmmdse/hardware_model.hpp"
#include "mmmdse/ratio.hpp"

#include <cstdint>
#include <optional>
#include <utility>

namespace mmmdse {

struct ProblemSize {
    std::uint64_t m = 1, n = 1, k = 1;

    void validate() const;
    /// Multiply-add count m*n*k.
    std::uint64_t multiply_adds() const { return m * n * k; }

    friend bool operator==(const ProblemSize&, const ProblemSize&) = default;
};

struct TileExtents {
    std::uint64_t x_tot = 1;
    std::uint64_t y_tot = 1;
    friend bool operator==(const TileExtents&, const TileExtents&) = default;
};

/// T = m*n*k / (f * N_c) in seconds.
double execution_time(const ProblemSize& p, std::uint64_t compute_units, double frequency_hz);

TileExtents tile_extents(const TileConfig& cfg);

/// Multiply-adds per transferred element: x*y / (x + y).
Ratio computational_intensity(std::uint64_t x_tot, std::uint64_t y_tot);

/// Operations (multiply and add counted separately) per byte: 2*CI / (w_c/8).
Ratio arithmetic_intensity(std::uint64_t x_tot, std::uint64_t y_tot, std::uint64_t width_bits);

/// Off-chip element transfers Q = m*n + ceil(m/x)*ceil(n/y)*k*(x + y).
/// Equals m*n*(1 + k*(1/x + 1/y)) whenever x | m and y | n.
/// Throws DimensionError if the tile exceeds the matrix.
std::uint64_t io_volume(const ProblemSize& p, std::uint64_t x_tot, std::uint64_t y_tot);

/// Unconstrained optimum floor(sqrt(S)) in both dimensions.
TileExtents optimal_square_tile(std::uint64_t capacity_words);

/// Fraction of cycles spent computing when the drain runs after each memory
/// tile: (mnk/N_c) / (mnk/N_c + mn/y_c). For the 1D chain this is k / (k + N_p).
double drain_efficiency(const ProblemSize& p, const TileConfig& cfg);

/// Cycles between two accumulations into the same element of C inside one
/// memory tile: x_t*x_b * y_t*y_b.
std::uint64_t collision_distance(const TileConfig& cfg);

bool pipeline_safe(const TileConfig& cfg, std::uint64_t accumulation_latency_cycles);

/// Average off-chip demand in bytes/s when the kernel sustains `ops_per_second`
/// (multiply and add counted separately): Q*(w_c/8) / T with T = 2*m*n*k / ops.
double average_bandwidth(const ProblemSize& p, std::uint64_t x_tot, std::uint64_t y_tot, std::uint64_t width_bits,
                         double ops_per_second);

/// A tile configuration with every derived quantity the tools report.
struct DesignPoint {
    TileConfig cfg;
    Layout layout = Layout::chain_1d;

    std::uint64_t compute_units = 0;
    std::uint64_t processing_elements = 0;
    std::uint64_t port_width_bits = 0;
    std::uint64_t words_per_block = 0;
    std::uint64_t min_blocks = 0;
    std::uint64_t usable_blocks = 0;      // 0 when N_b,min > N_b,max
    std::uint64_t used_blocks = 0;        // x_b*y_b*N_b,min
    std::uint64_t capacity_words = 0;     // S = N_b * s_b
    std::uint64_t capacity_elements = 0;  // usable block tiles * s_b * N_c, with PE words coalesced
    std::uint64_t x_tot = 0;
    std::uint64_t y_tot = 0;

    Ratio computational_intensity;
    Ratio arithmetic_intensity;
    std::uint64_t peak_ops_per_cycle = 0;  // 2*N_c
    std::uint64_t collision_distance = 0;
    bool pipeline_safe = false;

    std::optional<ProblemSize> problem;
    std::optional<std::uint64_t> io_volume;   // unset when the tile exceeds the matrix
    std::optional<double> drain_efficiency;
    std::optional<double> execution_time_s;  // at the frequency passed to evaluate_design

    FeasibilityReport feasibility;

    bool feasible() const { return feasibility.feasible(); }
    bool memory_feasible() const;
};

DesignPoint evaluate_design(const HardwareSpec& hw, const DataTypeSpec& dt, const TileConfig& cfg,
                            Layout layout = Layout::chain_1d,
                            const std::optional<ProblemSize>& problem = std::nullopt,
                            std::optional<double> frequency_hz = std::nullopt);

}  // namespace mmmdse
