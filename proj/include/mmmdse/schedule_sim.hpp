#pragma once

/**
 * @file schedule_sim.hpp
 * @brief Functional execution of the tiled schedule and its 1D PE-chain
 *        refinement, with exact off-chip transfer and cycle accounting.
 *
 * Cycle accounting is transaction level: one compute tile per cycle, the
 * drain of a finished memory tile moves y_c elements per cycle through the
 * chain head and runs strictly after the tile's compute phase.
 */

#include "mmmdse/analytic_models.hpp"
#include "mmmdse/hardware_model.hpp"
#include "mmmdse/matrix.hpp"

#include <cstdint>
#include <map>
#include <vector>

namespace mmmdse {

enum class Operand { a, b, c };

const char* to_string(Operand op);

/// One element moved between off-chip memory and the kernel.
struct AccessRecord {
    Operand operand = Operand::a;
    std::uint64_t tile_row = 0;  // memory tile coordinates
    std::uint64_t tile_col = 0;
    std::uint64_t k = 0;         // k-index of the outer product (k of the last update for C)
    std::uint64_t row = 0;       // element coordinates in the operand matrix
    std::uint64_t col = 0;

    friend bool operator==(const AccessRecord&, const AccessRecord&) = default;
};

struct IoTrace {
    // Transfers of elements inside the real matrices.
    std::uint64_t loads_a = 0;
    std::uint64_t loads_b = 0;
    std::uint64_t stores_c = 0;
    // Transfers of zero padding (only in padded mode).
    std::uint64_t padded_loads_a = 0;
    std::uint64_t padded_loads_b = 0;
    std::uint64_t padded_stores_c = 0;

    /// Run length -> number of runs of contiguous row-major A addresses, in read order.
    std::map<std::uint64_t, std::uint64_t> burst_runs_a;
    std::vector<AccessRecord> log;  // filled only when requested

    std::uint64_t total() const { return loads_a + loads_b + stores_c; }
    std::uint64_t padding_overhead() const { return padded_loads_a + padded_loads_b + padded_stores_c; }

    friend bool operator==(const IoTrace&, const IoTrace&) = default;
};

struct SimOptions {
    bool pad = false;         // zero-pad to tile multiples instead of rejecting
    bool record_log = false;  // keep one AccessRecord per transfer
};

struct SimResult {
    MatrixBuffer c;
    IoTrace io;
    std::uint64_t compute_cycles = 0;
    std::uint64_t drain_cycles = 0;
    std::uint64_t stall_cycles = 0;  // A-propagation not hidden behind compute or drain, incl. the N_p-cycle fill (chain only)
    bool pipeline_safe = false;
    TileConfig config;

    /// compute / (compute + drain)
    double drain_efficiency() const;
};

/// Naive i, j, k product; the comparison oracle. Integers wrap modulo 2^w_c.
MatrixBuffer reference_mmm(const MatrixBuffer& a, const MatrixBuffer& b);

/// Executes the eleven-loop tiled nest: memory tiles over i and j, the full k
/// dimension, block tiles, compute tiles, then PEs and compute units as one
/// parallel step.
SimResult simulate_schedule(const ProblemSize& p, const TileConfig& cfg, const DataTypeSpec& dt, const MatrixBuffer& a,
                            const MatrixBuffer& b, const SimOptions& options = {});

/// Register-level model of the 1D chain: N_p PEs each with a double-buffered A
/// register, B vectors streamed through the chain and a backward drain bus.
/// Throws InfeasibleError when x_t*y_t < N_p or the layout is not 1D.
SimResult simulate_pe_chain(const ProblemSize& p, const TileConfig& cfg, const DataTypeSpec& dt, const MatrixBuffer& a,
                            const MatrixBuffer& b, const SimOptions& options = {});

/// Transfer and cycle counters of the schedule without touching data. O(1).
struct ScheduleCounts {
    IoTrace io;  // counts only
    std::uint64_t compute_cycles = 0;
    std::uint64_t drain_cycles = 0;
    double efficiency() const;
};

ScheduleCounts count_schedule(const ProblemSize& p, const TileConfig& cfg, bool pad = false);

struct BurstStats {
    std::map<std::uint64_t, std::uint64_t> runs;  // run length -> count

    std::uint64_t run_count() const;
    std::uint64_t element_count() const;
    std::uint64_t min_run() const;
};

struct TransposeAnalysis {
    BurstStats without_module;  // column-wise reads straight from row-major A
    BurstStats with_module;     // wide row reads through the transpose FIFOs
    std::uint64_t fifo_count = 0;
    std::uint64_t fifo_depth = 0;
    std::uint64_t passes_over_a = 0;  // ceil(n / y_tot): A is streamed once per memory-tile column
};

/// Read pattern of one pass over a row-major m x k matrix A. With the module,
/// rows are read as vectors of `vector_width` elements, scattered over
/// `vector_width` FIFOs and popped column-wise. `fifo_depth` defaults to x_tot;
/// a depth below x_tot is a ConfigError.
TransposeAnalysis transpose_access_analysis(const ProblemSize& p, const TileConfig& cfg, std::uint64_t vector_width,
                                            std::uint64_t fifo_depth = 0);

}  // namespace mmmdse
