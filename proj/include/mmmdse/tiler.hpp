#pragma once

/**
 * @file tiler.hpp
 * @brief Design-space exploration over tile configurations: the greedy
 *        three-step parameter selection and an exhaustive ranked sweep.
 */

#include "mmmdse/analytic_models.hpp"
#include "mmmdse/hardware_model.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace mmmdse {

enum class MemoryShapes {
    best,  // one memory-tile shape per compute configuration (the greedy step-3 choice)
    all,   // every x_t*y_t = s_b, x_b*y_b = floor(N_b,max/N_b,min) factorization
};

struct SearchBounds {
    Layout layout = Layout::chain_1d;
    std::optional<double> frequency_hz;

    // Upper bounds per tile extent; unset means "derived from the hardware".
    std::optional<std::uint64_t> max_x_c, max_y_c, max_x_p, max_y_p;
    std::optional<std::uint64_t> max_x_t, max_y_t, max_x_b, max_y_b;

    std::optional<std::uint64_t> fixed_y_c;
    std::optional<std::uint64_t> fixed_n_p;

    MemoryShapes memory_shapes = MemoryShapes::best;
    unsigned threads = 0;  // 0 = hardware concurrency

    void validate() const;
};

struct SelectionStep {
    std::string title;
    std::string detail;
};

struct Selection {
    DesignPoint design;
    std::vector<SelectionStep> steps;
};

/// Greedy procedure: x_c = 1 and y_c bounded by the bus width; N_c = N_p*y_c
/// maximised under resource/memory/chain limits (ties favour the larger y_c);
/// memory tile filled to the usable blocks and shaped as square as the
/// hierarchy permits. Throws InfeasibleError naming the binding constraint.
Selection select_parameters(const HardwareSpec& hw, const DataTypeSpec& dt, const std::optional<ProblemSize>& problem,
                            const SearchBounds& bounds = {});

/// Strict weak order used by sweep: peak ops/cycle desc, computational
/// intensity desc, used blocks desc, |y_tot - x_tot| asc, N_p asc, config asc.
bool ranks_before(const DesignPoint& a, const DesignPoint& b);

/// All feasible configurations within bounds, fully ranked. Empty if none.
std::vector<DesignPoint> sweep(const HardwareSpec& hw, const DataTypeSpec& dt,
                               const std::optional<ProblemSize>& problem, const SearchBounds& bounds = {});

/// Memory-tile shape for fixed compute extents (x_c, y_c, x_p, y_p of `compute`).
/// Returns nullopt when no shape satisfies the bounds.
std::optional<TileConfig> choose_memory_shape(const HardwareSpec& hw, const DataTypeSpec& dt, const TileConfig& compute,
                                              const std::optional<ProblemSize>& problem, const SearchBounds& bounds);

}  // namespace mmmdse
