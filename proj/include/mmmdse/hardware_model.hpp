#pragma once

/**
 * @file hardware_model.hpp
 * @brief Declarative target description and the mapping from a tile
 *        configuration onto compute-unit and memory-block consumption.
 */

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace mmmdse {

/// Named amounts of logic resources ("LUT", "FF", "DSP", ...). Kinds are free-form
/// so that targets with native floating-point DSPs and LUT/FF/DSP mixes both fit.
class ResourceVector {
public:
    using Entry = std::pair<std::string, std::uint64_t>;

    ResourceVector() = default;
    /// Throws ConfigError on duplicate kinds.
    ResourceVector(std::initializer_list<Entry> entries);
    explicit ResourceVector(std::vector<Entry> entries);

    const std::vector<Entry>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }

    bool contains(const std::string& kind) const;
    /// Throws ConfigError if the kind is not present.
    std::uint64_t amount(const std::string& kind) const;
    std::vector<std::string> kinds() const;

    /// True when both vectors carry exactly the same set of kinds (order ignored).
    bool same_kinds(const ResourceVector& other) const;

    ResourceVector scaled(std::uint64_t factor) const;

    friend bool operator==(const ResourceVector&, const ResourceVector&) = default;

private:
    std::vector<Entry> entries_;
};

struct HardwareSpec {
    std::string name;
    ResourceVector resources_max;
    std::uint64_t memory_blocks_max = 0;
    std::uint64_t block_capacity_bits = 0;
    std::vector<std::uint64_t> supported_port_widths_bits;  // ascending
    std::uint64_t max_bus_width_bits = 0;
    double target_frequency_hz = 0.0;

    /// Throws ConfigError when an invariant is broken.
    void validate() const;
};

enum class ArithmeticKind { exact_integer, floating_point };

struct DataTypeSpec {
    std::string name;
    std::uint64_t width_bits = 0;
    ResourceVector cost_per_compute_unit;
    ResourceVector overhead_per_pe;
    std::uint64_t accumulation_latency_cycles = 1;
    ArithmeticKind arithmetic_kind = ArithmeticKind::exact_integer;
    // Forces the memory-block port configuration instead of the narrowest
    // port that holds one element. Used when PE words are coalesced into a
    // wider port (e.g. 8-bit integers packed into the 36-bit mode).
    std::optional<std::uint64_t> port_width_override_bits;

    void validate() const;
    /// Throws ConfigError when r_c / r_p kinds differ from the hardware's.
    void validate_against(const HardwareSpec& hw) const;
};

/// The eight tile extents of the hierarchy: compute unit (c), processing
/// element (p), compute tile (t) and block tile (b), per i/j dimension.
struct TileConfig {
    std::uint64_t x_c = 1, y_c = 1;
    std::uint64_t x_p = 1, y_p = 1;
    std::uint64_t x_t = 1, y_t = 1;
    std::uint64_t x_b = 1, y_b = 1;

    void validate() const;

    std::uint64_t x_tot() const { return x_c * x_p * x_t * x_b; }
    std::uint64_t y_tot() const { return y_c * y_p * y_t * y_b; }
    std::uint64_t compute_units() const { return x_c * y_c * x_p * y_p; }
    std::uint64_t processing_elements() const { return x_p * y_p; }
    std::uint64_t units_per_pe() const { return x_c * y_c; }

    friend auto operator<=>(const TileConfig&, const TileConfig&) = default;
};

enum class Layout { chain_1d, grid_2d };

const char* to_string(Layout layout);
/// Accepts "1d"/"2d" (case-insensitive). Throws ConfigError otherwise.
Layout parse_layout(const std::string& text);

struct BlockWords {
    std::uint64_t port_width_bits = 0;
    std::uint64_t words_per_block = 0;
};

std::uint64_t max_compute_units(const HardwareSpec& hw, const DataTypeSpec& dt);

BlockWords block_words(const HardwareSpec& hw, const DataTypeSpec& dt);

std::uint64_t min_memory_blocks(const TileConfig& cfg, const HardwareSpec& hw, const DataTypeSpec& dt);

/// Blocks usable without breaking load balance: floor(N_b,max / N_b,min) * N_b,min.
/// Throws InfeasibleError when N_b,min exceeds the available blocks.
std::uint64_t usable_memory_blocks(const TileConfig& cfg, const HardwareSpec& hw, const DataTypeSpec& dt);

struct ConstraintOutcome {
    std::string name;
    bool satisfied = false;
    std::string detail;
};

/// Named pass/fail list; infeasibility is data so the tiler can explain rejections.
struct FeasibilityReport {
    std::vector<ConstraintOutcome> outcomes;

    bool feasible() const;
    const ConstraintOutcome* first_violation() const;
    const ConstraintOutcome* find(const std::string& name) const;
};

namespace constraint {
inline constexpr const char* resources = "resources";
inline constexpr const char* bus_x = "bus_width_x";
inline constexpr const char* bus_y = "bus_width_y";
inline constexpr const char* memory_blocks = "memory_blocks";
inline constexpr const char* chain_depth = "chain_depth";
inline constexpr const char* block_depth = "block_tile_depth";
inline constexpr const char* block_count = "memory_tile_blocks";
inline constexpr const char* layout_shape = "layout_shape";
}  // namespace constraint

/// Evaluates the resource bounds N_p*(r_p + r_c*x_c*y_c) <= r_max (one outcome per kind), both
/// bus-width bounds, the memory-block minimum, the block-tile depth and
/// block-count limits and, for the 1D chain, the chain-depth and shape rules.
FeasibilityReport check_resource_feasibility(const TileConfig& cfg, const HardwareSpec& hw,
                                             const DataTypeSpec& dt, Layout layout = Layout::chain_1d);

}  // namespace mmmdse
