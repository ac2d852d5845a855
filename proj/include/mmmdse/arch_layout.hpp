#pragma once

/**
 * @file arch_layout.hpp
 * @brief Module graph of the kernel (readers, feeders, PE chain or grid,
 *        writer) and its structural checks.
 *
 * Export format, one record per line, fields separated by single spaces:
 *   graph layout=<1d|2d> nodes=<N> edges=<E>
 *   node <id> kind=<kind> index=<i> [attr=value ...]
 *   edge <src> <dst> channel=<A|B|C|mem> width=<bits> depth=<words>
 * Nodes come in construction order, then edges in construction order.
 */

#include "mmmdse/hardware_model.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace mmmdse {

enum class ModuleKind { read_a, transpose, feed_a, feed_b, pe, write_c, store_c };
enum class Channel { a_bus, b_bus, c_bus, mem };

const char* to_string(ModuleKind kind);
const char* to_string(Channel channel);

struct ModuleNode {
    std::string id;
    ModuleKind kind = ModuleKind::pe;
    std::uint64_t index = 0;        // PE position (1-based along the chain, row-major in a grid), feeder row/column
    std::uint64_t row = 0, col = 0; // grid coordinates of PEs in the 2D layout
    std::uint64_t a_registers = 0;  // double-buffered A values held by a PE
    std::uint64_t c_elements = 0;   // share of the output tile buffered by a PE
    std::uint64_t buffer_words = 0; // Feed B row buffer / transpose FIFO depth
    std::uint64_t fifo_count = 0;   // transpose only
};

struct ModuleEdge {
    std::size_t src = 0;  // node positions
    std::size_t dst = 0;
    Channel channel = Channel::a_bus;
    std::uint64_t width_bits = 0;
    std::uint64_t depth_words = 1;
};

struct ModuleGraph {
    Layout layout = Layout::chain_1d;
    std::uint64_t a_vector_width = 1;  // A reader width in elements
    std::uint64_t a_fifo_depth = 0;    // transpose FIFO depth
    std::vector<ModuleNode> nodes;
    std::vector<ModuleEdge> edges;

    std::size_t count(ModuleKind kind) const;
    /// Index of the node with this id; throws std::out_of_range.
    std::size_t find(const std::string& id) const;
};

struct LayoutOptions {
    bool transpose_a = true;
    Layout layout = Layout::chain_1d;
    std::uint64_t vector_width = 8;  // A reader width in elements = transpose FIFO count
    std::uint64_t fifo_depth = 0;    // 0 = memory-tile column height x_tot
    // When set, the configuration is checked against the target first and the
    // first violated constraint is thrown as InfeasibleError.
    const HardwareSpec* hardware = nullptr;
};

/// 1D: ReadA -> [Transpose] -> PE_1 .. PE_Np with FeedB into PE_1 and the C
/// drain running backwards to WriteC at the head. 2D: x_p x y_p grid with a
/// Feed A column, a Feed B row and Store C below the last row.
ModuleGraph build_layout(const TileConfig& cfg, const DataTypeSpec& dt, const LayoutOptions& options = {});

struct StructureReport {
    std::vector<ConstraintOutcome> checks;
    std::uint64_t node_count = 0;
    std::uint64_t compute_connections = 0;  // A/B/C buses touching a PE
    std::uint64_t registers = 0;            // sum of PE A registers
    std::uint64_t max_fanout = 0;           // destinations driven by one output port
    std::uint64_t max_pe_buses = 0;         // in + out buses of the busiest PE
    std::uint64_t max_bus_width_bits = 0;

    bool ok() const;
    const ConstraintOutcome* find(const std::string& name) const;
};

/// Structural checks: point-to-point buses, at most six buses per PE, the
/// 3*N_p connection and 2*N_p register counts of the chain, chain depth,
/// bus widths within `max_bus_width_bits`, and an even C partition.
StructureReport verify_structure(const ModuleGraph& g, const TileConfig& cfg, std::uint64_t max_bus_width_bits);

std::string export_graph(const ModuleGraph& g);

/// Chain equivalent of a 2D grid with y_p = 1: the Feed A column is replaced by
/// a single A source feeding the first PE, A and B are forwarded along the PE
/// sequence and the C bus is reversed to drain at the head.
ModuleGraph collapse_to_chain(const ModuleGraph& grid, bool transpose_a = true);

/// Equality up to node order: compares the multiset of labelled edges and nodes.
bool structurally_equal(const ModuleGraph& a, const ModuleGraph& b);

}  // namespace mmmdse
