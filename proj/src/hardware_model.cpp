#include "mmmdse/hardware_model.hpp"

#include "mmmdse/errors.hpp"

#include <algorithm>
#include <cctype>
#include <limits>
#include <set>
#include <sstream>

namespace mmmdse {

namespace {

std::uint64_t ceil_div(std::uint64_t a, std::uint64_t b) { return (a + b - 1) / b; }

void require_same_kinds(const ResourceVector& a, const ResourceVector& b, const char* what) {
    if (!a.same_kinds(b)) {
        throw ConfigError(std::string("resource kinds of ") + what + " do not match the hardware resources");
    }
}

}  // namespace

ResourceVector::ResourceVector(std::initializer_list<Entry> entries)
    : ResourceVector(std::vector<Entry>(entries)) {}

ResourceVector::ResourceVector(std::vector<Entry> entries) : entries_(std::move(entries)) {
    std::set<std::string> seen;
    for (const auto& [kind, amount] : entries_) {
        if (kind.empty()) throw ConfigError("empty resource kind name");
        if (!seen.insert(kind).second) throw ConfigError("duplicate resource kind '" + kind + "'");
    }
}

bool ResourceVector::contains(const std::string& kind) const {
    return std::any_of(entries_.begin(), entries_.end(), [&](const Entry& e) { return e.first == kind; });
}

std::uint64_t ResourceVector::amount(const std::string& kind) const {
    for (const auto& [k, v] : entries_) {
        if (k == kind) return v;
    }
    throw ConfigError("unknown resource kind '" + kind + "'");
}

std::vector<std::string> ResourceVector::kinds() const {
    std::vector<std::string> out;
    out.reserve(entries_.size());
    for (const auto& e : entries_) out.push_back(e.first);
    return out;
}

bool ResourceVector::same_kinds(const ResourceVector& other) const {
    if (size() != other.size()) return false;
    return std::all_of(entries_.begin(), entries_.end(), [&](const Entry& e) { return other.contains(e.first); });
}

ResourceVector ResourceVector::scaled(std::uint64_t factor) const {
    auto copy = entries_;
    for (auto& e : copy) e.second *= factor;
    return ResourceVector(std::move(copy));
}

void HardwareSpec::validate() const {
    if (resources_max.empty()) throw ConfigError("hardware: resource vector is empty");
    if (memory_blocks_max < 1) throw ConfigError("hardware: memory_blocks must be >= 1");
    if (block_capacity_bits == 0) throw ConfigError("hardware: block_capacity_bits must be > 0");
    if (supported_port_widths_bits.empty()) throw ConfigError("hardware: port_widths_bits is empty");
    for (std::size_t i = 0; i < supported_port_widths_bits.size(); ++i) {
        const auto w = supported_port_widths_bits[i];
        if (w == 0) throw ConfigError("hardware: port width 0 is not allowed");
        if (i > 0 && w <= supported_port_widths_bits[i - 1]) {
            throw ConfigError("hardware: port_widths_bits must be strictly ascending");
        }
        if (block_capacity_bits % w != 0) {
            throw ConfigError("hardware: block capacity " + std::to_string(block_capacity_bits) +
                              " is not divisible by port width " + std::to_string(w));
        }
    }
    if (max_bus_width_bits == 0) throw ConfigError("hardware: max_bus_width_bits must be > 0");
    if (!(target_frequency_hz > 0.0)) throw ConfigError("hardware: frequency_hz must be > 0");
}

void DataTypeSpec::validate() const {
    if (width_bits < 1) throw ConfigError("datatype " + name + ": width_bits must be >= 1");
    const auto& e = cost_per_compute_unit.entries();
    if (std::none_of(e.begin(), e.end(), [](const auto& kv) { return kv.second > 0; })) {
        throw ConfigError("datatype " + name + ": cost_per_unit needs at least one non-zero entry");
    }
    if (accumulation_latency_cycles < 1) {
        throw ConfigError("datatype " + name + ": accumulation_latency must be >= 1");
    }
    if (arithmetic_kind == ArithmeticKind::exact_integer && width_bits > 64) {
        throw ConfigError("datatype " + name + ": integer types wider than 64 bits are not supported");
    }
}

void DataTypeSpec::validate_against(const HardwareSpec& hw) const {
    require_same_kinds(hw.resources_max, cost_per_compute_unit, ("datatype " + name + " cost_per_unit").c_str());
    require_same_kinds(hw.resources_max, overhead_per_pe, ("datatype " + name + " overhead_per_pe").c_str());
}

void TileConfig::validate() const {
    for (auto v : {x_c, y_c, x_p, y_p, x_t, y_t, x_b, y_b}) {
        if (v < 1) throw ConfigError("tile extents must all be >= 1");
    }
}

const char* to_string(Layout layout) { return layout == Layout::chain_1d ? "1d" : "2d"; }

Layout parse_layout(const std::string& text) {
    std::string lower;
    for (char ch : text) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
    if (lower == "1d") return Layout::chain_1d;
    if (lower == "2d") return Layout::grid_2d;
    throw ConfigError("unknown layout '" + text + "' (expected 1d or 2d)");
}

std::uint64_t max_compute_units(const HardwareSpec& hw, const DataTypeSpec& dt) {
    require_same_kinds(hw.resources_max, dt.cost_per_compute_unit, "cost_per_unit");
    std::uint64_t best = std::numeric_limits<std::uint64_t>::max();
    bool bounded = false;
    for (const auto& [kind, cost] : dt.cost_per_compute_unit.entries()) {
        if (cost == 0) continue;
        best = std::min(best, hw.resources_max.amount(kind) / cost);
        bounded = true;
    }
    if (!bounded) throw ConfigError("datatype " + dt.name + ": cost_per_unit is all zero");
    return best;
}

BlockWords block_words(const HardwareSpec& hw, const DataTypeSpec& dt) {
    const auto& widths = hw.supported_port_widths_bits;
    if (dt.port_width_override_bits) {
        const auto w = *dt.port_width_override_bits;
        if (std::find(widths.begin(), widths.end(), w) == widths.end()) {
            throw UnsupportedTypeError("datatype " + dt.name + ": port width override " + std::to_string(w) +
                                       " is not a supported block port width");
        }
        return {w, hw.block_capacity_bits / w};
    }
    for (auto w : widths) {
        if (w >= dt.width_bits) return {w, hw.block_capacity_bits / w};
    }
    throw UnsupportedTypeError("datatype " + dt.name + " (" + std::to_string(dt.width_bits) +
                               " bit) is wider than the widest memory port (" +
                               std::to_string(widths.empty() ? 0 : widths.back()) + " bit)");
}

std::uint64_t min_memory_blocks(const TileConfig& cfg, const HardwareSpec& hw, const DataTypeSpec& dt) {
    cfg.validate();
    const auto port = block_words(hw, dt).port_width_bits;
    return cfg.processing_elements() * ceil_div(dt.width_bits * cfg.units_per_pe(), port);
}

std::uint64_t usable_memory_blocks(const TileConfig& cfg, const HardwareSpec& hw, const DataTypeSpec& dt) {
    const auto n_min = min_memory_blocks(cfg, hw, dt);
    if (n_min > hw.memory_blocks_max) {
        throw InfeasibleError("configuration needs " + std::to_string(n_min) + " memory blocks but only " +
                              std::to_string(hw.memory_blocks_max) + " are available");
    }
    return (hw.memory_blocks_max / n_min) * n_min;
}

bool FeasibilityReport::feasible() const {
    return std::all_of(outcomes.begin(), outcomes.end(), [](const auto& o) { return o.satisfied; });
}

const ConstraintOutcome* FeasibilityReport::first_violation() const {
    for (const auto& o : outcomes) {
        if (!o.satisfied) return &o;
    }
    return nullptr;
}

const ConstraintOutcome* FeasibilityReport::find(const std::string& name) const {
    for (const auto& o : outcomes) {
        if (o.name == name) return &o;
    }
    return nullptr;
}

FeasibilityReport check_resource_feasibility(const TileConfig& cfg, const HardwareSpec& hw,
                                             const DataTypeSpec& dt, Layout layout) {
    cfg.validate();
    require_same_kinds(hw.resources_max, dt.cost_per_compute_unit, "cost_per_unit");
    require_same_kinds(hw.resources_max, dt.overhead_per_pe, "overhead_per_pe");

    FeasibilityReport report;
    auto at_most = [](bool ok) { return std::string(ok ? " <= " : " > "); };
    auto add = [&](std::string name, bool ok, std::string detail) {
        report.outcomes.push_back({std::move(name), ok, std::move(detail)});
    };

    const auto n_p = cfg.processing_elements();
    const auto units = cfg.units_per_pe();
    for (const auto& [kind, r_max] : hw.resources_max.entries()) {
        const auto used = n_p * (dt.overhead_per_pe.amount(kind) + dt.cost_per_compute_unit.amount(kind) * units);
        std::ostringstream d;
        d << "N_p*(r_p + r_c*x_c*y_c) = " << used << at_most(used <= r_max) << r_max << " " << kind;
        add(std::string(constraint::resources) + "." + kind, used <= r_max, d.str());
    }

    const auto bus_x = cfg.x_c * dt.width_bits;
    const auto bus_y = cfg.y_c * dt.width_bits;
    add(constraint::bus_x, bus_x <= hw.max_bus_width_bits,
        "x_c*w_c = " + std::to_string(bus_x) + at_most(bus_x <= hw.max_bus_width_bits) + "w_p,max = " +
            std::to_string(hw.max_bus_width_bits));
    add(constraint::bus_y, bus_y <= hw.max_bus_width_bits,
        "y_c*w_c = " + std::to_string(bus_y) + at_most(bus_y <= hw.max_bus_width_bits) + "w_p,max = " +
            std::to_string(hw.max_bus_width_bits));

    const auto bw = block_words(hw, dt);
    const auto n_min = n_p * ceil_div(dt.width_bits * units, bw.port_width_bits);
    const bool blocks_ok = n_min <= hw.memory_blocks_max;
    add(constraint::memory_blocks, blocks_ok,
        "N_b,min = " + std::to_string(n_min) + at_most(blocks_ok) + "N_b,max = " +
            std::to_string(hw.memory_blocks_max));

    const auto depth = cfg.x_t * cfg.y_t;
    add(constraint::block_depth, depth <= bw.words_per_block,
        "x_t*y_t = " + std::to_string(depth) + at_most(depth <= bw.words_per_block) + "s_b = " +
            std::to_string(bw.words_per_block));

    const auto block_tiles = cfg.x_b * cfg.y_b;
    const auto max_block_tiles = blocks_ok ? hw.memory_blocks_max / n_min : 0;
    add(constraint::block_count, block_tiles <= max_block_tiles,
        "x_b*y_b = " + std::to_string(block_tiles) + at_most(block_tiles <= max_block_tiles) +
            "floor(N_b,max/N_b,min) = " + std::to_string(max_block_tiles));

    if (layout == Layout::chain_1d) {
        add(constraint::layout_shape, cfg.x_c == 1 && cfg.y_p == 1,
            "1D chain requires x_c = 1 and y_p = 1 (got x_c = " + std::to_string(cfg.x_c) +
                ", y_p = " + std::to_string(cfg.y_p) + ")");
        add(constraint::chain_depth, depth >= n_p,
            "x_t*y_t = " + std::to_string(depth) + (depth >= n_p ? " >= " : " < ") + "N_p = " +
                std::to_string(n_p));
    }
    return report;
}

}  // namespace mmmdse
