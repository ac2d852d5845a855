#include "mmmdse/arch_layout.hpp"

#include "mmmdse/errors.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace mmmdse {

namespace {

class Builder {
public:
    explicit Builder(ModuleGraph& g) : g_(g) {}

    std::size_t node(ModuleNode n) {
        g_.nodes.push_back(std::move(n));
        return g_.nodes.size() - 1;
    }

    void edge(std::size_t src, std::size_t dst, Channel ch, std::uint64_t width, std::uint64_t depth = 1) {
        g_.edges.push_back({src, dst, ch, width, depth});
    }

private:
    ModuleGraph& g_;
};

ModuleNode make(std::string id, ModuleKind kind, std::uint64_t index = 0) {
    ModuleNode n;
    n.id = std::move(id);
    n.kind = kind;
    n.index = index;
    return n;
}

void build_chain(ModuleGraph& g, const TileConfig& cfg, const DataTypeSpec& dt, const LayoutOptions& opt) {
    Builder b(g);
    const auto n_p = cfg.processing_elements();
    const auto w = dt.width_bits;
    const auto row_width = cfg.y_c * w;

    const auto read_a = b.node(make("ReadA", ModuleKind::read_a));
    std::size_t a_source = read_a;
    std::size_t transpose = 0;
    if (opt.transpose_a) {
        auto t = make("Transpose", ModuleKind::transpose);
        t.fifo_count = g.a_vector_width;
        t.buffer_words = g.a_fifo_depth;
        transpose = b.node(t);
        a_source = transpose;
    }
    auto fb = make("FeedB", ModuleKind::feed_b);
    fb.buffer_words = cfg.y_tot();
    const auto feed_b = b.node(fb);

    std::vector<std::size_t> pes;
    for (std::uint64_t i = 1; i <= n_p; ++i) {
        auto pe = make("PE_" + std::to_string(i), ModuleKind::pe, i);
        pe.row = i - 1;
        pe.a_registers = 2;
        pe.c_elements = cfg.x_tot() * cfg.y_tot() / n_p;
        pes.push_back(b.node(pe));
    }
    const auto write_c = b.node(make("WriteC", ModuleKind::write_c));

    if (opt.transpose_a) b.edge(read_a, transpose, Channel::mem, g.a_vector_width * w, g.a_fifo_depth);
    b.edge(a_source, pes.front(), Channel::a_bus, w);
    b.edge(feed_b, pes.front(), Channel::b_bus, row_width);
    for (std::size_t i = 0; i + 1 < pes.size(); ++i) {
        b.edge(pes[i], pes[i + 1], Channel::a_bus, w);
        b.edge(pes[i], pes[i + 1], Channel::b_bus, row_width);
        b.edge(pes[i + 1], pes[i], Channel::c_bus, row_width);
    }
    b.edge(pes.front(), write_c, Channel::c_bus, row_width);
}

void build_grid(ModuleGraph& g, const TileConfig& cfg, const DataTypeSpec& dt) {
    Builder b(g);
    const auto w = dt.width_bits;
    const auto a_width = cfg.x_c * w;
    const auto b_width = cfg.y_c * w;

    std::vector<std::size_t> feed_a, feed_b;
    for (std::uint64_t r = 0; r < cfg.x_p; ++r) {
        auto n = make("FeedA_" + std::to_string(r), ModuleKind::feed_a, r);
        n.buffer_words = cfg.x_tot() / cfg.x_p;
        feed_a.push_back(b.node(n));
    }
    for (std::uint64_t c = 0; c < cfg.y_p; ++c) {
        auto n = make("FeedB_" + std::to_string(c), ModuleKind::feed_b, c);
        n.buffer_words = cfg.y_tot() / cfg.y_p;
        feed_b.push_back(b.node(n));
    }
    std::vector<std::size_t> pe(cfg.x_p * cfg.y_p);
    for (std::uint64_t r = 0; r < cfg.x_p; ++r) {
        for (std::uint64_t c = 0; c < cfg.y_p; ++c) {
            auto n = make("PE_" + std::to_string(r) + "_" + std::to_string(c), ModuleKind::pe, r * cfg.y_p + c + 1);
            n.row = r;
            n.col = c;
            n.a_registers = 2 * cfg.x_c;
            n.c_elements = cfg.x_tot() * cfg.y_tot() / cfg.processing_elements();
            pe[r * cfg.y_p + c] = b.node(n);
        }
    }
    const auto store_c = b.node(make("StoreC", ModuleKind::store_c));

    auto at = [&](std::uint64_t r, std::uint64_t c) { return pe[r * cfg.y_p + c]; };
    for (std::uint64_t r = 0; r < cfg.x_p; ++r) {
        b.edge(feed_a[r], at(r, 0), Channel::a_bus, a_width);
        for (std::uint64_t c = 0; c + 1 < cfg.y_p; ++c) b.edge(at(r, c), at(r, c + 1), Channel::a_bus, a_width);
    }
    for (std::uint64_t c = 0; c < cfg.y_p; ++c) {
        b.edge(feed_b[c], at(0, c), Channel::b_bus, b_width);
        for (std::uint64_t r = 0; r + 1 < cfg.x_p; ++r) b.edge(at(r, c), at(r + 1, c), Channel::b_bus, b_width);
    }
    // C moves down each column and leaves through the last row.
    for (std::uint64_t c = 0; c < cfg.y_p; ++c) {
        for (std::uint64_t r = 0; r + 1 < cfg.x_p; ++r) b.edge(at(r, c), at(r + 1, c), Channel::c_bus, b_width);
        b.edge(at(cfg.x_p - 1, c), store_c, Channel::c_bus, b_width);
    }
}

void add_check(StructureReport& r, std::string name, bool ok, std::string detail) {
    r.checks.push_back({std::move(name), ok, std::move(detail)});
}

}  // namespace

const char* to_string(ModuleKind kind) {
    switch (kind) {
        case ModuleKind::read_a: return "ReadA";
        case ModuleKind::transpose: return "Transpose";
        case ModuleKind::feed_a: return "FeedA";
        case ModuleKind::feed_b: return "FeedB";
        case ModuleKind::pe: return "PE";
        case ModuleKind::write_c: return "WriteC";
        default: return "StoreC";
    }
}

const char* to_string(Channel channel) {
    switch (channel) {
        case Channel::a_bus: return "A";
        case Channel::b_bus: return "B";
        case Channel::c_bus: return "C";
        default: return "mem";
    }
}

std::size_t ModuleGraph::count(ModuleKind kind) const {
    return static_cast<std::size_t>(
        std::count_if(nodes.begin(), nodes.end(), [&](const ModuleNode& n) { return n.kind == kind; }));
}

std::size_t ModuleGraph::find(const std::string& id) const {
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (nodes[i].id == id) return i;
    }
    throw std::out_of_range("no module named " + id);
}

ModuleGraph build_layout(const TileConfig& cfg, const DataTypeSpec& dt, const LayoutOptions& options) {
    cfg.validate();
    dt.validate();
    if (options.vector_width < 1) throw ConfigError("A reader vector width must be >= 1");
    if (options.layout == Layout::chain_1d && (cfg.x_c != 1 || cfg.y_p != 1)) {
        throw InfeasibleError("layout_shape: the 1D chain requires x_c = 1 and y_p = 1");
    }
    if (options.fifo_depth != 0 && options.fifo_depth < cfg.x_tot()) {
        throw ConfigError("transpose FIFO depth " + std::to_string(options.fifo_depth) +
                          " is below the memory-tile column height " + std::to_string(cfg.x_tot()));
    }
    if (options.hardware != nullptr) {
        const auto report = check_resource_feasibility(cfg, *options.hardware, dt, options.layout);
        if (const auto* v = report.first_violation()) throw InfeasibleError(v->name + ": " + v->detail);
    }

    ModuleGraph g;
    g.layout = options.layout;
    g.a_vector_width = options.vector_width;
    g.a_fifo_depth = options.fifo_depth == 0 ? cfg.x_tot() : options.fifo_depth;
    if (options.layout == Layout::chain_1d) {
        build_chain(g, cfg, dt, options);
    } else {
        build_grid(g, cfg, dt);
    }
    return g;
}

bool StructureReport::ok() const {
    return std::all_of(checks.begin(), checks.end(), [](const ConstraintOutcome& c) { return c.satisfied; });
}

const ConstraintOutcome* StructureReport::find(const std::string& name) const {
    for (const auto& c : checks) {
        if (c.name == name) return &c;
    }
    return nullptr;
}

StructureReport verify_structure(const ModuleGraph& g, const TileConfig& cfg, std::uint64_t max_bus_width_bits) {
    StructureReport r;
    r.node_count = g.nodes.size();
    const auto n_p = cfg.processing_elements();

    std::map<std::pair<std::size_t, Channel>, std::uint64_t> port_fanout;
    std::vector<std::uint64_t> buses(g.nodes.size(), 0);
    for (const auto& e : g.edges) {
        ++port_fanout[{e.src, e.channel}];
        ++buses[e.src];
        ++buses[e.dst];
        const bool touches_pe = g.nodes[e.src].kind == ModuleKind::pe || g.nodes[e.dst].kind == ModuleKind::pe;
        if (touches_pe && e.channel != Channel::mem) ++r.compute_connections;
        r.max_bus_width_bits = std::max(r.max_bus_width_bits, e.width_bits);
    }
    for (const auto& [port, count] : port_fanout) r.max_fanout = std::max(r.max_fanout, count);

    std::uint64_t pe_count = 0, c_total = 0;
    bool c_even = true;
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        const auto& n = g.nodes[i];
        if (n.kind != ModuleKind::pe) continue;
        ++pe_count;
        r.registers += n.a_registers;
        c_total += n.c_elements;
        r.max_pe_buses = std::max(r.max_pe_buses, buses[i]);
    }
    if (pe_count > 0) {
        const auto first = std::find_if(g.nodes.begin(), g.nodes.end(),
                                        [](const ModuleNode& n) { return n.kind == ModuleKind::pe; });
        for (const auto& n : g.nodes) {
            if (n.kind == ModuleKind::pe && n.c_elements != first->c_elements) c_even = false;
        }
    }

    add_check(r, "pe_count", pe_count == n_p,
              std::to_string(pe_count) + " PEs for N_p = " + std::to_string(n_p));
    add_check(r, "fanout", r.max_fanout == 1 && r.max_pe_buses <= 6,
              "max fan-out " + std::to_string(r.max_fanout) + ", busiest PE has " + std::to_string(r.max_pe_buses) +
                  " buses (limit 6)");
    add_check(r, "connections", r.compute_connections == 3 * n_p,
              std::to_string(r.compute_connections) + " compute connections, expected " + std::to_string(3 * n_p));
    const auto expected_regs = 2 * cfg.x_c * n_p;
    add_check(r, "registers", r.registers == expected_regs,
              std::to_string(r.registers) + " A registers, expected " + std::to_string(expected_regs));
    if (g.layout == Layout::chain_1d) {
        add_check(r, constraint::chain_depth, cfg.x_t * cfg.y_t >= n_p,
                  "x_t*y_t = " + std::to_string(cfg.x_t * cfg.y_t) + " vs N_p = " + std::to_string(n_p));
    }
    add_check(r, "bus_width", r.max_bus_width_bits <= max_bus_width_bits,
              "widest bus " + std::to_string(r.max_bus_width_bits) + " bits, limit " +
                  std::to_string(max_bus_width_bits));
    const auto tile = cfg.x_tot() * cfg.y_tot();
    add_check(r, "c_partition", c_even && c_total == tile && n_p > 0 && tile % n_p == 0,
              std::to_string(c_total) + " of " + std::to_string(tile) + " C elements partitioned over " +
                  std::to_string(pe_count) + " PEs");
    return r;
}

std::string export_graph(const ModuleGraph& g) {
    std::ostringstream os;
    os << "graph layout=" << to_string(g.layout) << " nodes=" << g.nodes.size() << " edges=" << g.edges.size()
       << '\n';
    for (const auto& n : g.nodes) {
        os << "node " << n.id << " kind=" << to_string(n.kind) << " index=" << n.index;
        if (n.kind == ModuleKind::pe) {
            os << " row=" << n.row << " col=" << n.col << " a_registers=" << n.a_registers
               << " c_elements=" << n.c_elements;
        }
        if (n.kind == ModuleKind::transpose) os << " fifos=" << n.fifo_count;
        if (n.buffer_words != 0) os << " buffer_words=" << n.buffer_words;
        os << '\n';
    }
    for (const auto& e : g.edges) {
        os << "edge " << g.nodes[e.src].id << ' ' << g.nodes[e.dst].id << " channel=" << to_string(e.channel)
           << " width=" << e.width_bits << " depth=" << e.depth_words << '\n';
    }
    return os.str();
}

ModuleGraph collapse_to_chain(const ModuleGraph& grid, bool transpose_a) {
    if (grid.layout != Layout::grid_2d) throw ConfigError("collapse_to_chain expects a 2D grid");
    std::vector<const ModuleNode*> pes;
    for (const auto& n : grid.nodes) {
        if (n.kind != ModuleKind::pe) continue;
        if (n.col != 0) throw ConfigError("only grids with a single PE column (y_p = 1) collapse to a chain");
        pes.push_back(&n);
    }
    if (pes.empty()) throw ConfigError("grid has no PEs");
    std::sort(pes.begin(), pes.end(), [](const ModuleNode* a, const ModuleNode* b) { return a->row < b->row; });

    std::uint64_t a_width = 0, b_width = 0, c_width = 0, b_buffer = 0;
    for (const auto& e : grid.edges) {
        const auto& s = grid.nodes[e.src];
        const auto& d = grid.nodes[e.dst];
        if (s.kind == ModuleKind::feed_a) a_width = e.width_bits;
        if (s.kind == ModuleKind::feed_b) {
            b_width = e.width_bits;
            b_buffer = s.buffer_words;
        }
        if (d.kind == ModuleKind::store_c) c_width = e.width_bits;
    }

    ModuleGraph g;
    g.layout = Layout::chain_1d;
    g.a_vector_width = grid.a_vector_width;
    g.a_fifo_depth = grid.a_fifo_depth;
    Builder b(g);
    const auto read_a = b.node(make("ReadA", ModuleKind::read_a));
    std::size_t a_source = read_a;
    if (transpose_a) {
        auto t = make("Transpose", ModuleKind::transpose);
        t.fifo_count = grid.a_vector_width;
        t.buffer_words = grid.a_fifo_depth;
        a_source = b.node(t);
    }
    auto fb = make("FeedB", ModuleKind::feed_b);
    fb.buffer_words = b_buffer;
    const auto feed_b = b.node(fb);
    std::vector<std::size_t> chain;
    for (std::size_t i = 0; i < pes.size(); ++i) {
        auto pe = *pes[i];
        pe.id = "PE_" + std::to_string(i + 1);
        pe.index = i + 1;
        pe.row = i;
        pe.col = 0;
        chain.push_back(b.node(pe));
    }
    const auto write_c = b.node(make("WriteC", ModuleKind::write_c));

    const auto elem_width = a_width;  // x_c = 1 once collapsed
    if (transpose_a) b.edge(read_a, a_source, Channel::mem, grid.a_vector_width * elem_width, grid.a_fifo_depth);
    b.edge(a_source, chain.front(), Channel::a_bus, a_width);
    b.edge(feed_b, chain.front(), Channel::b_bus, b_width);
    for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
        b.edge(chain[i], chain[i + 1], Channel::a_bus, a_width);
        b.edge(chain[i], chain[i + 1], Channel::b_bus, b_width);
        b.edge(chain[i + 1], chain[i], Channel::c_bus, c_width);
    }
    b.edge(chain.front(), write_c, Channel::c_bus, c_width);
    return g;
}

bool structurally_equal(const ModuleGraph& a, const ModuleGraph& b) {
    if (a.layout != b.layout || a.nodes.size() != b.nodes.size() || a.edges.size() != b.edges.size()) return false;
    using NodeKey = std::tuple<ModuleKind, std::uint64_t, std::uint64_t, std::uint64_t, std::uint64_t, std::uint64_t,
                               std::uint64_t, std::uint64_t>;
    auto key = [](const ModuleNode& n) {
        return NodeKey{n.kind, n.index, n.row, n.col, n.a_registers, n.c_elements, n.buffer_words, n.fifo_count};
    };
    auto nodes_of = [&](const ModuleGraph& g) {
        std::vector<NodeKey> out;
        for (const auto& n : g.nodes) out.push_back(key(n));
        std::sort(out.begin(), out.end());
        return out;
    };
    auto edges_of = [&](const ModuleGraph& g) {
        std::vector<std::tuple<NodeKey, NodeKey, Channel, std::uint64_t, std::uint64_t>> out;
        for (const auto& e : g.edges) {
            out.emplace_back(key(g.nodes[e.src]), key(g.nodes[e.dst]), e.channel, e.width_bits, e.depth_words);
        }
        std::sort(out.begin(), out.end());
        return out;
    };
    return nodes_of(a) == nodes_of(b) && edges_of(a) == edges_of(b);
}

}  // namespace mmmdse
