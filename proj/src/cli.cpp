#include "mmmdse/cli.hpp"

#include "mmmdse/analytic_models.hpp"
#include "mmmdse/arch_layout.hpp"
#include "mmmdse/csv.hpp"
#include "mmmdse/errors.hpp"
#include "mmmdse/matrix.hpp"
#include "mmmdse/schedule_sim.hpp"
#include "mmmdse/spec_file.hpp"
#include "mmmdse/tiler.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

namespace mmmdse::cli {

namespace {

/// Raised when a simulation or structural check fails.
class VerificationFailure : public Error {
public:
    using Error::Error;
};

std::uint64_t parse_count(const std::string& text, const std::string& what) {
    std::uint64_t v = 0;
    const auto* first = text.data();
    const auto* last = first + text.size();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (text.empty() || ec != std::errc{} || ptr != last) {
        throw ConfigError(what + ": expected a non-negative integer, got '" + text + "'");
    }
    return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream is(s);
    while (std::getline(is, item, sep)) out.push_back(item);
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

ProblemSize parse_problem(const std::string& text) {
    const auto parts = split(text, ',');
    ProblemSize p;
    if (parts.size() == 1) {
        p.m = p.n = p.k = parse_count(parts[0], "--problem");
    } else if (parts.size() == 3) {
        p.m = parse_count(parts[0], "--problem m");
        p.n = parse_count(parts[1], "--problem n");
        p.k = parse_count(parts[2], "--problem k");
    } else {
        throw ConfigError("--problem expects m,n,k or a single size, got '" + text + "'");
    }
    p.validate();
    return p;
}

std::string fixed(double v, int digits) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(digits) << v;
    return os.str();
}

std::string config_text(const TileConfig& c) {
    std::ostringstream os;
    os << "x_c=" << c.x_c << " y_c=" << c.y_c << " x_p=" << c.x_p << " y_p=" << c.y_p << " x_t=" << c.x_t
       << " y_t=" << c.y_t << " x_b=" << c.x_b << " y_b=" << c.y_b;
    return os.str();
}

std::string ratio_text(const Ratio& r, int digits) { return fixed(r.value(), digits); }

struct Common {
    std::string spec_path;
    std::string dtype;
    std::string problem;
    std::string csv;
    std::string layout;
    std::string config;
    std::uint64_t seed = 1;
    bool pad = false;
    double frequency = 0.0;  // 0 = from the spec

    SpecFile spec;
    const DataTypeSpec* dt = nullptr;

    void load() {
        spec = load_spec(spec_path);
        dt = &spec.datatype(dtype);
    }
    Layout chosen_layout() const { return layout.empty() ? spec.default_layout : parse_layout(layout); }
    double freq() const { return frequency > 0.0 ? frequency : spec.frequency_hz(); }
    std::optional<ProblemSize> problem_size() const {
        if (problem.empty()) return std::nullopt;
        return parse_problem(problem);
    }
};

void add_common(CLI::App* sub, Common& c, bool with_config) {
    sub->add_option("--spec", c.spec_path, "hardware/data-type spec file")->required();
    sub->add_option("--dtype", c.dtype, "data type section name")->required();
    sub->add_option("--problem", c.problem, "matrix sizes m,n,k (or one size for all three)");
    sub->add_option("--seed", c.seed, "generator seed")->capture_default_str();
    sub->add_option("--csv", c.csv, "write the tabular result as CSV");
    sub->add_option("--layout", c.layout, "1d or 2d (default from the spec)");
    sub->add_flag("--pad,!--strict", c.pad, "zero-pad non-divisible problems instead of rejecting them");
    sub->add_option("--frequency", c.frequency, "clock frequency assumption in Hz");
    if (with_config) sub->add_option("--config", c.config, "tile extents x_c,y_c,x_p,y_p,x_t,y_t,x_b,y_b");
}

struct BoundsArgs {
    std::optional<std::uint64_t> max_y_c, max_x_p, max_y_p, y_c, n_p;
    unsigned threads = 0;

    SearchBounds make(const Common& c) const {
        SearchBounds b;
        b.layout = c.chosen_layout();
        b.frequency_hz = c.freq();
        b.max_y_c = max_y_c;
        b.max_x_p = max_x_p;
        b.max_y_p = max_y_p;
        b.fixed_y_c = y_c;
        b.fixed_n_p = n_p;
        b.threads = threads;
        b.validate();
        return b;
    }
};

void add_bounds(CLI::App* sub, BoundsArgs& b) {
    sub->add_option("--max-y-c", b.max_y_c, "upper bound on y_c");
    sub->add_option("--max-x-p", b.max_x_p, "upper bound on x_p");
    sub->add_option("--max-y-p", b.max_y_p, "upper bound on y_p");
    sub->add_option("--y-c", b.y_c, "fix y_c");
    sub->add_option("--n-p", b.n_p, "fix the number of PEs");
    sub->add_option("--threads", b.threads, "worker threads (0 = all cores)");
}

void print_design(std::ostream& out, const DesignPoint& d, const DataTypeSpec& dt, const HardwareSpec& hw,
                  double freq) {
    out << "design: " << dt.name << " on " << hw.name << ", layout " << to_string(d.layout) << '\n';
    out << "config: " << config_text(d.cfg) << '\n';
    out << "compute units N_c: " << d.compute_units << " (PEs N_p: " << d.processing_elements << ")\n";
    out << "memory blocks: port " << d.port_width_bits << " bit, " << d.words_per_block
        << " words/block, N_b,min " << d.min_blocks << ", N_b " << d.usable_blocks << " of "
        << hw.memory_blocks_max << ", used " << d.used_blocks << '\n';
    out << "capacity S: " << d.capacity_words << " words (" << d.capacity_elements << " elements coalesced)\n";
    out << "memory tile: " << d.x_tot << " x " << d.y_tot << '\n';
    out << "computational intensity: " << ratio_text(d.computational_intensity, 2) << " ops/element\n";
    out << "arithmetic intensity: " << ratio_text(d.arithmetic_intensity, 2) << " op/B\n";
    out << "peak: " << d.peak_ops_per_cycle << " ops/cycle, "
        << fixed(static_cast<double>(d.peak_ops_per_cycle) * freq / 1e9, 1) << " GOp/s at "
        << fixed(freq / 1e6, 1) << " MHz\n";
    out << "collision distance: " << d.collision_distance << " cycles (latency " << dt.accumulation_latency_cycles
        << ", pipeline " << (d.pipeline_safe ? "safe" : "UNSAFE") << ")\n";
    if (d.problem) {
        const auto& p = *d.problem;
        out << "problem: m=" << p.m << " n=" << p.n << " k=" << p.k << '\n';
        if (d.io_volume) {
            out << "io volume Q: " << *d.io_volume << " elements\n";
            const double ops = static_cast<double>(d.peak_ops_per_cycle) * freq;
            out << "average bandwidth at peak: "
                << fixed(average_bandwidth(p, d.x_tot, d.y_tot, dt.width_bits, ops) / 1e9, 3) << " GB/s\n";
        } else {
            out << "io volume Q: n/a (memory tile exceeds the matrix)\n";
        }
        if (d.drain_efficiency) out << "drain efficiency: " << fixed(*d.drain_efficiency, 4) << '\n';
        if (d.execution_time_s) out << "execution time: " << fixed(*d.execution_time_s, 4) << " s\n";
    }
    out << "feasibility: " << (d.feasible() ? "feasible" : "INFEASIBLE") << '\n';
    for (const auto& o : d.feasibility.outcomes) {
        out << "  " << (o.satisfied ? "PASS " : "FAIL ") << o.name << ": " << o.detail << '\n';
    }
}

std::vector<std::string> design_header(bool with_problem) {
    std::vector<std::string> h = {"x_c", "y_c", "x_p", "y_p", "x_t", "y_t", "x_b", "y_b",
                                  "N_c", "N_p", "N_b_min", "N_b", "used_blocks", "S_words",
                                  "x_tot", "y_tot", "computational_intensity", "arithmetic_intensity",
                                  "peak_ops_per_cycle", "collision_distance", "pipeline_safe", "feasible"};
    if (with_problem) {
        h.insert(h.end(), {"Q", "drain_efficiency", "execution_time_s"});
    }
    return h;
}

std::vector<std::string> design_row(const DesignPoint& d, bool with_problem) {
    const auto& c = d.cfg;
    std::vector<std::string> r = {std::to_string(c.x_c), std::to_string(c.y_c), std::to_string(c.x_p),
                                  std::to_string(c.y_p), std::to_string(c.x_t), std::to_string(c.y_t),
                                  std::to_string(c.x_b), std::to_string(c.y_b), std::to_string(d.compute_units),
                                  std::to_string(d.processing_elements), std::to_string(d.min_blocks),
                                  std::to_string(d.usable_blocks), std::to_string(d.used_blocks),
                                  std::to_string(d.capacity_words), std::to_string(d.x_tot),
                                  std::to_string(d.y_tot), ratio_text(d.computational_intensity, 6),
                                  ratio_text(d.arithmetic_intensity, 6), std::to_string(d.peak_ops_per_cycle),
                                  std::to_string(d.collision_distance), d.pipeline_safe ? "1" : "0",
                                  d.feasible() ? "1" : "0"};
    if (with_problem) {
        r.push_back(d.io_volume ? std::to_string(*d.io_volume) : "");
        r.push_back(d.drain_efficiency ? fixed(*d.drain_efficiency, 6) : "");
        r.push_back(d.execution_time_s ? fixed(*d.execution_time_s, 6) : "");
    }
    return r;
}

void maybe_save(const Common& c, const CsvTable& t, std::ostream& out) {
    if (c.csv.empty()) return;
    save_csv(c.csv, t);
    out << "wrote " << c.csv << '\n';
}

TileConfig require_config(const Common& c) {
    if (c.config.empty()) throw ConfigError("--config is required for this command");
    return parse_tile_config(c.config);
}

int cmd_analyze(const Common& c, std::ostream& out) {
    const auto cfg = require_config(c);
    const auto problem = c.problem_size();
    const auto d = evaluate_design(c.spec.hardware, *c.dt, cfg, c.chosen_layout(), problem, c.freq());
    print_design(out, d, *c.dt, c.spec.hardware, c.freq());
    maybe_save(c, CsvTable{design_header(problem.has_value()), {design_row(d, problem.has_value())}}, out);
    return d.feasible() ? exit_ok : exit_infeasible;
}

int cmd_optimize(const Common& c, const BoundsArgs& b, bool explain, std::ostream& out) {
    const auto bounds = b.make(c);
    const auto problem = c.problem_size();
    const auto sel = select_parameters(c.spec.hardware, *c.dt, problem, bounds);
    if (explain) {
        for (const auto& s : sel.steps) out << s.title << ": " << s.detail << '\n';
        out << '\n';
    }
    print_design(out, sel.design, *c.dt, c.spec.hardware, c.freq());
    maybe_save(c, CsvTable{design_header(problem.has_value()), {design_row(sel.design, problem.has_value())}}, out);
    return exit_ok;
}

int cmd_sweep(const Common& c, const BoundsArgs& b, std::size_t top, bool all_shapes, std::ostream& out) {
    auto bounds = b.make(c);
    if (all_shapes) bounds.memory_shapes = MemoryShapes::all;
    const auto problem = c.problem_size();
    const auto ranked = sweep(c.spec.hardware, *c.dt, problem, bounds);
    out << ranked.size() << " feasible configurations\n";
    out << "rank  N_c   N_p   x_tot  y_tot  CI        AI(op/B)  config\n";
    for (std::size_t i = 0; i < ranked.size() && i < top; ++i) {
        const auto& d = ranked[i];
        out << std::left << std::setw(6) << i + 1 << std::setw(6) << d.compute_units << std::setw(6)
            << d.processing_elements << std::setw(7) << d.x_tot << std::setw(7) << d.y_tot << std::setw(10)
            << ratio_text(d.computational_intensity, 2) << std::setw(10) << ratio_text(d.arithmetic_intensity, 2)
            << config_text(d.cfg) << '\n';
    }
    CsvTable t;
    t.header = design_header(problem.has_value());
    t.header.insert(t.header.begin(), "rank");
    for (std::size_t i = 0; i < ranked.size(); ++i) {
        auto row = design_row(ranked[i], problem.has_value());
        row.insert(row.begin(), std::to_string(i + 1));
        t.rows.push_back(std::move(row));
    }
    maybe_save(c, t, out);
    return ranked.empty() ? exit_infeasible : exit_ok;
}

int cmd_sweep_memory(const Common& c, const std::string& range, std::ostream& out) {
    const auto compute = require_config(c);
    const auto& hw = c.spec.hardware;
    const auto& dt = *c.dt;
    const auto bw = block_words(hw, dt);
    const auto n_min = min_memory_blocks(compute, hw, dt);
    if (n_min > hw.memory_blocks_max) {
        throw InfeasibleError("memory_blocks: N_b,min = " + std::to_string(n_min) + " exceeds " +
                              std::to_string(hw.memory_blocks_max));
    }
    const auto units = compute.compute_units();
    const auto block_tile = bw.words_per_block * units;  // elements one set of N_b,min blocks holds
    const auto capacity = (hw.memory_blocks_max / n_min) * block_tile;

    std::uint64_t start = units, stop = capacity, step = 0;
    if (!range.empty()) {
        const auto parts = split(range, ':');
        if (parts.size() != 2 && parts.size() != 3) throw ConfigError("--range expects start:stop[:step]");
        start = parse_count(parts[0], "--range start");
        stop = parse_count(parts[1], "--range stop");
        if (parts.size() == 3) step = parse_count(parts[2], "--range step");
    }
    if (start < 1 || stop < start) throw ConfigError("--range needs 1 <= start <= stop");
    if (step == 0) step = std::max<std::uint64_t>(1, (stop - start) / 63);

    const double ops_per_s = 2.0 * static_cast<double>(units) * c.freq();
    CsvTable t;
    t.header = {"memory_tile_elems", "N_b_used", "utilization_fraction", "arithmetic_intensity",
                "bandwidth_bytes_per_s"};
    for (std::uint64_t e = start; e <= stop; e += step) {
        const auto used = ((e + block_tile - 1) / block_tile) * n_min;
        if (used > hw.memory_blocks_max) break;
        // Square memory tile of e elements: CI = sqrt(e)/2.
        const double ai = std::sqrt(static_cast<double>(e)) / (static_cast<double>(dt.width_bits) / 8.0);
        const double util = static_cast<double>(used) / static_cast<double>(hw.memory_blocks_max);
        std::ostringstream ai_s, bw_s, u_s;
        ai_s << std::setprecision(10) << ai;
        bw_s << std::setprecision(10) << ops_per_s / ai;
        u_s << std::setprecision(10) << util;
        t.rows.push_back({std::to_string(e), std::to_string(used), u_s.str(), ai_s.str(), bw_s.str()});
        if (stop - e < step) break;
    }
    write_csv(out, t);
    if (!c.csv.empty()) save_csv(c.csv, t);
    return exit_ok;
}

double float_tolerance(const ElementFormat& f, std::uint64_t k) {
    return std::ldexp(1.0, -f.mantissa_bits() + 4) * static_cast<double>(k);
}

struct SimArgs {
    std::string engine = "auto";
    std::string a_path, b_path, save_c;
    bool efficiency_sweep = false;
    std::string sizes;
};

int cmd_efficiency_sweep(const Common& c, const TileConfig& cfg, const SimArgs& s, std::ostream& out) {
    std::vector<std::uint64_t> sizes;
    if (!s.sizes.empty()) {
        for (const auto& p : split(s.sizes, ',')) sizes.push_back(parse_count(p, "--sizes"));
    } else {
        const auto base = std::max(cfg.x_tot(), cfg.y_tot());
        for (int i = 0; i < 8; ++i) sizes.push_back(base << i);
    }
    CsvTable t;
    t.header = {"size", "compute_cycles", "drain_cycles", "efficiency"};
    for (auto n : sizes) {
        const auto counts = count_schedule({n, n, n}, cfg, true);
        std::ostringstream e;
        e << std::setprecision(10) << counts.efficiency();
        t.rows.push_back({std::to_string(n), std::to_string(counts.compute_cycles),
                          std::to_string(counts.drain_cycles), e.str()});
    }
    write_csv(out, t);
    if (!c.csv.empty()) save_csv(c.csv, t);
    return exit_ok;
}

int cmd_simulate(const Common& c, const SimArgs& s, std::ostream& out) {
    const auto cfg = require_config(c);
    if (s.efficiency_sweep) return cmd_efficiency_sweep(c, cfg, s, out);
    const auto problem = c.problem_size();
    if (!problem) throw ConfigError("--problem is required for simulate");
    const auto& p = *problem;
    const auto fmt = ElementFormat::of(*c.dt);
    fmt.validate();

    MatrixBuffer a = s.a_path.empty() ? MatrixBuffer::random(fmt, p.m, p.k, c.seed) : MatrixBuffer::load(s.a_path);
    MatrixBuffer b =
        s.b_path.empty() ? MatrixBuffer::random(fmt, p.k, p.n, c.seed + 1) : MatrixBuffer::load(s.b_path);

    const bool chain_shape = cfg.x_c == 1 && cfg.y_p == 1 && cfg.x_t * cfg.y_t >= cfg.processing_elements();
    bool run_schedule = true, run_chain = chain_shape;
    if (s.engine == "schedule") {
        run_chain = false;
    } else if (s.engine == "chain") {
        run_schedule = false;
        run_chain = true;
    } else if (s.engine != "auto") {
        throw ConfigError("--engine expects auto, schedule or chain");
    }

    SimOptions opt;
    opt.pad = c.pad;
    opt.record_log = !c.csv.empty();
    const auto reference = reference_mmm(a, b);
    const auto q = io_volume(p, cfg.x_tot(), cfg.y_tot());

    bool ok = true;
    std::optional<SimResult> first;
    auto report = [&](const char* name, const SimResult& r) {
        out << "engine " << name << ":\n";
        out << "  loads A " << r.io.loads_a << ", loads B " << r.io.loads_b << ", stores C " << r.io.stores_c;
        if (r.io.padding_overhead() > 0) out << ", padding transfers " << r.io.padding_overhead();
        out << '\n';
        const auto moved = r.io.total() + r.io.padded_loads_a + r.io.padded_loads_b;
        const bool io_ok = moved == q && r.io.stores_c == p.m * p.n;
        out << "  transfers: " << moved << " (analytic: " << q << ") " << (io_ok ? "OK" : "MISMATCH") << '\n';
        out << "  cycles: compute " << r.compute_cycles << ", drain " << r.drain_cycles << ", stall "
            << r.stall_cycles << ", efficiency " << fixed(r.drain_efficiency(), 4) << '\n';
        out << "  pipeline: " << (r.pipeline_safe ? "safe" : "UNSAFE (accumulation collisions)") << '\n';
        const auto cmp = compare(r.c, reference);
        bool out_ok = cmp.equal_bits;
        if (fmt.kind == ArithmeticKind::exact_integer) {
            out << "  oracle: " << (cmp.equal_bits ? "bit-exact OK" : "MISMATCH") << '\n';
        } else {
            const auto tol = float_tolerance(fmt, p.k);
            out_ok = cmp.max_relative_error <= tol;
            out << "  oracle: max relative error " << cmp.max_relative_error << " (tolerance " << tol << ") "
                << (out_ok ? "OK" : "MISMATCH") << '\n';
        }
        ok = ok && io_ok && out_ok;
    };

    if (run_schedule) {
        first = simulate_schedule(p, cfg, *c.dt, a, b, opt);
        report("schedule", *first);
    }
    if (run_chain) {
        auto r = simulate_pe_chain(p, cfg, *c.dt, a, b, opt);
        report("chain", r);
        if (first) {
            const bool same = r.c == first->c && r.io == first->io;
            out << "chain vs schedule: " << (same ? "identical OK" : "DIFFER") << '\n';
            ok = ok && same;
        } else {
            first = std::move(r);
        }
    }

    if (!s.save_c.empty()) first->c.save(s.save_c);
    if (!c.csv.empty()) {
        CsvTable t;
        t.header = {"operand", "tile_row", "tile_col", "k", "row", "col"};
        for (const auto& rec : first->io.log) {
            t.rows.push_back({to_string(rec.operand), std::to_string(rec.tile_row), std::to_string(rec.tile_col),
                              std::to_string(rec.k), std::to_string(rec.row), std::to_string(rec.col)});
        }
        maybe_save(c, t, out);
    }
    if (!ok) throw VerificationFailure("simulation check failed");
    return exit_ok;
}

struct LayoutArgs {
    bool no_transpose = false;
    std::uint64_t vector_width = 8;
    std::uint64_t fifo_depth = 0;
    std::string out_path;
};

int cmd_layout(const Common& c, const BoundsArgs& b, const LayoutArgs& la, std::ostream& out) {
    TileConfig cfg;
    if (c.config.empty()) {
        cfg = select_parameters(c.spec.hardware, *c.dt, c.problem_size(), b.make(c)).design.cfg;
    } else {
        cfg = parse_tile_config(c.config);
    }
    LayoutOptions opt;
    opt.transpose_a = !la.no_transpose;
    opt.layout = c.chosen_layout();
    opt.vector_width = la.vector_width;
    opt.fifo_depth = la.fifo_depth;
    opt.hardware = &c.spec.hardware;
    const auto g = build_layout(cfg, *c.dt, opt);
    const auto text = export_graph(g);
    out << text;
    if (!la.out_path.empty()) {
        std::ofstream os(la.out_path);
        if (!os) throw Error("cannot open " + la.out_path + " for writing");
        os << text;
    }
    const auto report = verify_structure(g, cfg, c.spec.hardware.max_bus_width_bits);
    for (const auto& chk : report.checks) {
        out << "# " << (chk.satisfied ? "PASS " : "FAIL ") << chk.name << ": " << chk.detail << '\n';
    }
    if (!c.csv.empty()) {
        CsvTable t;
        t.header = {"src", "dst", "channel", "width_bits", "depth_words"};
        for (const auto& e : g.edges) {
            t.rows.push_back({g.nodes[e.src].id, g.nodes[e.dst].id, to_string(e.channel),
                              std::to_string(e.width_bits), std::to_string(e.depth_words)});
        }
        maybe_save(c, t, out);
    }
    if (!report.ok()) throw VerificationFailure("structural check failed");
    return exit_ok;
}

}  // namespace

TileConfig parse_tile_config(const std::string& text) {
    TileConfig cfg;
    const auto parts = split(text, ',');
    const bool named = text.find('=') != std::string::npos;
    std::uint64_t* fields[] = {&cfg.x_c, &cfg.y_c, &cfg.x_p, &cfg.y_p, &cfg.x_t, &cfg.y_t, &cfg.x_b, &cfg.y_b};
    const char* names[] = {"x_c", "y_c", "x_p", "y_p", "x_t", "y_t", "x_b", "y_b"};
    if (!named) {
        if (parts.size() != 8) {
            throw ConfigError("--config expects 8 comma-separated extents x_c,y_c,x_p,y_p,x_t,y_t,x_b,y_b");
        }
        for (std::size_t i = 0; i < 8; ++i) *fields[i] = parse_count(parts[i], names[i]);
    } else {
        for (const auto& part : parts) {
            const auto eq = part.find('=');
            if (eq == std::string::npos) throw ConfigError("--config: expected key=value, got '" + part + "'");
            const auto key = part.substr(0, eq);
            const auto it = std::find(std::begin(names), std::end(names), key);
            if (it == std::end(names)) throw ConfigError("--config: unknown extent '" + key + "'");
            *fields[it - std::begin(names)] = parse_count(part.substr(eq + 1), key);
        }
    }
    cfg.validate();
    return cfg;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Design-space exploration and schedule simulation for tiled matrix multiplication", "mmmdse"};
    app.require_subcommand(1);

    Common common;
    BoundsArgs bounds;
    bool explain = false;
    std::size_t top = 20;
    bool all_shapes = false;
    std::string range;
    SimArgs sim;
    LayoutArgs lay;

    auto* analyze = app.add_subcommand("analyze", "derived metrics and feasibility of one configuration");
    add_common(analyze, common, true);

    auto* optimize = app.add_subcommand("optimize", "greedy parameter selection");
    add_common(optimize, common, false);
    add_bounds(optimize, bounds);
    optimize->add_flag("--explain", explain, "print the binding constraint of every step");

    auto* sweep_cmd = app.add_subcommand("sweep", "exhaustive ranked enumeration");
    add_common(sweep_cmd, common, false);
    add_bounds(sweep_cmd, bounds);
    sweep_cmd->add_option("--top", top, "rows to print")->capture_default_str();
    sweep_cmd->add_flag("--all-shapes", all_shapes, "enumerate every memory-tile factorization");

    auto* memory = app.add_subcommand("sweep-memory", "block utilization and intensity versus memory-tile size");
    add_common(memory, common, true);
    memory->add_option("--range", range, "memory-tile elements start:stop[:step]");

    auto* simulate = app.add_subcommand("simulate", "run the tiled schedule and check it against the oracle");
    add_common(simulate, common, true);
    simulate->add_option("--engine", sim.engine, "auto, schedule or chain")->capture_default_str();
    simulate->add_option("--a", sim.a_path, "matrix file for A (default: generated from --seed)");
    simulate->add_option("--b", sim.b_path, "matrix file for B (default: generated from --seed + 1)");
    simulate->add_option("--save-c", sim.save_c, "write the computed C");
    simulate->add_flag("--efficiency-sweep", sim.efficiency_sweep, "drain efficiency versus matrix size (CSV)");
    simulate->add_option("--sizes", sim.sizes, "matrix sizes for --efficiency-sweep");

    auto* layout = app.add_subcommand("layout", "module graph and structural checks");
    add_common(layout, common, true);
    add_bounds(layout, bounds);
    layout->add_flag("--no-transpose", lay.no_transpose, "omit the transpose module");
    layout->add_option("--vector-width", lay.vector_width, "A reader width in elements")->capture_default_str();
    layout->add_option("--fifo-depth", lay.fifo_depth, "transpose FIFO depth (default x_tot)");
    layout->add_option("--out", lay.out_path, "write the graph text to a file");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    }

    try {
        common.load();
        if (analyze->parsed()) return cmd_analyze(common, out);
        if (optimize->parsed()) return cmd_optimize(common, bounds, explain, out);
        if (sweep_cmd->parsed()) return cmd_sweep(common, bounds, top, all_shapes, out);
        if (memory->parsed()) return cmd_sweep_memory(common, range, out);
        if (simulate->parsed()) return cmd_simulate(common, sim, out);
        if (layout->parsed()) return cmd_layout(common, bounds, lay, out);
        return exit_usage;
    } catch (const VerificationFailure& e) {
        err << "verification failed: " << e.what() << '\n';
        return exit_verification;
    } catch (const InfeasibleError& e) {
        const std::string what = e.what();
        err << (what.rfind("infeasible", 0) == 0 ? "" : "infeasible: ") << what << '\n';
        return exit_infeasible;
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << '\n';
        return exit_usage;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const DimensionError& e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_other;
    }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args, out, err);
}

}  // namespace mmmdse::cli
