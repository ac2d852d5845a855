#include "mmmdse/analytic_models.hpp"
#include "mmmdse/arch_layout.hpp"
#include "mmmdse/cli.hpp"
#include "mmmdse/errors.hpp"
#include "mmmdse/hardware_model.hpp"
#include "mmmdse/matrix.hpp"
#include "mmmdse/schedule_sim.hpp"
#include "mmmdse/spec_file.hpp"
#include "mmmdse/tiler.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

namespace py = pybind11;
using namespace mmmdse;

namespace {

py::tuple ratio(const Ratio& r) { return py::make_tuple(r.num(), r.den()); }

py::dict outcome_list(const std::vector<ConstraintOutcome>& outcomes) {
    py::dict d;
    for (const auto& o : outcomes) d[py::str(o.name)] = py::make_tuple(o.satisfied, o.detail);
    return d;
}

py::dict design_dict(const DesignPoint& d) {
    py::dict out;
    out["config"] = d.cfg;
    out["layout"] = to_string(d.layout);
    out["compute_units"] = d.compute_units;
    out["processing_elements"] = d.processing_elements;
    out["port_width_bits"] = d.port_width_bits;
    out["words_per_block"] = d.words_per_block;
    out["min_blocks"] = d.min_blocks;
    out["usable_blocks"] = d.usable_blocks;
    out["used_blocks"] = d.used_blocks;
    out["capacity_words"] = d.capacity_words;
    out["x_tot"] = d.x_tot;
    out["y_tot"] = d.y_tot;
    out["computational_intensity"] = ratio(d.computational_intensity);
    out["arithmetic_intensity"] = d.arithmetic_intensity.value();
    out["peak_ops_per_cycle"] = d.peak_ops_per_cycle;
    out["collision_distance"] = d.collision_distance;
    out["pipeline_safe"] = d.pipeline_safe;
    out["io_volume"] = d.io_volume;
    out["drain_efficiency"] = d.drain_efficiency;
    out["execution_time_s"] = d.execution_time_s;
    out["feasible"] = d.feasible();
    out["constraints"] = outcome_list(d.feasibility.outcomes);
    return out;
}

std::vector<std::vector<double>> to_rows(const MatrixBuffer& m) {
    std::vector<std::vector<double>> rows(m.rows(), std::vector<double>(m.cols()));
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t c = 0; c < m.cols(); ++c) rows[r][c] = m.value(r, c);
    }
    return rows;
}

// Runs one engine on generated operands and reports counters plus the oracle comparison.
py::dict simulate(const DataTypeSpec& dt, const TileConfig& cfg, const ProblemSize& p, std::uint64_t seed,
                  const std::string& engine, bool pad, bool return_c) {
    const auto f = ElementFormat::of(dt);
    const auto a = MatrixBuffer::random(f, p.m, p.k, seed);
    const auto b = MatrixBuffer::random(f, p.k, p.n, seed + 1);
    const SimOptions opts{pad, false};
    SimResult r;
    if (engine == "schedule") {
        r = simulate_schedule(p, cfg, dt, a, b, opts);
    } else if (engine == "chain") {
        r = simulate_pe_chain(p, cfg, dt, a, b, opts);
    } else {
        throw ConfigError("engine must be 'schedule' or 'chain'");
    }
    const auto cmp = compare(r.c, reference_mmm(a, b));
    py::dict out;
    out["loads_a"] = r.io.loads_a;
    out["loads_b"] = r.io.loads_b;
    out["stores_c"] = r.io.stores_c;
    out["transfers"] = r.io.total();
    out["padding_transfers"] = r.io.padding_overhead();
    out["compute_cycles"] = r.compute_cycles;
    out["drain_cycles"] = r.drain_cycles;
    out["stall_cycles"] = r.stall_cycles;
    out["drain_efficiency"] = r.drain_efficiency();
    out["pipeline_safe"] = r.pipeline_safe;
    out["bit_exact"] = cmp.equal_bits;
    out["max_relative_error"] = cmp.max_relative_error;
    if (return_c) out["c"] = to_rows(r.c);
    return out;
}

py::dict layout(const DataTypeSpec& dt, const TileConfig& cfg, const std::string& layout_name, bool transpose_a,
                std::uint64_t vector_width, std::uint64_t max_bus_width_bits) {
    LayoutOptions opts;
    opts.layout = parse_layout(layout_name);
    opts.transpose_a = transpose_a;
    opts.vector_width = vector_width;
    const auto g = build_layout(cfg, dt, opts);
    const auto s = verify_structure(g, cfg, max_bus_width_bits);
    py::dict out;
    out["graph"] = export_graph(g);
    out["node_count"] = s.node_count;
    out["compute_connections"] = s.compute_connections;
    out["registers"] = s.registers;
    out["max_fanout"] = s.max_fanout;
    out["max_pe_buses"] = s.max_pe_buses;
    out["max_bus_width_bits"] = s.max_bus_width_bits;
    out["ok"] = s.ok();
    out["checks"] = outcome_list(s.checks);
    return out;
}

py::tuple run_cli(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return py::make_tuple(code, out.str(), err.str());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Tiling analysis, parameter search and schedule simulation for matrix multiplication accelerators";

    auto error = py::register_exception<Error>(m, "Error");
    py::register_exception<ConfigError>(m, "ConfigError", error);
    py::register_exception<InfeasibleError>(m, "InfeasibleError", error);
    py::register_exception<DimensionError>(m, "DimensionError", error);
    py::register_exception<ParseError>(m, "ParseError", error);

    py::class_<TileConfig>(m, "TileConfig")
        .def(py::init([](std::uint64_t x_c, std::uint64_t y_c, std::uint64_t x_p, std::uint64_t y_p, std::uint64_t x_t,
                         std::uint64_t y_t, std::uint64_t x_b, std::uint64_t y_b) {
                 return TileConfig{x_c, y_c, x_p, y_p, x_t, y_t, x_b, y_b};
             }),
             py::arg("x_c") = 1, py::arg("y_c") = 1, py::arg("x_p") = 1, py::arg("y_p") = 1, py::arg("x_t") = 1,
             py::arg("y_t") = 1, py::arg("x_b") = 1, py::arg("y_b") = 1)
        .def_readwrite("x_c", &TileConfig::x_c)
        .def_readwrite("y_c", &TileConfig::y_c)
        .def_readwrite("x_p", &TileConfig::x_p)
        .def_readwrite("y_p", &TileConfig::y_p)
        .def_readwrite("x_t", &TileConfig::x_t)
        .def_readwrite("y_t", &TileConfig::y_t)
        .def_readwrite("x_b", &TileConfig::x_b)
        .def_readwrite("y_b", &TileConfig::y_b)
        .def_property_readonly("x_tot", &TileConfig::x_tot)
        .def_property_readonly("y_tot", &TileConfig::y_tot)
        .def_property_readonly("compute_units", &TileConfig::compute_units)
        .def_property_readonly("processing_elements", &TileConfig::processing_elements)
        .def("__eq__", [](const TileConfig& a, const TileConfig& b) { return a == b; })
        .def("__repr__", [](const TileConfig& c) {
            std::ostringstream os;
            os << "TileConfig(" << c.x_c << ", " << c.y_c << ", " << c.x_p << ", " << c.y_p << ", " << c.x_t << ", "
               << c.y_t << ", " << c.x_b << ", " << c.y_b << ")";
            return os.str();
        });
    m.def("parse_config", &cli::parse_tile_config, py::arg("text"));

    py::class_<ProblemSize>(m, "ProblemSize")
        .def(py::init([](std::uint64_t mm, std::uint64_t n, std::uint64_t k) { return ProblemSize{mm, n, k}; }),
             py::arg("m"), py::arg("n"), py::arg("k"))
        .def_readwrite("m", &ProblemSize::m)
        .def_readwrite("n", &ProblemSize::n)
        .def_readwrite("k", &ProblemSize::k);

    py::class_<HardwareSpec>(m, "HardwareSpec")
        .def_readonly("name", &HardwareSpec::name)
        .def_readonly("memory_blocks_max", &HardwareSpec::memory_blocks_max)
        .def_readonly("block_capacity_bits", &HardwareSpec::block_capacity_bits)
        .def_readonly("supported_port_widths_bits", &HardwareSpec::supported_port_widths_bits)
        .def_readonly("max_bus_width_bits", &HardwareSpec::max_bus_width_bits)
        .def_readonly("target_frequency_hz", &HardwareSpec::target_frequency_hz)
        .def_property_readonly("resources_max", [](const HardwareSpec& h) { return h.resources_max.entries(); });

    py::class_<DataTypeSpec>(m, "DataTypeSpec")
        .def_readonly("name", &DataTypeSpec::name)
        .def_readonly("width_bits", &DataTypeSpec::width_bits)
        .def_readonly("accumulation_latency_cycles", &DataTypeSpec::accumulation_latency_cycles)
        .def_property_readonly("is_float",
                               [](const DataTypeSpec& d) { return d.arithmetic_kind == ArithmeticKind::floating_point; })
        .def_property_readonly("cost_per_compute_unit",
                               [](const DataTypeSpec& d) { return d.cost_per_compute_unit.entries(); })
        .def_property_readonly("overhead_per_pe", [](const DataTypeSpec& d) { return d.overhead_per_pe.entries(); });

    py::class_<SpecFile>(m, "SpecFile")
        .def_readonly("hardware", &SpecFile::hardware)
        .def("datatype", &SpecFile::datatype, py::arg("name"), py::return_value_policy::reference_internal)
        .def("datatype_names", &SpecFile::datatype_names)
        .def("frequency_hz", &SpecFile::frequency_hz);
    m.def("load_spec", &load_spec, py::arg("path"));
    m.def("parse_spec_text", &parse_spec_text, py::arg("text"));

    m.def("max_compute_units", &max_compute_units, py::arg("hardware"), py::arg("dtype"));
    m.def("min_memory_blocks", &min_memory_blocks, py::arg("config"), py::arg("hardware"), py::arg("dtype"));
    m.def("usable_memory_blocks", &usable_memory_blocks, py::arg("config"), py::arg("hardware"), py::arg("dtype"));

    m.def("io_volume", &io_volume, py::arg("problem"), py::arg("x_tot"), py::arg("y_tot"));
    m.def(
        "computational_intensity", [](std::uint64_t x, std::uint64_t y) { return ratio(computational_intensity(x, y)); },
        py::arg("x_tot"), py::arg("y_tot"), "Exact (numerator, denominator).");
    m.def(
        "arithmetic_intensity",
        [](std::uint64_t x, std::uint64_t y, std::uint64_t w) { return arithmetic_intensity(x, y, w).value(); },
        py::arg("x_tot"), py::arg("y_tot"), py::arg("width_bits"));
    m.def(
        "optimal_square_tile",
        [](std::uint64_t s) {
            const auto t = optimal_square_tile(s);
            return py::make_tuple(t.x_tot, t.y_tot);
        },
        py::arg("capacity_words"));
    m.def("drain_efficiency", &drain_efficiency, py::arg("problem"), py::arg("config"));
    m.def("collision_distance", &collision_distance, py::arg("config"));
    m.def("average_bandwidth", &average_bandwidth, py::arg("problem"), py::arg("x_tot"), py::arg("y_tot"),
          py::arg("width_bits"), py::arg("ops_per_second"));

    m.def(
        "evaluate_design",
        [](const HardwareSpec& hw, const DataTypeSpec& dt, const TileConfig& cfg, const std::string& lay,
           const std::optional<ProblemSize>& p, std::optional<double> f) {
            return design_dict(evaluate_design(hw, dt, cfg, parse_layout(lay), p, f));
        },
        py::arg("hardware"), py::arg("dtype"), py::arg("config"), py::arg("layout") = "1d",
        py::arg("problem") = py::none(), py::arg("frequency_hz") = py::none());
    m.def(
        "optimize",
        [](const HardwareSpec& hw, const DataTypeSpec& dt, const std::optional<ProblemSize>& p,
           std::optional<std::uint64_t> max_y_c, std::optional<std::uint64_t> max_x_p) {
            SearchBounds b;
            b.max_y_c = max_y_c;
            b.max_x_p = max_x_p;
            const auto sel = select_parameters(hw, dt, p, b);
            auto out = design_dict(sel.design);
            py::list steps;
            for (const auto& s : sel.steps) steps.append(py::make_tuple(s.title, s.detail));
            out["steps"] = steps;
            return out;
        },
        py::arg("hardware"), py::arg("dtype"), py::arg("problem") = py::none(), py::arg("max_y_c") = py::none(),
        py::arg("max_x_p") = py::none());
    m.def(
        "sweep",
        [](const HardwareSpec& hw, const DataTypeSpec& dt, const std::optional<ProblemSize>& p,
           std::optional<std::uint64_t> max_y_c, std::optional<std::uint64_t> max_x_p, std::size_t top) {
            SearchBounds b;
            b.max_y_c = max_y_c;
            b.max_x_p = max_x_p;
            const auto ranked = sweep(hw, dt, p, b);
            py::list out;
            for (std::size_t i = 0; i < ranked.size() && (top == 0 || i < top); ++i) out.append(design_dict(ranked[i]));
            return out;
        },
        py::arg("hardware"), py::arg("dtype"), py::arg("problem") = py::none(), py::arg("max_y_c") = py::none(),
        py::arg("max_x_p") = py::none(), py::arg("top") = 0);

    m.def("simulate", &simulate, py::arg("dtype"), py::arg("config"), py::arg("problem"), py::arg("seed") = 1,
          py::arg("engine") = "schedule", py::arg("pad") = false, py::arg("return_c") = false);
    m.def("layout", &layout, py::arg("dtype"), py::arg("config"), py::arg("layout") = "1d",
          py::arg("transpose_a") = true, py::arg("vector_width") = 8, py::arg("max_bus_width_bits") = 512);
    m.def("run_cli", &run_cli, py::arg("args"), "Runs the command-line tool in-process: (exit_code, stdout, stderr).");
}
