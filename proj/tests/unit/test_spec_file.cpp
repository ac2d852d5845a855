#include "mmmdse/errors.hpp"
#include "mmmdse/spec_file.hpp"

#include <doctest.h>

#include <string>

using namespace mmmdse;

namespace {

const std::string kMinimal = R"(# comment
[hardware]
name = t            ; trailing comment
resources = DSP:4
memory_blocks = 4
block_capacity_bits = 36864
port_widths_bits = 9, 18, 36, 72
max_bus_width_bits = 64
frequency_hz = 1e8

[datatype i32]
width_bits = 32
kind = int
cost_per_unit = DSP:1
overhead_per_pe = DSP:0
accumulation_latency = 1
)";

std::size_t error_line(const std::string& text) {
    try {
        parse_spec_text(text);
    } catch (const ParseError& e) {
        return e.line();
    }
    return 0;
}

std::string replace(std::string s, const std::string& from, const std::string& to) {
    s.replace(s.find(from), from.size(), to);
    return s;
}

}  // namespace

TEST_CASE("shipped vu9p spec") {
    const auto spec = load_spec(std::string(MMMDSE_SOURCE_DIR) + "/specs/vu9p.ini");
    CHECK(spec.hardware.resources_max.amount("LUT") == 1033608);
    CHECK(spec.hardware.resources_max.amount("FF") == 2174048);
    CHECK(spec.hardware.resources_max.amount("DSP") == 6834);
    CHECK(spec.hardware.memory_blocks_max == 1906);
    CHECK(spec.datatype_names() == std::vector<std::string>{"fp16", "fp32", "fp64", "uint8", "uint16", "uint32"});
    CHECK(spec.datatype("uint8").port_width_override_bits == 36u);
    CHECK(spec.datatype("fp32").arithmetic_kind == ArithmeticKind::floating_point);
    CHECK(spec.default_layout == Layout::chain_1d);
}

TEST_CASE("minimal spec") {
    const auto spec = parse_spec_text(kMinimal);
    CHECK(spec.hardware.name == "t");
    CHECK(spec.frequency_hz() == doctest::Approx(1e8));
    CHECK(spec.datatype("i32").width_bits == 32);
    try {
        spec.datatype("fp99");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("available: i32") != std::string::npos);
    }
}

TEST_CASE("strict schema with line diagnostics") {
    CHECK(error_line(replace(kMinimal, "max_bus_width_bits = 64", "max_bus_width = 64")) == 8);
    CHECK(error_line(replace(kMinimal, "memory_blocks = 4", "memory_blocks = four")) == 5);
    CHECK(error_line(replace(kMinimal, "kind = int", "kind = fixed")) == 13);
    CHECK(error_line(replace(kMinimal, "[datatype i32]", "[types]")) == 11);
    CHECK(error_line(replace(kMinimal, "width_bits = 32", "width_bits = 32\nwidth_bits = 16")) == 13);
    CHECK(error_line(replace(kMinimal, "width_bits = 32\n", "")) == 11);  // missing key: section line
    CHECK(error_line(replace(kMinimal, "overhead_per_pe = DSP:0", "overhead_per_pe = LUT:0")) == 11);
    CHECK(error_line(replace(kMinimal, "resources = DSP:4", "resources = DSP:4, DSP:2")) == 4);
    CHECK_THROWS_AS(parse_spec_text("[hardware]\nname = x\n"), ParseError);
    CHECK_THROWS_AS(load_spec("/nonexistent/spec.ini"), ConfigError);
}

TEST_CASE("defaults section") {
    const auto spec = parse_spec_text(kMinimal + "\n[defaults]\nlayout = 2d\nfrequency_hz = 145.7e6\n");
    CHECK(spec.default_layout == Layout::grid_2d);
    CHECK(spec.frequency_hz() == doctest::Approx(145.7e6));
    CHECK_THROWS_AS(parse_spec_text(kMinimal + "\n[defaults]\nlayout = 3d\n"), ParseError);
}
