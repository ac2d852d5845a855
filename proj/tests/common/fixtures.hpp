#pragma once

// Targets and data types built in code, independent of the shipped spec files.

#include "mmmdse/hardware_model.hpp"

#include <string>
#include <vector>

namespace fixtures {

inline mmmdse::HardwareSpec vu9p() {
    mmmdse::HardwareSpec hw;
    hw.name = "vu9p";
    hw.resources_max = {{"LUT", 1033608}, {"FF", 2174048}, {"DSP", 6834}};
    hw.memory_blocks_max = 1906;
    hw.block_capacity_bits = 36864;
    hw.supported_port_widths_bits = {9, 18, 36, 72};
    hw.max_bus_width_bits = 512;
    hw.target_frequency_hz = 200e6;
    return hw;
}

inline mmmdse::DataTypeSpec dtype(const std::string& name, std::uint64_t width, bool is_float, std::uint64_t lut,
                                  std::uint64_t ff, std::uint64_t dsp, std::uint64_t latency = 1) {
    mmmdse::DataTypeSpec dt;
    dt.name = name;
    dt.width_bits = width;
    dt.arithmetic_kind = is_float ? mmmdse::ArithmeticKind::floating_point : mmmdse::ArithmeticKind::exact_integer;
    dt.cost_per_compute_unit = {{"LUT", lut}, {"FF", ff}, {"DSP", dsp}};
    dt.overhead_per_pe = {{"LUT", 200}, {"FF", 400}, {"DSP", 0}};
    dt.accumulation_latency_cycles = latency;
    return dt;
}

inline mmmdse::DataTypeSpec fp32() { return dtype("fp32", 32, true, 520, 600, 2, 8); }

// Minimal single-resource target used for brute-force searches.
inline mmmdse::HardwareSpec toy() {
    mmmdse::HardwareSpec hw;
    hw.name = "toy";
    hw.resources_max = {{"DSP", 4}};
    hw.memory_blocks_max = 4;
    hw.block_capacity_bits = 36864;
    hw.supported_port_widths_bits = {9, 18, 36, 72};
    hw.max_bus_width_bits = 64;
    hw.target_frequency_hz = 100e6;
    return hw;
}

inline mmmdse::DataTypeSpec toy_int32() {
    mmmdse::DataTypeSpec dt;
    dt.name = "int32";
    dt.width_bits = 32;
    dt.cost_per_compute_unit = {{"DSP", 1}};
    dt.overhead_per_pe = {{"DSP", 0}};
    return dt;
}

// Known large designs: type, w_c, x_p, y_c, x_tot, y_tot, rounded op/B,
// plus one factorization of the memory tile into the tiling levels.
struct KnownDesign {
    const char* type;
    std::uint64_t width;
    std::uint64_t x_p, y_c, x_tot, y_tot;
    double rounded_intensity;
    mmmdse::TileConfig cfg;
};

inline std::vector<KnownDesign> known_designs() {
    return {
        {"fp16", 16, 112, 16, 1904, 1920, 956, {1, 16, 112, 1, 17, 120, 1, 1}},
        {"fp32", 32, 192, 8, 960, 1632, 302, {1, 8, 192, 1, 5, 204, 1, 1}},
        {"fp64", 64, 96, 4, 864, 864, 108, {1, 4, 96, 1, 9, 54, 1, 4}},
        {"uint8", 8, 132, 32, 1980, 2176, 2073, {1, 32, 132, 1, 15, 68, 1, 1}},
        {"uint16", 16, 210, 16, 1680, 2048, 923, {1, 16, 210, 1, 8, 128, 1, 1}},
        {"uint32", 32, 202, 8, 1212, 1360, 320, {1, 8, 202, 1, 6, 170, 1, 1}},
    };
}

}  // namespace fixtures
