#pragma once

/**
 * @file spec_file.hpp
 * @brief Strict sectioned key/value spec files describing a target and its data types.
 *
 *   # comment (also ';')
 *   [hardware]
 *   name = vu9p
 *   resources = LUT:1033608, FF:2174048, DSP:6834
 *   memory_blocks = 1906
 *   block_capacity_bits = 36864
 *   port_widths_bits = 9, 18, 36, 72
 *   max_bus_width_bits = 512
 *   frequency_hz = 200e6
 *
 *   [defaults]              optional
 *   frequency_hz = 145.7e6
 *   layout = 1d
 *
 *   [datatype fp32]         one section per type
 *   width_bits = 32
 *   kind = float            float | int
 *   cost_per_unit = LUT:520, FF:600, DSP:2
 *   overhead_per_pe = LUT:200, FF:400, DSP:0
 *   accumulation_latency = 8
 *   port_width_bits = 36    optional override of the block port mode
 *
 * Unknown sections or keys, duplicates and missing required keys are errors
 * reported with their line number.
 */

#include "mmmdse/hardware_model.hpp"

#include <filesystem>
#include <istream>
#include <optional>
#include <string>
#include <vector>

namespace mmmdse {

struct SpecFile {
    HardwareSpec hardware;
    std::vector<DataTypeSpec> datatypes;
    std::optional<double> default_frequency_hz;
    Layout default_layout = Layout::chain_1d;

    /// Throws ConfigError listing the available names when `name` is unknown.
    const DataTypeSpec& datatype(const std::string& name) const;
    std::vector<std::string> datatype_names() const;
    /// Frequency from [defaults], falling back to the hardware target.
    double frequency_hz() const { return default_frequency_hz.value_or(hardware.target_frequency_hz); }
};

/// Throws ParseError (with line) for syntax and schema errors, ConfigError for
/// values that parse but break an invariant.
SpecFile parse_spec(std::istream& in);
SpecFile parse_spec_text(const std::string& text);
SpecFile load_spec(const std::filesystem::path& path);

}  // namespace mmmdse
