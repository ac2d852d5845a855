#include "mmmdse/spec_file.hpp"

#include "mmmdse/errors.hpp"

#include <algorithm>
#include <charconv>
#include <deque>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace mmmdse {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream is(s);
    while (std::getline(is, item, ',')) out.push_back(trim(item));
    return out;
}

struct Value {
    std::string text;
    std::size_t line = 0;
};

std::uint64_t to_uint(const Value& v, const std::string& key) {
    std::uint64_t out = 0;
    const auto* first = v.text.data();
    const auto* last = first + v.text.size();
    const auto [ptr, ec] = std::from_chars(first, last, out);
    if (v.text.empty() || ec != std::errc{} || ptr != last) {
        throw ParseError(key + ": expected a non-negative integer, got '" + v.text + "'", v.line);
    }
    return out;
}

double to_double(const Value& v, const std::string& key) {
    double out = 0.0;
    const auto* first = v.text.data();
    const auto* last = first + v.text.size();
    const auto [ptr, ec] = std::from_chars(first, last, out);
    if (v.text.empty() || ec != std::errc{} || ptr != last || !(out > 0.0)) {
        throw ParseError(key + ": expected a positive number, got '" + v.text + "'", v.line);
    }
    return out;
}

ResourceVector to_resources(const Value& v, const std::string& key) {
    std::vector<ResourceVector::Entry> entries;
    for (const auto& item : split_list(v.text)) {
        const auto colon = item.find(':');
        if (colon == std::string::npos) {
            throw ParseError(key + ": expected KIND:amount entries, got '" + item + "'", v.line);
        }
        const auto kind = trim(item.substr(0, colon));
        const auto amount = to_uint({trim(item.substr(colon + 1)), v.line}, key);
        if (kind.empty()) throw ParseError(key + ": empty resource kind", v.line);
        entries.emplace_back(kind, amount);
    }
    try {
        return ResourceVector(std::move(entries));
    } catch (const ConfigError& e) {
        throw ParseError(key + ": " + e.what(), v.line);
    }
}

class Section {
public:
    Section(std::string name, std::size_t line) : name_(std::move(name)), line_(line) {}

    void set(const std::string& key, Value v, const std::set<std::string>& allowed) {
        if (!allowed.count(key)) throw ParseError("unknown key '" + key + "' in [" + name_ + "]", v.line);
        if (values_.count(key)) throw ParseError("duplicate key '" + key + "' in [" + name_ + "]", v.line);
        values_.emplace(key, std::move(v));
    }

    const Value& need(const std::string& key) const {
        const auto it = values_.find(key);
        if (it == values_.end()) throw ParseError("[" + name_ + "] is missing '" + key + "'", line_);
        return it->second;
    }

    const Value* get(const std::string& key) const {
        const auto it = values_.find(key);
        return it == values_.end() ? nullptr : &it->second;
    }

    std::size_t line() const { return line_; }

private:
    std::string name_;
    std::size_t line_;
    std::map<std::string, Value> values_;
};

const std::set<std::string> kHardwareKeys = {"name", "resources", "memory_blocks", "block_capacity_bits",
                                             "port_widths_bits", "max_bus_width_bits", "frequency_hz"};
const std::set<std::string> kDefaultsKeys = {"frequency_hz", "layout"};
const std::set<std::string> kDatatypeKeys = {"width_bits", "kind", "cost_per_unit", "overhead_per_pe",
                                             "accumulation_latency", "port_width_bits"};

}  // namespace

const DataTypeSpec& SpecFile::datatype(const std::string& name) const {
    for (const auto& dt : datatypes) {
        if (dt.name == name) return dt;
    }
    std::string list;
    for (const auto& n : datatype_names()) list += (list.empty() ? "" : ", ") + n;
    throw ConfigError("unknown data type '" + name + "'; available: " + list);
}

std::vector<std::string> SpecFile::datatype_names() const {
    std::vector<std::string> out;
    for (const auto& dt : datatypes) out.push_back(dt.name);
    return out;
}

SpecFile parse_spec(std::istream& in) {
    std::optional<Section> hardware;
    std::optional<Section> defaults;
    std::deque<std::pair<std::string, Section>> types;  // stable addresses for `current`
    Section* current = nullptr;
    const std::set<std::string>* allowed = nullptr;

    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto comment = raw.find_first_of("#;");
        const auto line = trim(comment == std::string::npos ? raw : raw.substr(0, comment));
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']') throw ParseError("unterminated section header", line_no);
            std::istringstream words(line.substr(1, line.size() - 2));
            std::string kind, name, extra;
            words >> kind >> name >> extra;
            if (!extra.empty()) throw ParseError("malformed section header '" + line + "'", line_no);
            if (kind == "hardware" && name.empty()) {
                if (hardware) throw ParseError("duplicate [hardware] section", line_no);
                current = &hardware.emplace("hardware", line_no);
                allowed = &kHardwareKeys;
            } else if (kind == "defaults" && name.empty()) {
                if (defaults) throw ParseError("duplicate [defaults] section", line_no);
                current = &defaults.emplace("defaults", line_no);
                allowed = &kDefaultsKeys;
            } else if (kind == "datatype" && !name.empty()) {
                const bool dup = std::any_of(types.begin(), types.end(), [&](const auto& t) { return t.first == name; });
                if (dup) throw ParseError("duplicate data type '" + name + "'", line_no);
                types.emplace_back(name, Section("datatype " + name, line_no));
                current = &types.back().second;
                allowed = &kDatatypeKeys;
            } else {
                throw ParseError("unknown section '" + line + "'", line_no);
            }
            continue;
        }

        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ParseError("expected 'key = value'", line_no);
        if (current == nullptr) throw ParseError("key outside of any section", line_no);
        const auto key = trim(line.substr(0, eq));
        auto value = trim(line.substr(eq + 1));
        if (key.empty()) throw ParseError("empty key", line_no);
        if (value.empty()) throw ParseError("empty value for '" + key + "'", line_no);
        current->set(key, {std::move(value), line_no}, *allowed);
    }

    if (!hardware) throw ParseError("missing [hardware] section");
    SpecFile spec;
    auto& hw = spec.hardware;
    const auto& h = *hardware;
    hw.name = h.need("name").text;
    hw.resources_max = to_resources(h.need("resources"), "resources");
    hw.memory_blocks_max = to_uint(h.need("memory_blocks"), "memory_blocks");
    hw.block_capacity_bits = to_uint(h.need("block_capacity_bits"), "block_capacity_bits");
    const auto& widths = h.need("port_widths_bits");
    for (const auto& w : split_list(widths.text)) {
        hw.supported_port_widths_bits.push_back(to_uint({w, widths.line}, "port_widths_bits"));
    }
    hw.max_bus_width_bits = to_uint(h.need("max_bus_width_bits"), "max_bus_width_bits");
    hw.target_frequency_hz = to_double(h.need("frequency_hz"), "frequency_hz");
    try {
        hw.validate();
    } catch (const ConfigError& e) {
        throw ParseError(e.what(), h.line());
    }

    if (defaults) {
        if (const auto* f = defaults->get("frequency_hz")) spec.default_frequency_hz = to_double(*f, "frequency_hz");
        if (const auto* l = defaults->get("layout")) {
            try {
                spec.default_layout = parse_layout(l->text);
            } catch (const ConfigError& e) {
                throw ParseError(e.what(), l->line);
            }
        }
    }

    if (types.empty()) throw ParseError("no [datatype NAME] sections");
    for (const auto& [name, s] : types) {
        DataTypeSpec dt;
        dt.name = name;
        dt.width_bits = to_uint(s.need("width_bits"), "width_bits");
        const auto& kind = s.need("kind");
        if (kind.text == "float") {
            dt.arithmetic_kind = ArithmeticKind::floating_point;
        } else if (kind.text == "int") {
            dt.arithmetic_kind = ArithmeticKind::exact_integer;
        } else {
            throw ParseError("kind: expected 'float' or 'int', got '" + kind.text + "'", kind.line);
        }
        dt.cost_per_compute_unit = to_resources(s.need("cost_per_unit"), "cost_per_unit");
        dt.overhead_per_pe = to_resources(s.need("overhead_per_pe"), "overhead_per_pe");
        dt.accumulation_latency_cycles = to_uint(s.need("accumulation_latency"), "accumulation_latency");
        if (const auto* p = s.get("port_width_bits")) dt.port_width_override_bits = to_uint(*p, "port_width_bits");
        try {
            dt.validate();
            dt.validate_against(hw);
            if (dt.port_width_override_bits) block_words(hw, dt);
        } catch (const ConfigError& e) {
            throw ParseError("[datatype " + name + "] " + e.what(), s.line());
        }
        spec.datatypes.push_back(std::move(dt));
    }
    return spec;
}

SpecFile parse_spec_text(const std::string& text) {
    std::istringstream is(text);
    return parse_spec(is);
}

SpecFile load_spec(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open spec file " + path.string());
    return parse_spec(is);
}

}  // namespace mmmdse
