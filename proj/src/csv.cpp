#include "mmmdse/csv.hpp"

#include "mmmdse/errors.hpp"

#include <fstream>
#include <istream>
#include <ostream>

namespace mmmdse {

namespace {

void write_field(std::ostream& os, const std::string& f) {
    if (f.find_first_of(",\"\r\n") == std::string::npos) {
        os << f;
        return;
    }
    os << '"';
    for (char ch : f) {
        if (ch == '"') os << '"';
        os << ch;
    }
    os << '"';
}

void write_record(std::ostream& os, const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i > 0) os << ',';
        write_field(os, fields[i]);
    }
    os << '\n';
}

// Reads one record; returns false at end of input.
bool read_record(std::istream& is, std::vector<std::string>& out, std::size_t& line) {
    out.clear();
    if (is.peek() == std::char_traits<char>::eof()) return false;
    ++line;
    std::string field;
    bool quoted = false;
    bool was_quoted = false;
    for (;;) {
        const int c = is.get();
        if (c == std::char_traits<char>::eof()) {
            if (quoted) throw ParseError("unterminated quoted field", line);
            out.push_back(field);
            return true;
        }
        const char ch = static_cast<char>(c);
        if (quoted) {
            if (ch == '"') {
                if (is.peek() == '"') {
                    field.push_back('"');
                    is.get();
                } else {
                    quoted = false;
                }
            } else {
                if (ch == '\n') ++line;
                field.push_back(ch);
            }
            continue;
        }
        if (ch == '"') {
            if (!field.empty() || was_quoted) throw ParseError("stray quote inside a field", line);
            quoted = was_quoted = true;
        } else if (ch == ',') {
            out.push_back(field);
            field.clear();
            was_quoted = false;
        } else if (ch == '\n') {
            out.push_back(field);
            return true;
        } else if (ch != '\r') {
            field.push_back(ch);
        }
    }
}

}  // namespace

std::size_t CsvTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return i;
    }
    throw ParseError("CSV has no column '" + name + "'");
}

void write_csv(std::ostream& os, const CsvTable& table) {
    write_record(os, table.header);
    for (const auto& row : table.rows) write_record(os, row);
}

void save_csv(const std::filesystem::path& path, const CsvTable& table) {
    std::ofstream os(path);
    if (!os) throw Error("cannot open " + path.string() + " for writing");
    write_csv(os, table);
    if (!os) throw Error("failed to write " + path.string());
}

CsvTable read_csv(std::istream& is) {
    CsvTable t;
    std::size_t line = 0;
    if (!read_record(is, t.header, line)) throw ParseError("empty CSV");
    std::vector<std::string> rec;
    while (read_record(is, rec, line)) {
        if (rec.size() != t.header.size()) {
            throw ParseError("expected " + std::to_string(t.header.size()) + " fields, got " +
                                 std::to_string(rec.size()),
                             line);
        }
        t.rows.push_back(rec);
    }
    return t;
}

CsvTable load_csv(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw Error("cannot open " + path.string());
    return read_csv(is);
}

}  // namespace mmmdse
