#include "mmmdse/matrix.hpp"

#include "mmmdse/errors.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <random>

namespace mmmdse {

namespace {

constexpr std::array<char, 4> kMagic = {'M', 'M', 'X', 'B'};

std::uint64_t element_bytes(const ElementFormat& f) { return (f.width_bits + 7) / 8; }

void put_le(std::ostream& os, std::uint64_t v, std::uint64_t bytes) {
    for (std::uint64_t i = 0; i < bytes; ++i) os.put(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint64_t get_le(std::istream& is, std::uint64_t bytes) {
    std::uint64_t v = 0;
    for (std::uint64_t i = 0; i < bytes; ++i) {
        const int ch = is.get();
        if (ch == std::char_traits<char>::eof()) throw ParseError("matrix file truncated");
        v |= static_cast<std::uint64_t>(static_cast<unsigned char>(ch)) << (8 * i);
    }
    return v;
}

template <typename T>
T normalize(const ElementFormat& f, T v) {
    if constexpr (std::is_same_v<T, std::uint64_t>) {
        return v & f.mask();
    } else if constexpr (std::is_same_v<T, float>) {
        return f.width_bits == 16 ? round_to_binary16(v) : v;
    } else {
        return v;
    }
}

MatrixBuffer::Storage make_storage(const ElementFormat& f, std::size_t rows, std::size_t cols) {
    if (f.kind == ArithmeticKind::exact_integer) return Matrix<std::uint64_t>(rows, cols);
    if (f.width_bits == 64) return Matrix<double>(rows, cols);
    return Matrix<float>(rows, cols);
}

// Uniform double in [-1, 1) from the top 53 bits of one generator draw.
double unit_interval(std::mt19937_64& gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53 * 2.0 - 1.0;
}

}  // namespace

void ElementFormat::validate() const {
    if (kind == ArithmeticKind::exact_integer) {
        if (width_bits < 1 || width_bits > 64) {
            throw UnsupportedTypeError("integer elements must be 1..64 bit, got " + std::to_string(width_bits));
        }
        return;
    }
    if (width_bits != 16 && width_bits != 32 && width_bits != 64) {
        throw UnsupportedTypeError("floating-point elements must be 16, 32 or 64 bit, got " +
                                   std::to_string(width_bits));
    }
}

std::uint32_t ElementFormat::dtype_code() const {
    return (kind == ArithmeticKind::floating_point ? 1u << 16 : 0u) | static_cast<std::uint32_t>(width_bits);
}

ElementFormat ElementFormat::from_dtype_code(std::uint32_t code) {
    const auto kind_bits = code >> 16;
    if (kind_bits > 1) throw ParseError("unknown dtype code " + std::to_string(code));
    ElementFormat f{kind_bits == 1 ? ArithmeticKind::floating_point : ArithmeticKind::exact_integer, code & 0xffffu};
    f.validate();
    return f;
}

std::uint64_t ElementFormat::mask() const {
    return width_bits >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << width_bits) - 1;
}

int ElementFormat::mantissa_bits() const {
    switch (width_bits) {
        case 16: return 11;
        case 32: return 24;
        default: return 53;
    }
}

std::uint16_t float_to_binary16_bits(float v) {
    const auto x = std::bit_cast<std::uint32_t>(v);
    const std::uint32_t sign = (x >> 16) & 0x8000u;
    const std::uint32_t exp = (x >> 23) & 0xffu;
    const std::uint32_t mant = x & 0x7fffffu;

    if (exp == 0xff) return static_cast<std::uint16_t>(sign | 0x7c00u | (mant != 0 ? 0x200u | (mant >> 13) : 0u));

    const int e = static_cast<int>(exp) - 127 + 15;
    if (e >= 31) return static_cast<std::uint16_t>(sign | 0x7c00u);
    if (e <= 0) {
        if (e < -10) return static_cast<std::uint16_t>(sign);
        const std::uint32_t full = mant | 0x800000u;
        const int shift = 14 - e;
        std::uint32_t h = full >> shift;
        const std::uint32_t rem = full & ((1u << shift) - 1);
        const std::uint32_t halfway = 1u << (shift - 1);
        if (rem > halfway || (rem == halfway && (h & 1u))) ++h;
        return static_cast<std::uint16_t>(sign | h);
    }
    std::uint32_t h = (static_cast<std::uint32_t>(e) << 10) | (mant >> 13);
    const std::uint32_t rem = mant & 0x1fffu;
    if (rem > 0x1000u || (rem == 0x1000u && (h & 1u))) ++h;  // may carry into the exponent
    return static_cast<std::uint16_t>(sign | h);
}

float binary16_bits_to_float(std::uint16_t bits) {
    const std::uint32_t sign = (bits & 0x8000u) << 16;
    const std::uint32_t exp = (bits >> 10) & 0x1fu;
    const std::uint32_t mant = bits & 0x3ffu;
    if (exp == 0) {
        const float mag = std::ldexp(static_cast<float>(mant), -24);
        return sign != 0 ? -mag : mag;
    }
    if (exp == 31) return std::bit_cast<float>(sign | 0x7f800000u | (mant << 13));
    return std::bit_cast<float>(sign | ((exp - 15 + 127) << 23) | (mant << 13));
}

float round_to_binary16(float v) { return binary16_bits_to_float(float_to_binary16_bits(v)); }

MatrixBuffer::MatrixBuffer(ElementFormat format, std::size_t rows, std::size_t cols) : format_(format) {
    format_.validate();
    storage_ = make_storage(format_, rows, cols);
}

template <typename T>
MatrixBuffer MatrixBuffer::from_values(ElementFormat format, std::size_t rows, std::size_t cols,
                                       std::vector<T> values) {
    if (values.size() != rows * cols) {
        throw DimensionError("expected " + std::to_string(rows * cols) + " values, got " +
                             std::to_string(values.size()));
    }
    MatrixBuffer out(format, rows, cols);
    std::visit(
        [&](auto& m) {
            using E = typename std::decay_t<decltype(m.data)>::value_type;
            for (std::size_t i = 0; i < values.size(); ++i) m.data[i] = normalize(format, static_cast<E>(values[i]));
        },
        out.storage_);
    return out;
}

template MatrixBuffer MatrixBuffer::from_values(ElementFormat, std::size_t, std::size_t, std::vector<std::uint64_t>);
template MatrixBuffer MatrixBuffer::from_values(ElementFormat, std::size_t, std::size_t, std::vector<std::int64_t>);
template MatrixBuffer MatrixBuffer::from_values(ElementFormat, std::size_t, std::size_t, std::vector<float>);
template MatrixBuffer MatrixBuffer::from_values(ElementFormat, std::size_t, std::size_t, std::vector<double>);

std::size_t MatrixBuffer::rows() const {
    return std::visit([](const auto& m) { return m.rows; }, storage_);
}

std::size_t MatrixBuffer::cols() const {
    return std::visit([](const auto& m) { return m.cols; }, storage_);
}

double MatrixBuffer::value(std::size_t r, std::size_t c) const {
    return std::visit([&](const auto& m) { return static_cast<double>(m(r, c)); }, storage_);
}

MatrixBuffer MatrixBuffer::random(ElementFormat format, std::size_t rows, std::size_t cols, std::uint64_t seed) {
    MatrixBuffer out(format, rows, cols);
    std::mt19937_64 gen(seed);
    std::visit(
        [&](auto& m) {
            using E = typename std::decay_t<decltype(m.data)>::value_type;
            for (auto& v : m.data) {
                if constexpr (std::is_same_v<E, std::uint64_t>) {
                    v = gen() & format.mask();
                } else {
                    v = normalize(format, static_cast<E>(unit_interval(gen)));
                }
            }
        },
        out.storage_);
    return out;
}

MatrixBuffer MatrixBuffer::identity(ElementFormat format, std::size_t n) {
    MatrixBuffer out(format, n, n);
    std::visit(
        [&](auto& m) {
            for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
        },
        out.storage_);
    return out;
}

void MatrixBuffer::write(std::ostream& os) const {
    os.write(kMagic.data(), kMagic.size());
    put_le(os, format_.dtype_code(), 4);
    put_le(os, rows(), 8);
    put_le(os, cols(), 8);
    const auto bytes = element_bytes(format_);
    std::visit(
        [&](const auto& m) {
            using E = typename std::decay_t<decltype(m.data)>::value_type;
            for (const auto v : m.data) {
                if constexpr (std::is_same_v<E, std::uint64_t>) {
                    put_le(os, v, bytes);
                } else if constexpr (std::is_same_v<E, float>) {
                    if (format_.width_bits == 16) put_le(os, float_to_binary16_bits(v), 2);
                    else put_le(os, std::bit_cast<std::uint32_t>(v), 4);
                } else {
                    put_le(os, std::bit_cast<std::uint64_t>(v), 8);
                }
            }
        },
        storage_);
    if (!os) throw Error("failed to write matrix");
}

MatrixBuffer MatrixBuffer::read(std::istream& is) {
    std::array<char, 4> magic{};
    is.read(magic.data(), magic.size());
    if (!is || magic != kMagic) throw ParseError("not a matrix file (bad magic)");
    const auto format = ElementFormat::from_dtype_code(static_cast<std::uint32_t>(get_le(is, 4)));
    const auto rows = get_le(is, 8);
    const auto cols = get_le(is, 8);
    constexpr std::uint64_t kMaxElements = std::uint64_t{1} << 34;
    if (rows != 0 && cols > kMaxElements / rows) throw ParseError("matrix file declares an implausible size");
    MatrixBuffer out(format, rows, cols);
    const auto bytes = element_bytes(format);
    std::visit(
        [&](auto& m) {
            using E = typename std::decay_t<decltype(m.data)>::value_type;
            for (auto& v : m.data) {
                const auto raw = get_le(is, bytes);
                if constexpr (std::is_same_v<E, std::uint64_t>) {
                    v = raw & format.mask();
                } else if constexpr (std::is_same_v<E, float>) {
                    v = format.width_bits == 16 ? binary16_bits_to_float(static_cast<std::uint16_t>(raw))
                                                : std::bit_cast<float>(static_cast<std::uint32_t>(raw));
                } else {
                    v = std::bit_cast<double>(raw);
                }
            }
        },
        out.storage_);
    return out;
}

void MatrixBuffer::save(const std::filesystem::path& path) const {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("cannot open " + path.string() + " for writing");
    write(os);
}

MatrixBuffer MatrixBuffer::load(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error("cannot open " + path.string());
    return read(is);
}

bool operator==(const MatrixBuffer& a, const MatrixBuffer& b) {
    return a.format_ == b.format_ && a.storage_ == b.storage_;
}

Comparison compare(const MatrixBuffer& a, const MatrixBuffer& b) {
    if (!(a.format() == b.format()) || a.rows() != b.rows() || a.cols() != b.cols()) {
        throw DimensionError("compared matrices differ in format or shape");
    }
    Comparison out;
    out.equal_bits = a.storage() == b.storage();
    for (std::size_t r = 0; r < a.rows(); ++r) {
        for (std::size_t c = 0; c < a.cols(); ++c) {
            const double x = a.value(r, c);
            const double y = b.value(r, c);
            const double abs_err = std::fabs(x - y);
            const double denom = std::max(std::fabs(y), std::numeric_limits<double>::min());
            out.max_absolute_error = std::max(out.max_absolute_error, abs_err);
            out.max_relative_error = std::max(out.max_relative_error, abs_err == 0.0 ? 0.0 : abs_err / denom);
        }
    }
    return out;
}

}  // namespace mmmdse
