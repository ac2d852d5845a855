#pragma once

/**
 * @file matrix.hpp
 * @brief Dense row-major matrices of the simulated element types, the seeded
 *        generator and the flat binary matrix file format.
 *
 * Element storage by format:
 *   exact integer, 1..64 bit -> std::uint64_t, values masked to w_c bits
 *   floating point, 16 bit   -> float, values rounded to binary16
 *   floating point, 32 bit   -> float
 *   floating point, 64 bit   -> double
 *
 * Binary file layout (all little-endian):
 *   offset 0   4 bytes  magic "MMXB"
 *   offset 4   u32      dtype code = (kind << 16) | width_bits, kind 0 = integer, 1 = float
 *   offset 8   u64      rows
 *   offset 16  u64      cols
 *   offset 24  rows*cols elements, row-major, ceil(width_bits/8) bytes each
 *              (binary16 / binary32 / binary64 bit patterns for floats)
 */

#include "mmmdse/hardware_model.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

namespace mmmdse {

struct ElementFormat {
    ArithmeticKind kind = ArithmeticKind::exact_integer;
    std::uint64_t width_bits = 32;

    /// Throws UnsupportedTypeError for formats the simulator cannot represent.
    void validate() const;
    std::uint32_t dtype_code() const;
    static ElementFormat from_dtype_code(std::uint32_t code);
    static ElementFormat of(const DataTypeSpec& dt) { return {dt.arithmetic_kind, dt.width_bits}; }

    /// Integer value mask (all ones for 64 bit).
    std::uint64_t mask() const;
    /// Mantissa bits including the implicit one (11 / 24 / 53).
    int mantissa_bits() const;

    friend bool operator==(const ElementFormat&, const ElementFormat&) = default;
};

/// Round-to-nearest-even conversion through IEEE binary16.
float round_to_binary16(float v);
std::uint16_t float_to_binary16_bits(float v);
float binary16_bits_to_float(std::uint16_t bits);

template <typename T>
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<T> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, T{}) {}

    T& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    const T& operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

    friend bool operator==(const Matrix&, const Matrix&) = default;
};

class MatrixBuffer {
public:
    using Storage = std::variant<Matrix<std::uint64_t>, Matrix<float>, Matrix<double>>;

    MatrixBuffer() = default;
    /// Zero-filled matrix.
    MatrixBuffer(ElementFormat format, std::size_t rows, std::size_t cols);

    /// Wraps existing values; integers are masked and binary16 values rounded.
    template <typename T>
    static MatrixBuffer from_values(ElementFormat format, std::size_t rows, std::size_t cols, std::vector<T> values);

    const ElementFormat& format() const { return format_; }
    std::size_t rows() const;
    std::size_t cols() const;

    Storage& storage() { return storage_; }
    const Storage& storage() const { return storage_; }

    double value(std::size_t r, std::size_t c) const;

    /// Uniform integers over [0, 2^w_c) or floats over [-1, 1), from std::mt19937_64(seed).
    static MatrixBuffer random(ElementFormat format, std::size_t rows, std::size_t cols, std::uint64_t seed);
    static MatrixBuffer identity(ElementFormat format, std::size_t n);

    void write(std::ostream& os) const;
    static MatrixBuffer read(std::istream& is);
    void save(const std::filesystem::path& path) const;
    static MatrixBuffer load(const std::filesystem::path& path);

    friend bool operator==(const MatrixBuffer& a, const MatrixBuffer& b);

private:
    ElementFormat format_;
    Storage storage_;
};

struct Comparison {
    bool equal_bits = false;      // identical element values
    double max_relative_error = 0.0;
    double max_absolute_error = 0.0;
};

/// Element-wise comparison of two matrices with identical format and shape.
Comparison compare(const MatrixBuffer& a, const MatrixBuffer& b);

}  // namespace mmmdse
