#pragma once

#include <compare>
#include <cstdint>
#include <numeric>
#include <ostream>

namespace mmmdse {

/// Non-negative exact fraction. Intensities are kept in this form so that
/// rankings and table checks never depend on floating-point rounding.
class Ratio {
public:
    constexpr Ratio() = default;
    constexpr Ratio(std::uint64_t num, std::uint64_t den = 1) : num_(num), den_(den) {
        if (den_ == 0) {
            num_ = 0;
            den_ = 1;
            return;
        }
        const auto g = std::gcd(num_, den_);
        if (g > 1) {
            num_ /= g;
            den_ /= g;
        }
    }

    constexpr std::uint64_t num() const { return num_; }
    constexpr std::uint64_t den() const { return den_; }
    constexpr double value() const { return static_cast<double>(num_) / static_cast<double>(den_); }

    friend constexpr std::strong_ordering operator<=>(const Ratio& a, const Ratio& b) {
        using wide = unsigned __int128;
        const wide lhs = static_cast<wide>(a.num_) * b.den_;
        const wide rhs = static_cast<wide>(b.num_) * a.den_;
        if (lhs < rhs) return std::strong_ordering::less;
        if (lhs > rhs) return std::strong_ordering::greater;
        return std::strong_ordering::equal;
    }
    friend constexpr bool operator==(const Ratio& a, const Ratio& b) {
        return (a <=> b) == std::strong_ordering::equal;
    }

    friend std::ostream& operator<<(std::ostream& os, const Ratio& r) {
        return os << r.num_ << '/' << r.den_;
    }

private:
    std::uint64_t num_ = 0;
    std::uint64_t den_ = 1;
};

}  // namespace mmmdse
