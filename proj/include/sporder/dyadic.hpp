#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace sporder {

/// Exact dyadic rational in [0, 1], stored as num / 2^96.
///
/// Curve parameters carry at most 64 fractional bits, so 96 leaves room for
/// the cover radii used when shrinking open covers around them.
class Dyadic {
public:
    using Raw = unsigned __int128;
    static constexpr int kBits = 96;

    constexpr Dyadic() = default;

    static Dyadic zero() { return Dyadic{}; }
    static Dyadic one();
    /// index / 2^bits; requires index <= 2^bits and bits <= kBits.
    static Dyadic from_index(std::uint64_t index, int bits);
    /// 2^-level for 0 <= level <= kBits.
    static Dyadic pow2(int level);
    /// Parses "0", "1" or "0.b1b2..." (binary digits).
    static Dyadic parse(std::string_view text);

    /// True when the value is a multiple of 2^-bits.
    bool fits_bits(int bits) const;
    /// floor(value * 2^bits) for bits <= 64; value 1 maps to 2^bits.
    Raw scaled_floor(int bits) const;

    double to_double() const;
    /// Exact binary expansion, e.g. "0.0110", "0", "1".
    std::string to_string() const;

    /// Saturating arithmetic on [0, 1].
    Dyadic plus_sat(Dyadic o) const;
    Dyadic minus_sat(Dyadic o) const;
    /// |a - b| exactly.
    static Dyadic distance(Dyadic a, Dyadic b);

    Raw raw() const { return num_; }

    friend constexpr auto operator<=>(const Dyadic&, const Dyadic&) = default;

private:
    explicit constexpr Dyadic(Raw n) : num_(n) {}
    Raw num_ = 0;
};

}  // namespace sporder
