#include "sporder/dyadic.hpp"

#include <stdexcept>

namespace sporder {

namespace {
constexpr Dyadic::Raw kOne = Dyadic::Raw{1} << Dyadic::kBits;
}

Dyadic Dyadic::one()
{
    return Dyadic{kOne};
}

Dyadic Dyadic::from_index(std::uint64_t index, int bits)
{
    if (bits < 0 || bits > kBits)
        throw std::invalid_argument("Dyadic::from_index: bits out of range");
    const Raw v = Raw{index} << (kBits - bits);
    if (bits <= 64 && Raw{index} > (Raw{1} << bits))
        throw std::invalid_argument("Dyadic::from_index: value exceeds 1");
    return Dyadic{v};
}

Dyadic Dyadic::pow2(int level)
{
    if (level < 0 || level > kBits)
        throw std::invalid_argument("Dyadic::pow2: level out of range");
    return Dyadic{Raw{1} << (kBits - level)};
}

Dyadic Dyadic::parse(std::string_view text)
{
    if (text == "0")
        return zero();
    if (text == "1")
        return one();
    if (text.size() < 3 || text.substr(0, 2) != "0.")
        throw std::invalid_argument("dyadic parameter must be 0, 1 or 0.<bits>: " + std::string(text));
    const auto digits = text.substr(2);
    if (static_cast<int>(digits.size()) > kBits)
        throw std::invalid_argument("dyadic parameter has more than 96 bits");
    Raw v = 0;
    int pos = 0;
    for (char c : digits) {
        ++pos;
        if (c != '0' && c != '1')
            throw std::invalid_argument("dyadic parameter has a non-binary digit: " + std::string(text));
        if (c == '1')
            v |= Raw{1} << (kBits - pos);
    }
    return Dyadic{v};
}

bool Dyadic::fits_bits(int bits) const
{
    if (bits >= kBits)
        return true;
    const Raw mask = (Raw{1} << (kBits - bits)) - 1;
    return (num_ & mask) == 0;
}

Dyadic::Raw Dyadic::scaled_floor(int bits) const
{
    return num_ >> (kBits - bits);
}

double Dyadic::to_double() const
{
    const auto hi = static_cast<std::uint64_t>(num_ >> 64);
    const auto lo = static_cast<std::uint64_t>(num_);
    return (static_cast<double>(hi) * 18446744073709551616.0 + static_cast<double>(lo)) /
           79228162514264337593543950336.0;  // 2^96
}

std::string Dyadic::to_string() const
{
    if (num_ == 0)
        return "0";
    if (num_ == kOne)
        return "1";
    std::string s = "0.";
    Raw rest = num_;
    for (int pos = 1; pos <= kBits && rest != 0; ++pos) {
        const Raw bit = Raw{1} << (kBits - pos);
        if (rest & bit) {
            s += '1';
            rest &= ~bit;
        } else {
            s += '0';
        }
    }
    return s;
}

Dyadic Dyadic::plus_sat(Dyadic o) const
{
    const Raw s = num_ + o.num_;
    return Dyadic{s > kOne ? kOne : s};
}

Dyadic Dyadic::minus_sat(Dyadic o) const
{
    return Dyadic{o.num_ >= num_ ? Raw{0} : num_ - o.num_};
}

Dyadic Dyadic::distance(Dyadic a, Dyadic b)
{
    return a.num_ >= b.num_ ? Dyadic{a.num_ - b.num_} : Dyadic{b.num_ - a.num_};
}

}  // namespace sporder
