#include "sporder/random.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace sporder {

double Rng::uniform()
{
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::int64_t Rng::uniform_int(std::int64_t lo, std::int64_t hi)
{
    if (hi < lo)
        throw std::invalid_argument("uniform_int: empty range");
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    if (span == 0)
        return static_cast<std::int64_t>(engine_());
    // rejection keeps the draw unbiased
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % span;
    std::uint64_t v;
    do
        v = engine_();
    while (v >= limit);
    return lo + static_cast<std::int64_t>(v % span);
}

double Rng::gaussian()
{
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u1;
    do
        u1 = uniform();
    while (u1 <= 0.0);
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
}

Complex Rng::complex_gaussian()
{
    const double re = gaussian();
    const double im = gaussian();
    return Complex(re, im) * std::numbers::sqrt2 * 0.5;
}

ComplexMatrix Rng::complex_gaussian_matrix(Eigen::Index rows, Eigen::Index cols)
{
    ComplexMatrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j)
            m(i, j) = complex_gaussian();
    return m;
}

ComplexVector Rng::unit_vector(Eigen::Index n)
{
    ComplexVector v(n);
    do {
        for (Eigen::Index i = 0; i < n; ++i)
            v(i) = complex_gaussian();
    } while (v.norm() == 0.0);
    return v / v.norm();
}

}  // namespace sporder
