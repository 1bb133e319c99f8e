#pragma once

#include <cstdint>
#include <random>

#include "sporder/matrix.hpp"

namespace sporder {

/// Seeded generator with a fixed, portable algorithm: mt19937_64, uniforms
/// from the top 53 bits, Gaussians by Box-Muller (both outputs used).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Raw 64-bit output.
    std::uint64_t bits() { return engine_(); }
    /// Uniform in [0, 1).
    double uniform();
    /// Uniform integer in [lo, hi].
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
    double gaussian();
    /// (g1 + i g2) / sqrt(2), unit variance.
    Complex complex_gaussian();
    ComplexMatrix complex_gaussian_matrix(Eigen::Index rows, Eigen::Index cols);
    ComplexVector unit_vector(Eigen::Index n);

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace sporder
