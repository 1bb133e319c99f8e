#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "sporder/matrix.hpp"

namespace sporder {

/// "kind:n=32,seed=7,key=value,...". Kinds and their parameters:
///   ginibre                 i.i.d. complex Gaussian entries / sqrt(n)
///   elliptic  rho           sqrt((1+rho)/2) H1 + i sqrt((1-rho)/2) H2, H1, H2 GUE
///   jordan    lambda, lambda_im      single Jordan block (seed unused)
///   strict_upper            Gaussian / sqrt(n) above the diagonal
///   normal_plus_nilpotent nil       U (D + nil S) U*, U Haar, D Gaussian diagonal,
///                                   S strict upper Gaussian / sqrt(n) (nil default 0.5)
///   diag_perturb eps, levels, pattern   D + eps G. D repeats `levels` distinct
///                                   values; pattern=random draws them Gaussian,
///                                   pattern=edges puts them on level-4 grid edges
///                                   with one entry 2 fixing the grid radius.
struct EnsembleSpec {
    std::string kind;
    int n = 1;
    std::uint64_t seed = 0;
    std::map<std::string, std::string> params;

    static EnsembleSpec parse(std::string_view text);
    /// Canonical text: kind, n, seed, then parameters in key order.
    std::string to_string() const;

    double number(const std::string& key, double fallback) const;
    std::string text(const std::string& key, const std::string& fallback) const;
};

/// Deterministic for a given spec. Throws std::invalid_argument on bad
/// parameters (|rho| > 1, eps < 0, n < 1, unknown kind or key).
ComplexMatrix sample(const EnsembleSpec& spec);

/// The fixed test corpus: 40 specs, sizes 2..64, every kind.
std::vector<EnsembleSpec> corpus();

/// FNV-1a digest of the matrix in the repository's JSON matrix format.
std::string matrix_digest(const ComplexMatrix& m);

}  // namespace sporder
