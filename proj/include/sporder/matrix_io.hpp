#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "sporder/matrix.hpp"

namespace sporder {

/// Shortest decimal text with 17 significant digits ("%.17g").
std::string format_double(double v);

/// Serializes a JSON tree with every floating-point number written at 17
/// significant digits. Object keys keep nlohmann's sorted order, so output
/// is a pure function of the tree.
std::string dump_json(const nlohmann::json& j, int indent = 2);

/// {"n": int, "entries": [[re, im], ...]} row-major.
nlohmann::json matrix_to_json(const ComplexMatrix& m);

/// Parses the matrix schema above. Throws std::invalid_argument on any schema
/// violation or non-finite entry.
ComplexMatrix matrix_from_json(const nlohmann::json& j);

std::string matrix_to_string(const ComplexMatrix& m);
ComplexMatrix matrix_from_string(const std::string& text);

void write_matrix(const std::filesystem::path& path, const ComplexMatrix& m);
ComplexMatrix read_matrix(const std::filesystem::path& path);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

/// FNV-1a, 64 bit, rendered as 16 hex digits.
std::string fnv1a_hex(const std::string& bytes);

}  // namespace sporder
