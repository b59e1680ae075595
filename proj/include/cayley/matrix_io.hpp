#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"

#include "cayley/linalg.hpp"

namespace cayley {

// Interchange document: {"rows": r, "cols": c, "data": [[re, im], ...]} with
// data in row-major order. Doubles are written in shortest round-trip form.
nlohmann::json matrix_to_json(const CMatrix &m);
CMatrix matrix_from_json(const nlohmann::json &doc);

std::string matrix_to_string(const CMatrix &m);
void write_matrix_file(const CMatrix &m, const std::filesystem::path &path);
CMatrix read_matrix_file(const std::filesystem::path &path);

}  // namespace cayley
