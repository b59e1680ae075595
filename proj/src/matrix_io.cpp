#include "cayley/matrix_io.hpp"

#include <fstream>
#include <sstream>

namespace cayley {

using nlohmann::json;

json matrix_to_json(const CMatrix &m) {
    json data = json::array();
    for (const cplx &z : m.data()) {
        data.push_back(json::array({z.real(), z.imag()}));
    }
    return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

CMatrix matrix_from_json(const json &doc) {
    try {
        const auto rows = doc.at("rows").get<std::size_t>();
        const auto cols = doc.at("cols").get<std::size_t>();
        const json &data = doc.at("data");
        if (rows == 0 || cols == 0) {
            throw Error(ErrorCategory::config, "matrix document: rows and cols must be positive");
        }
        if (!data.is_array() || data.size() != rows * cols) {
            throw Error(ErrorCategory::config, "matrix document: expected " + std::to_string(rows * cols) +
                                                   " [re, im] entries");
        }
        std::vector<cplx> values;
        values.reserve(data.size());
        for (const json &entry : data) {
            if (!entry.is_array() || entry.size() != 2) {
                throw Error(ErrorCategory::config, "matrix document: each entry must be [re, im]");
            }
            values.emplace_back(entry[0].get<double>(), entry[1].get<double>());
        }
        return CMatrix(rows, cols, std::move(values));
    } catch (const json::exception &e) {
        throw Error(ErrorCategory::config, std::string("matrix document: ") + e.what());
    }
}

std::string matrix_to_string(const CMatrix &m) { return matrix_to_json(m).dump(); }

void write_matrix_file(const CMatrix &m, const std::filesystem::path &path) {
    std::ofstream out(path);
    if (!out) {
        throw Error(ErrorCategory::io, "cannot open " + path.string() + " for writing");
    }
    out << matrix_to_string(m) << '\n';
    if (!out) {
        throw Error(ErrorCategory::io, "write failed: " + path.string());
    }
}

CMatrix read_matrix_file(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCategory::io, "cannot open " + path.string());
    }
    json doc;
    try {
        in >> doc;
    } catch (const json::exception &e) {
        throw Error(ErrorCategory::config, path.string() + ": " + e.what());
    }
    return matrix_from_json(doc);
}

}  // namespace cayley
