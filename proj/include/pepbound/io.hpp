#pragma once

// JSON file formats:
//   polynomial  {"n": int, "d": int, "coeffs": [[[re, im], ...row-major...] x (d+1)]}
//   references  the polynomial object plus
//               {"refs": [{"lambda": [hi_re, lo_re, hi_im, lo_im], "x": [[...], ...], "residual": r, ...}]}

#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "matrix.hpp"
#include "oracle.hpp"
#include "polyval.hpp"

namespace pepbound {

struct FormatError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

using json = nlohmann::json;

inline json polynomial_to_json(const MatrixPolynomial& p) {
    json coeffs = json::array();
    for (const auto& a : p.coeffs()) {
        json entries = json::array();
        for (const auto& z : a.entries()) entries.push_back({z.real(), z.imag()});
        coeffs.push_back(std::move(entries));
    }
    return {{"n", p.n()}, {"d", p.grade()}, {"coeffs", std::move(coeffs)}};
}

namespace detail {

inline std::size_t require_count(const json& j, const char* key, std::size_t minimum) {
    if (!j.contains(key) || !j.at(key).is_number_integer()) throw FormatError(std::string("missing integer field '") + key + "'");
    const auto v = j.at(key).get<long long>();
    if (v < static_cast<long long>(minimum)) throw FormatError(std::string("field '") + key + "' out of range");
    return static_cast<std::size_t>(v);
}

inline cplx parse_complex(const json& z) {
    if (!z.is_array() || z.size() != 2 || !z[0].is_number() || !z[1].is_number())
        throw FormatError("complex entries must be [re, im] number pairs");
    return {z[0].get<double>(), z[1].get<double>()};
}

inline json dd_to_json(const DDComplex& z) { return {z.re.hi, z.re.lo, z.im.hi, z.im.lo}; }

inline DDComplex dd_from_json(const json& z) {
    if (!z.is_array() || z.size() != 4) throw FormatError("extended complex values must be [hi_re, lo_re, hi_im, lo_im]");
    for (const auto& v : z)
        if (!v.is_number()) throw FormatError("extended complex components must be numbers");
    return {DD(z[0].get<double>(), z[1].get<double>()), DD(z[2].get<double>(), z[3].get<double>())};
}

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw FormatError("'" + path + "': " + e.what());
    }
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << text;
    if (!out) throw IoError("write failed for '" + path + "'");
}

}  // namespace detail

/// Strict parse: every length must match n and d exactly.
inline MatrixPolynomial polynomial_from_json(const json& j) {
    if (!j.is_object()) throw FormatError("polynomial must be a JSON object");
    const std::size_t n = detail::require_count(j, "n", 1);
    const std::size_t d = detail::require_count(j, "d", 1);
    if (!j.contains("coeffs") || !j.at("coeffs").is_array()) throw FormatError("missing array field 'coeffs'");
    const json& cs = j.at("coeffs");
    if (cs.size() != d + 1) throw FormatError("'coeffs' must hold d + 1 matrices");
    std::vector<ComplexMatrix> coeffs;
    coeffs.reserve(d + 1);
    for (const auto& c : cs) {
        if (!c.is_array() || c.size() != n * n) throw FormatError("each coefficient must hold n*n entries");
        ComplexMatrix a(n, n);
        for (std::size_t k = 0; k < n * n; ++k) a.entries()[k] = detail::parse_complex(c[k]);
        coeffs.push_back(std::move(a));
    }
    return MatrixPolynomial(std::move(coeffs));
}

inline MatrixPolynomial load_polynomial(const std::string& path) {
    return polynomial_from_json(detail::read_json_file(path));
}

inline void save_polynomial(const MatrixPolynomial& p, const std::string& path) {
    detail::write_text_file(path, polynomial_to_json(p).dump(1) + "\n");
}

inline json references_to_json(const std::vector<RefEigenpair>& refs) {
    json arr = json::array();
    for (const auto& r : refs) {
        json x = json::array();
        for (const auto& z : r.x) x.push_back(detail::dd_to_json(z));
        arr.push_back({{"lambda", detail::dd_to_json(r.lambda)},
                       {"x", std::move(x)},
                       {"residual", r.residual},
                       {"converged", r.converged},
                       {"clustered", r.clustered},
                       {"iterations", r.iterations}});
    }
    return arr;
}

inline std::vector<RefEigenpair> references_from_json(const json& arr, std::size_t n) {
    if (!arr.is_array()) throw FormatError("'refs' must be an array");
    std::vector<RefEigenpair> refs;
    for (const auto& e : arr) {
        if (!e.is_object() || !e.contains("lambda") || !e.contains("x") || !e.contains("residual"))
            throw FormatError("each reference needs 'lambda', 'x' and 'residual'");
        RefEigenpair r;
        r.lambda = detail::dd_from_json(e.at("lambda"));
        const json& x = e.at("x");
        if (!x.is_array() || x.size() != n) throw FormatError("reference vector must have length n");
        for (const auto& z : x) r.x.push_back(detail::dd_from_json(z));
        if (!e.at("residual").is_number()) throw FormatError("'residual' must be a number");
        r.residual = e.at("residual").get<double>();
        r.converged = e.value("converged", true);
        r.clustered = e.value("clustered", false);
        r.iterations = e.value("iterations", 0);
        refs.push_back(std::move(r));
    }
    return refs;
}

/// Polynomial plus its reference spectrum; `key` records how the polynomial was produced.
inline void save_reference_cache(const MatrixPolynomial& p, const std::vector<RefEigenpair>& refs, const json& key,
                                 const std::string& path) {
    json j = polynomial_to_json(p);
    j["key"] = key;
    j["refs"] = references_to_json(refs);
    detail::write_text_file(path, j.dump(1) + "\n");
}

inline std::pair<MatrixPolynomial, std::vector<RefEigenpair>> load_reference_cache(const std::string& path) {
    const json j = detail::read_json_file(path);
    MatrixPolynomial p = polynomial_from_json(j);
    if (!j.contains("refs")) throw FormatError("reference cache lacks 'refs'");
    auto refs = references_from_json(j.at("refs"), p.n());
    return {std::move(p), std::move(refs)};
}

}  // namespace pepbound
