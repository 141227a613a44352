#pragma once

// JSON reading and writing for specs, systems and reports.
//
// Spec files look like
//   {"n": 2, "equations": [{"support": [[0,0],[1,0],[0,1]], "variances": [1,1,1]}, ...]}
// Exponents and variances may be JSON integers, JSON floats, or strings holding
// a decimal ("0.25") or a rational ("1/3"). Any JSON float switches the spec to
// float geometry; otherwise it is exact. An optional "mode": "exact"|"float"
// overrides that choice.

#include "fewzeros/bounds.hpp"
#include "fewzeros/geometry.hpp"
#include "fewzeros/random_systems.hpp"
#include "fewzeros/rng.hpp"
#include "fewzeros/system_spec.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <string>

namespace fewzeros {

using Json = nlohmann::json;

namespace detail {

inline Rational json_scalar(const Json& v, const std::string& path, bool& saw_float) {
    try {
        if (v.is_number_integer()) {
            if (v.is_number_unsigned()) return Rational(v.get<std::uint64_t>());
            return Rational(v.get<std::int64_t>());
        }
        if (v.is_number_float()) {
            saw_float = true;
            return ScalarTraits<Rational>::from_double(v.get<double>());
        }
        if (v.is_string()) return parse_rational(v.get<std::string>());
    } catch (const std::exception& e) {
        throw SpecError(path + ": " + e.what());
    }
    throw SpecError(path + ": expected a number, a decimal string or a \"p/q\" string, got " +
                    std::string(v.type_name()));
}

inline const Json& field(const Json& obj, const char* key, const std::string& path) {
    if (!obj.is_object()) throw SpecError(path + ": expected an object");
    const auto it = obj.find(key);
    if (it == obj.end()) throw SpecError(path + (path.empty() ? "" : ".") + key + ": missing");
    return *it;
}

inline Json rational_json(const Rational& q) {
    if (boost::multiprecision::denominator(q) == 1) {
        const auto& num = boost::multiprecision::numerator(q);
        if (num >= std::numeric_limits<std::int64_t>::min() && num <= std::numeric_limits<std::int64_t>::max())
            return num.convert_to<std::int64_t>();
    }
    return format_rational(q);
}

}  // namespace detail

inline SystemSpec spec_from_json(const Json& j) {
    SystemSpec spec;
    bool saw_float = false;
    const Json& n = detail::field(j, "n", "");
    if (!n.is_number_integer() || n.get<std::int64_t>() <= 0) throw SpecError("n: expected a positive integer");
    spec.n = n.get<std::size_t>();
    const Json& eqs = detail::field(j, "equations", "");
    if (!eqs.is_array()) throw SpecError("equations: expected an array");
    for (std::size_t k = 0; k < eqs.size(); ++k) {
        const std::string where = "equations[" + std::to_string(k) + "]";
        EquationSpec eq;
        const Json& sup = detail::field(eqs[k], "support", where);
        const Json& var = detail::field(eqs[k], "variances", where);
        if (!sup.is_array()) throw SpecError(where + ".support: expected an array of exponent vectors");
        if (!var.is_array()) throw SpecError(where + ".variances: expected an array");
        for (std::size_t i = 0; i < sup.size(); ++i) {
            const std::string p = where + ".support[" + std::to_string(i) + "]";
            if (!sup[i].is_array()) throw SpecError(p + ": expected an array of length n");
            std::vector<Rational> a;
            for (std::size_t c = 0; c < sup[i].size(); ++c)
                a.push_back(detail::json_scalar(sup[i][c], p + "[" + std::to_string(c) + "]", saw_float));
            eq.support.push_back(std::move(a));
        }
        for (std::size_t i = 0; i < var.size(); ++i)
            eq.variances.push_back(
                detail::json_scalar(var[i], where + ".variances[" + std::to_string(i) + "]", saw_float));
        spec.equations.push_back(std::move(eq));
    }
    spec.mode = saw_float ? GeometryMode::floating : GeometryMode::exact;
    if (const auto it = j.find("mode"); it != j.end()) {
        if (*it == "exact") {
            spec.mode = GeometryMode::exact;
        } else if (*it == "float") {
            spec.mode = GeometryMode::floating;
        } else {
            throw SpecError("mode: expected \"exact\" or \"float\"");
        }
    }
    spec.validate();
    return spec;
}

inline SystemSpec parse_spec(const std::string& text) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw SpecError(std::string("malformed JSON: ") + e.what());
    }
    return spec_from_json(j);
}

inline SystemSpec load_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SpecError("cannot open spec file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return parse_spec(ss.str());
    } catch (const SpecError& e) {
        throw SpecError(path + ": " + e.what());
    }
}

/// Lossless: integers stay integers, everything else is written as "p/q", and
/// the mode is always recorded, so reading back gives an equal spec.
inline Json spec_to_json(const SystemSpec& spec) {
    Json eqs = Json::array();
    for (const auto& eq : spec.equations) {
        Json sup = Json::array(), var = Json::array();
        for (const auto& a : eq.support) {
            Json row = Json::array();
            for (const auto& x : a) row.push_back(detail::rational_json(x));
            sup.push_back(std::move(row));
        }
        for (const auto& v : eq.variances) var.push_back(detail::rational_json(v));
        eqs.push_back({{"support", std::move(sup)}, {"variances", std::move(var)}});
    }
    return {{"n", spec.n}, {"mode", to_string(spec.mode)}, {"equations", std::move(eqs)}};
}

inline void save_spec(const SystemSpec& spec, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << spec_to_json(spec).dump(2) << '\n';
}

inline Json system_to_json(const FewnomialSystem& sys) {
    Json j = spec_to_json(sys.spec);
    j["coefficients"] = sys.coefficients;
    return j;
}

inline FewnomialSystem system_from_json(const Json& j) {
    auto spec = spec_from_json(j);
    const Json& c = detail::field(j, "coefficients", "");
    try {
        return FewnomialSystem::make(std::move(spec), c.get<std::vector<std::vector<double>>>());
    } catch (const Json::exception& e) {
        throw SpecError(std::string("coefficients: ") + e.what());
    }
}

inline Json bounds_to_json(const BoundReport& r) {
    Json j;
    j["kushnirenko"] = r.kushnirenko;
    j["lifted"] = r.lifted;
    j["lifted_vertex_count"] = r.lifted_vertex_count;
    j["polytope"] = r.polytope ? Json(*r.polytope) : Json(nullptr);
    j["unmixed"] = r.unmixed ? Json(*r.unmixed) : Json(nullptr);
    j["mv_status"] = to_string(r.mv_status);
    j["affine_span"] = r.affine_span;
    j["notes"] = r.notes;
    return j;
}

namespace detail {

template <class T>
Json cells_json(const SystemSpec& spec, RngStream& stream, std::size_t cover_points) {
    const auto supports = spec.supports<T>();
    const auto liftings = lifting_from_variances<T>(spec);
    const auto cells = enumerate_full_cells(supports, liftings);
    Json out;
    out["mode"] = to_string(spec.mode);
    out["vertex_count"] = cells.size();
    Json list = Json::array();
    double reach = 1.0;
    for (const auto& c : cells) {
        Json cj;
        cj["label"] = c.label.indices;
        cj["diagonal"] = is_diagonal(c.label, supports);
        cj["margin"] = to_double(c.margin);
        Json w = Json::array();
        for (const auto& x : c.witness) {
            w.push_back(to_double(x));
            reach = std::max(reach, std::abs(to_double(x)));
        }
        cj["witness"] = std::move(w);
        Json ineqs = Json::array();
        for (const auto& q : c.inequalities) {
            Json nrm = Json::array();
            for (const auto& x : q.normal) nrm.push_back(to_double(x));
            ineqs.push_back({{"normal", std::move(nrm)}, {"rhs", to_double(q.rhs)}});
        }
        cj["inequalities"] = std::move(ineqs);
        list.push_back(std::move(cj));
    }
    out["cells"] = std::move(list);

    // cover self-check: random directions spread well past every witness
    std::size_t covered = 0;
    const double scale = 4.0 * reach;
    for (std::size_t p = 0; p < cover_points; ++p) {
        std::vector<double> z(spec.n);
        for (auto& x : z) x = scale * stream.normal();
        bool hit = false;
        for (const auto& c : cells) {
            if constexpr (ScalarTraits<T>::exact) {
                Vec<Rational> zq;
                for (double x : z) zq.push_back(ScalarTraits<Rational>::from_double(x));
                hit = c.contains(zq);
            } else {
                hit = c.contains_approx(z, 1e-9 * (1.0 + scale));
            }
            if (hit) break;
        }
        covered += hit ? 1 : 0;
    }
    out["cover_check"] = {{"points", cover_points}, {"covered", covered}, {"ok", covered == cover_points}};
    return out;
}

}  // namespace detail

/// Full-dimensional cells of the lifted subdivision plus a covering check on
/// `cover_points` random points.
inline Json cells_report(const SystemSpec& spec, RngStream& stream, std::size_t cover_points = 1000) {
    spec.validate();
    return spec.mode == GeometryMode::exact ? detail::cells_json<Rational>(spec, stream, cover_points)
                                            : detail::cells_json<double>(spec, stream, cover_points);
}

}  // namespace fewzeros
