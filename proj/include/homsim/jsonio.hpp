#pragma once

#include <json.hpp>

#include <Eigen/Dense>

#include "homsim/grid.hpp"
#include "homsim/modefield.hpp"

// JSON encodings shared by design persistence and experiment configs.
// Complex numbers are [re, im]; matrices are arrays of rows.

namespace homsim {

using json = nlohmann::ordered_json;

inline json to_json(const cplx& c) { return json::array({c.real(), c.imag()}); }

inline cplx cplx_from_json(const json& j) {
    if (j.is_number()) return cplx(j.get<double>(), 0.0);
    if (j.is_array() && j.size() == 2)
        return cplx(j.at(0).get<double>(), j.at(1).get<double>());
    throw ConfigError("expected complex as number or [re, im]: " + j.dump());
}

inline json to_json(const Eigen::MatrixXcd& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(to_json(m(r, c)));
        rows.push_back(row);
    }
    return rows;
}

inline Eigen::MatrixXcd matrix_from_json(const json& j) {
    if (!j.is_array() || j.empty()) throw ConfigError("matrix: expected non-empty array of rows");
    const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
    const Eigen::Index cols = static_cast<Eigen::Index>(j.at(0).size());
    Eigen::MatrixXcd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        if (static_cast<Eigen::Index>(j.at(r).size()) != cols)
            throw ConfigError("matrix: ragged rows");
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = cplx_from_json(j.at(r).at(c));
    }
    return m;
}

inline json to_json(const ModeSpec& s) {
    if (!s.is_superposition())
        return json{{"l", s.l}, {"p", s.p}, {"waist", s.waist}};
    json terms = json::array();
    for (const auto& [sub, c] : s.terms)
        terms.push_back(json{{"mode", to_json(sub)}, {"coeff", to_json(c)}});
    return json{{"terms", terms}};
}

inline ModeSpec modespec_from_json(const json& j) {
    if (j.contains("terms")) {
        std::vector<std::pair<ModeSpec, cplx>> terms;
        for (const auto& t : j.at("terms"))
            terms.emplace_back(modespec_from_json(t.at("mode")), cplx_from_json(t.at("coeff")));
        return ModeSpec::superposition(std::move(terms));
    }
    ModeSpec s;
    s.l = j.at("l").get<int>();
    s.p = j.value("p", 0);
    s.waist = j.at("waist").get<double>();
    return s;
}

inline json to_json(const Grid& g) {
    return json{{"nx", g.nx}, {"ny", g.ny}, {"dx", g.dx}, {"dy", g.dy}};
}

inline Grid grid_from_json(const json& j) {
    Grid g;
    g.nx = j.at("nx").get<int>();
    g.ny = j.at("ny").get<int>();
    g.dx = j.at("dx").get<double>();
    g.dy = j.at("dy").get<double>();
    g.validate();
    return g;
}

}  // namespace homsim
