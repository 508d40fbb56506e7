#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "homsim/common.hpp"
#include "homsim/grid.hpp"

namespace homsim {

// Transverse complex field sampled on a grid. Values carry units of 1/m
// (amplitude), so power() integrates to a dimensionless total.
struct Field {
    Grid grid;
    double wavelength = 0.0;  // m
    std::vector<cplx> amp;    // row-major, index = iy*nx + ix

    void check_compatible(const Field& other, const char* ctx) const {
        if (grid != other.grid)
            throw ConfigError(std::string(ctx) + ": fields live on different grids");
        if (wavelength != other.wavelength)
            throw ConfigError(std::string(ctx) + ": fields have different wavelengths");
    }
};

// Mode description: either a Laguerre-Gauss leaf (l, p, waist) or a unit-norm
// superposition of sub-specs. Superpositions may nest.
struct ModeSpec {
    int l = 0;          // azimuthal index, phase convention exp(+i*l*phi)
    int p = 0;          // radial index, >= 0
    double waist = 0;   // m, beam waist at z = 0
    std::vector<std::pair<ModeSpec, cplx>> terms;  // non-empty => superposition

    bool is_superposition() const { return !terms.empty(); }
    bool operator==(const ModeSpec& o) const;
    static ModeSpec lg(int l, int p, double waist) { return ModeSpec{l, p, waist, {}}; }
    static ModeSpec superposition(std::vector<std::pair<ModeSpec, cplx>> t) {
        ModeSpec s;
        s.terms = std::move(t);
        return s;
    }
};

// Normalized LG_{p,l} profile a distance z from the waist plane (plane-wave
// carrier exp(ikz) dropped). Includes Gouy phase (2p+|l|+1)*atan(z/zR) and
// wavefront curvature. Throws ConfigError when the grid captures less than
// 99.9% of the analytic unit power (window too small / pitch too coarse).
Field lg_field(const Grid& grid, double wavelength, int l, int p, double waist,
               double z = 0.0);

// Realize a spec at z = 0. Superposition coefficients must be unit-norm
// (sum |c|^2 = 1 within 1e-12).
Field realize(const ModeSpec& spec, const Grid& grid, double wavelength);

Field superpose(const std::vector<std::pair<const Field*, cplx>>& terms);
cplx inner_product(const Field& a, const Field& b);  // conj(a).b dA
double power(const Field& f);

// Orthonormal mode basis: realized fields plus the Gram matrix actually
// achieved on the grid.
struct Basis {
    std::vector<ModeSpec> specs;
    std::vector<Field> fields;
    Eigen::MatrixXcd gram;
    double max_orthonormality_deviation = 0.0;  // max |gram - I|

    int dim() const { return static_cast<int>(specs.size()); }
};

// Realizes all specs and verifies pairwise orthonormality within tol
// (max entrywise |gram - I|). Duplicate specs and empty spec lists are
// rejected.
Basis build_basis(const std::vector<ModeSpec>& specs, const Grid& grid,
                  double wavelength, double tol = 1e-3);

// Inspection exports. CSV: one "re,im" pair per line, row-major, 17
// significant digits. PGM: 8-bit intensity (linear, max-normalized) or
// phase ([-pi, pi) onto 0..255).
void write_field_csv(const Field& f, const std::string& path);
void write_field_pgm_intensity(const Field& f, const std::string& path);
void write_field_pgm_phase(const Field& f, const std::string& path);

}  // namespace homsim
