#include "homsim/modefield.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "homsim/pgm.hpp"

namespace homsim {

namespace {

double factorial_ratio(int p, int pl) {
    // p! / (p+|l|)! computed as a running product to stay in range
    double r = 1.0;
    for (int k = p + 1; k <= pl; ++k) r /= k;
    return r;
}

}  // namespace

bool ModeSpec::operator==(const ModeSpec& o) const {
    if (is_superposition() != o.is_superposition()) return false;
    if (!is_superposition()) return l == o.l && p == o.p && waist == o.waist;
    if (terms.size() != o.terms.size()) return false;
    for (std::size_t i = 0; i < terms.size(); ++i) {
        if (!(terms[i].first == o.terms[i].first)) return false;
        if (terms[i].second != o.terms[i].second) return false;
    }
    return true;
}

Field lg_field(const Grid& grid, double wavelength, int l, int p, double waist,
               double z) {
    grid.validate();
    if (p < 0) throw ConfigError("lg_field: radial index p must be >= 0");
    if (!(waist > 0.0)) throw ConfigError("lg_field: waist must be positive");
    if (!(wavelength > 0.0)) throw ConfigError("lg_field: wavelength must be positive");

    const int al = std::abs(l);
    const double zr = pi * waist * waist / wavelength;
    const double w = waist * std::sqrt(1.0 + (z / zr) * (z / zr));
    const double gouy = (2 * p + al + 1) * std::atan(z / zr);
    const double k = 2.0 * pi / wavelength;
    // inverse radius of curvature; zero at the waist
    const double inv_r = (z == 0.0) ? 0.0 : z / (z * z + zr * zr);
    const double norm = std::sqrt(2.0 * factorial_ratio(p, p + al) / pi) / w;

    Field f;
    f.grid = grid;
    f.wavelength = wavelength;
    f.amp.resize(grid.size());
    for (int iy = 0; iy < grid.ny; ++iy) {
        const double y = grid.y(iy);
        for (int ix = 0; ix < grid.nx; ++ix) {
            const double x = grid.x(ix);
            const double r2 = x * x + y * y;
            const double rho = 2.0 * r2 / (w * w);
            double radial = norm * std::exp(-r2 / (w * w)) *
                            std::assoc_laguerre(p, al, rho);
            if (al > 0) radial *= std::pow(std::sqrt(rho), al);
            const double phase = l * std::atan2(y, x) + 0.5 * k * r2 * inv_r - gouy;
            f.amp[static_cast<std::size_t>(iy) * grid.nx + ix] =
                radial * cplx(std::cos(phase), std::sin(phase));
        }
    }

    const double captured = power(f);
    if (captured < 0.999 || captured > 1.001)
        throw ConfigError("lg_field: grid captures only " + std::to_string(captured) +
                          " of unit mode power (l=" + std::to_string(l) +
                          ", p=" + std::to_string(p) + "); enlarge window or refine pitch");
    return f;
}

Field realize(const ModeSpec& spec, const Grid& grid, double wavelength) {
    if (!spec.is_superposition())
        return lg_field(grid, wavelength, spec.l, spec.p, spec.waist);
    double norm2 = 0.0;
    for (const auto& [sub, c] : spec.terms) {
        (void)sub;
        norm2 += std::norm(c);
    }
    if (std::abs(norm2 - 1.0) > 1e-12)
        throw ConfigError("realize: superposition coefficients must be unit-norm, got |c|^2 = " +
                          std::to_string(norm2));
    Field acc;
    bool first = true;
    for (const auto& [sub, c] : spec.terms) {
        Field part = realize(sub, grid, wavelength);
        if (first) {
            acc = std::move(part);
            for (auto& a : acc.amp) a *= c;
            first = false;
        } else {
            acc.check_compatible(part, "realize");
            for (std::size_t i = 0; i < acc.amp.size(); ++i) acc.amp[i] += c * part.amp[i];
        }
    }
    return acc;
}

Field superpose(const std::vector<std::pair<const Field*, cplx>>& terms) {
    if (terms.empty()) throw ConfigError("superpose: no terms");
    Field out;
    out.grid = terms.front().first->grid;
    out.wavelength = terms.front().first->wavelength;
    out.amp.assign(out.grid.size(), cplx(0.0, 0.0));
    for (const auto& [f, c] : terms) {
        f->check_compatible(*terms.front().first, "superpose");
        for (std::size_t i = 0; i < out.amp.size(); ++i) out.amp[i] += c * f->amp[i];
    }
    return out;
}

cplx inner_product(const Field& a, const Field& b) {
    a.check_compatible(b, "inner_product");
    cplx acc(0.0, 0.0);
    for (std::size_t i = 0; i < a.amp.size(); ++i) acc += std::conj(a.amp[i]) * b.amp[i];
    return acc * a.grid.cell_area();
}

double power(const Field& f) {
    double acc = 0.0;
    for (const auto& a : f.amp) acc += std::norm(a);
    return acc * f.grid.cell_area();
}

Basis build_basis(const std::vector<ModeSpec>& specs, const Grid& grid,
                  double wavelength, double tol) {
    if (specs.empty()) throw ConfigError("build_basis: empty spec list");
    for (std::size_t i = 0; i < specs.size(); ++i)
        for (std::size_t j = i + 1; j < specs.size(); ++j)
            if (specs[i] == specs[j])
                throw ConfigError("build_basis: duplicate mode specs at positions " +
                                  std::to_string(i) + " and " + std::to_string(j));

    Basis b;
    b.specs = specs;
    b.fields.reserve(specs.size());
    for (const auto& s : specs) b.fields.push_back(realize(s, grid, wavelength));

    const int d = b.dim();
    b.gram.resize(d, d);
    double worst = 0.0;
    int wi = 0, wj = 0;
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            const cplx g = inner_product(b.fields[i], b.fields[j]);
            b.gram(i, j) = g;
            const double dev = std::abs(g - (i == j ? cplx(1.0) : cplx(0.0)));
            if (dev > worst) {
                worst = dev;
                wi = i;
                wj = j;
            }
        }
    }
    b.max_orthonormality_deviation = worst;
    if (worst > tol)
        throw ConfigError("build_basis: modes " + std::to_string(wi) + " and " +
                          std::to_string(wj) + " deviate from orthonormality by " +
                          std::to_string(worst) + " (tol " + std::to_string(tol) +
                          "); grid cannot support this basis");
    return b;
}

void write_field_csv(const Field& f, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("write_field_csv: cannot open " + path);
    char buf[64];
    for (const auto& a : f.amp) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", a.real(), a.imag());
        out << buf;
    }
    if (!out) throw ConfigError("write_field_csv: write failed for " + path);
}

void write_field_pgm_intensity(const Field& f, const std::string& path) {
    double peak = 0.0;
    for (const auto& a : f.amp) peak = std::max(peak, std::norm(a));
    std::vector<std::uint8_t> px(f.amp.size());
    for (std::size_t i = 0; i < f.amp.size(); ++i)
        px[i] = peak > 0.0
                    ? static_cast<std::uint8_t>(std::lround(std::norm(f.amp[i]) / peak * 255.0))
                    : 0;
    write_pgm(path, f.grid.nx, f.grid.ny, px);
}

void write_field_pgm_phase(const Field& f, const std::string& path) {
    std::vector<std::uint8_t> px(f.amp.size());
    for (std::size_t i = 0; i < f.amp.size(); ++i) {
        double ph = std::arg(f.amp[i]);  // [-pi, pi]
        int v = static_cast<int>(std::floor((ph + pi) / (2.0 * pi) * 256.0));
        px[i] = static_cast<std::uint8_t>(std::clamp(v, 0, 255));
    }
    write_pgm(path, f.grid.nx, f.grid.ny, px);
}

}  // namespace homsim
