#include "homsim/freespace.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>

#include "homsim/fft.hpp"
#include "homsim/jsonio.hpp"
#include "homsim/pgm.hpp"

namespace homsim {

namespace {

// Transfer kernels recur thousands of times with identical parameters during
// WFM, so cache them. Key on exact doubles: callers pass the same bit
// patterns when they mean the same kernel.
struct KernelKey {
    int nx, ny;
    double dx, dy, wavelength, distance;
    bool operator<(const KernelKey& o) const {
        return std::tie(nx, ny, dx, dy, wavelength, distance) <
               std::tie(o.nx, o.ny, o.dx, o.dy, o.wavelength, o.distance);
    }
};

std::shared_ptr<const std::vector<cplx>> get_kernel(const Grid& g, double wavelength,
                                                    double distance) {
    static std::mutex mutex;
    static std::map<KernelKey, std::shared_ptr<const std::vector<cplx>>> cache;
    const KernelKey key{g.nx, g.ny, g.dx, g.dy, wavelength, distance};
    {
        std::lock_guard<std::mutex> lock(mutex);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }
    const double k = 2.0 * pi / wavelength;
    const double k2 = k * k;
    auto kern = std::make_shared<std::vector<cplx>>(g.size());
    for (int iy = 0; iy < g.ny; ++iy) {
        const int fy = iy <= g.ny / 2 ? iy : iy - g.ny;
        const double ky = 2.0 * pi * fy / (g.ny * g.dy);
        for (int ix = 0; ix < g.nx; ++ix) {
            const int fx = ix <= g.nx / 2 ? ix : ix - g.nx;
            const double kx = 2.0 * pi * fx / (g.nx * g.dx);
            const double kz2 = k2 - kx * kx - ky * ky;
            cplx& out = (*kern)[static_cast<std::size_t>(iy) * g.nx + ix];
            if (kz2 <= 0.0) {
                out = cplx(0.0, 0.0);  // evanescent, dropped for either sign of distance
            } else {
                const double ph = std::sqrt(kz2) * distance;
                out = cplx(std::cos(ph), std::sin(ph));
            }
        }
    }
    std::lock_guard<std::mutex> lock(mutex);
    if (cache.size() > 128) cache.clear();
    cache[key] = kern;
    return kern;
}

json plane_meta(const MplcDesign& d) {
    json meta;
    meta["format"] = "homsim-mplc-design";
    meta["version"] = 1;
    meta["grid"] = to_json(d.grid);
    meta["wavelength"] = d.wavelength;
    meta["design_wavelengths"] = d.design_wavelengths;
    meta["spacing"] = d.spacing;
    meta["planes"] = static_cast<int>(d.planes.size());
    json effs = json::array();
    for (const auto& p : d.planes) effs.push_back(p.efficiency);
    meta["plane_efficiencies"] = effs;
    json ins = json::array(), outs = json::array();
    for (const auto& s : d.input_specs) ins.push_back(to_json(s));
    for (const auto& s : d.output_specs) outs.push_back(to_json(s));
    meta["input_modes"] = ins;
    meta["output_modes"] = outs;
    meta["target_unitary"] = to_json(d.target);
    return meta;
}

}  // namespace

Field propagate(const Field& f, double distance) {
    f.grid.validate();
    if (!(f.wavelength > 0.0)) throw ConfigError("propagate: field has no wavelength");
    Field out = f;
    if (distance == 0.0) return out;
    auto kern = get_kernel(f.grid, f.wavelength, distance);
    fft::forward(f.grid.nx, f.grid.ny, out.amp.data());
    for (std::size_t i = 0; i < out.amp.size(); ++i) out.amp[i] *= (*kern)[i];
    fft::inverse(f.grid.nx, f.grid.ny, out.amp.data());
    return out;
}

std::vector<std::uint8_t> quantize_phase(const std::vector<double>& phase) {
    std::vector<std::uint8_t> levels(phase.size());
    for (std::size_t i = 0; i < phase.size(); ++i) {
        double m = std::fmod(phase[i], 2.0 * pi);
        if (m < 0.0) m += 2.0 * pi;
        levels[i] = static_cast<std::uint8_t>(std::lround(m / (2.0 * pi) * 256.0) & 255);
    }
    return levels;
}

Field apply_plane(const Field& f, const PhasePlane& plane) {
    if (f.grid != plane.grid) throw ConfigError("apply_plane: grid mismatch");
    Field out = f;
    for (std::size_t i = 0; i < out.amp.size(); ++i) {
        const double ph = PhasePlane::phase_of_level(plane.levels[i]);
        out.amp[i] *= plane.efficiency * cplx(std::cos(ph), std::sin(ph));
    }
    return out;
}

Field apply_plane_adjoint(const Field& f, const PhasePlane& plane) {
    if (f.grid != plane.grid) throw ConfigError("apply_plane_adjoint: grid mismatch");
    Field out = f;
    for (std::size_t i = 0; i < out.amp.size(); ++i) {
        const double ph = PhasePlane::phase_of_level(plane.levels[i]);
        out.amp[i] *= cplx(std::cos(ph), -std::sin(ph));
    }
    return out;
}

void MplcDesign::validate() const {
    grid.validate();
    if (planes.empty()) throw ConfigError("design: needs at least one plane");
    if (planes.size() > 1 && !(spacing > 0.0))
        throw ConfigError("design: spacing must be positive with multiple planes");
    if (!(wavelength > 0.0)) throw ConfigError("design: wavelength must be positive");
    if (input_specs.empty() || input_specs.size() != output_specs.size())
        throw ConfigError("design: input/output spec lists must be non-empty and equal length");
    for (const auto& p : planes) {
        if (p.grid != grid) throw ConfigError("design: plane grid mismatch");
        if (p.levels.size() != grid.size()) throw ConfigError("design: plane level count mismatch");
    }
    const int d = dim();
    if (target.rows() != d || target.cols() != d)
        throw ConfigError("design: target unitary dimension mismatch");
}

Field apply_mplc(const MplcDesign& d, const Field& in) {
    if (in.grid != d.grid) throw ConfigError("apply_mplc: field grid mismatch");
    Field f = apply_plane(in, d.planes[0]);
    for (std::size_t k = 1; k < d.planes.size(); ++k) {
        f = propagate(f, d.spacing);
        f = apply_plane(f, d.planes[k]);
    }
    return f;
}

TransferMetrics transfer_matrix(const MplcDesign& d, double wavelength) {
    d.validate();
    if (!(wavelength > 0.0)) throw ConfigError("transfer_matrix: wavelength must be positive");
    const int n = d.dim();
    std::vector<Field> ins, outs;
    ins.reserve(n);
    outs.reserve(n);
    for (const auto& s : d.input_specs) ins.push_back(realize(s, d.grid, wavelength));
    for (const auto& s : d.output_specs) outs.push_back(realize(s, d.grid, wavelength));

    TransferMetrics m;
    m.wavelength = wavelength;
    m.transfer.resize(n, n);
    for (int i = 0; i < n; ++i) {
        const Field sys = apply_mplc(d, ins[i]);
        for (int j = 0; j < n; ++j) m.transfer(j, i) = inner_product(outs[j], sys);
    }

    const Eigen::MatrixXcd ut = d.target.adjoint() * m.transfer;
    m.mode_efficiency.resize(n);
    m.target_efficiency.resize(n);
    double lost = 0.0, crosstalk = 0.0;
    for (int i = 0; i < n; ++i) {
        m.mode_efficiency[i] = m.transfer.col(i).squaredNorm();
        m.target_efficiency[i] = std::norm(ut(i, i));
        m.mean_mode_efficiency += m.mode_efficiency[i] / n;
        m.mean_target_efficiency += m.target_efficiency[i] / n;
        lost += 1.0 - m.target_efficiency[i];
        crosstalk += m.mode_efficiency[i] - m.target_efficiency[i];
    }
    m.mode_independent_loss = 1.0 - m.mean_mode_efficiency;
    m.in_space_error = lost > 1e-15 ? crosstalk / lost : 0.0;

    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m.transfer);
    m.max_singular_value = svd.singularValues()(0);
    if (m.max_singular_value > 1.0 + 1e-9)
        throw NumericError("transfer_matrix: passivity violated, max singular value " +
                           std::to_string(m.max_singular_value));
    return m;
}

void save_design(const MplcDesign& d, const std::string& dir) {
    d.validate();
    std::filesystem::create_directories(dir);
    const std::filesystem::path base(dir);
    {
        std::ofstream out(base / "design.json");
        if (!out) throw ConfigError("save_design: cannot write " + (base / "design.json").string());
        out << plane_meta(d).dump(2) << "\n";
    }
    for (std::size_t k = 0; k < d.planes.size(); ++k)
        write_pgm((base / ("plane_" + std::to_string(k) + ".pgm")).string(), d.grid.nx,
                  d.grid.ny, d.planes[k].levels);
}

MplcDesign load_design(const std::string& dir) {
    const std::filesystem::path base(dir);
    std::ifstream in(base / "design.json");
    if (!in) throw ConfigError("load_design: cannot open " + (base / "design.json").string());
    json meta;
    try {
        meta = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("load_design: bad design.json: " + std::string(e.what()));
    }
    if (meta.value("format", "") != "homsim-mplc-design")
        throw ConfigError("load_design: not a design directory: " + dir);

    MplcDesign d;
    d.grid = grid_from_json(meta.at("grid"));
    d.wavelength = meta.at("wavelength").get<double>();
    d.design_wavelengths = meta.at("design_wavelengths").get<std::vector<double>>();
    d.spacing = meta.at("spacing").get<double>();
    for (const auto& s : meta.at("input_modes")) d.input_specs.push_back(modespec_from_json(s));
    for (const auto& s : meta.at("output_modes")) d.output_specs.push_back(modespec_from_json(s));
    d.target = matrix_from_json(meta.at("target_unitary"));

    const int nplanes = meta.at("planes").get<int>();
    const auto effs = meta.at("plane_efficiencies").get<std::vector<double>>();
    if (static_cast<int>(effs.size()) != nplanes)
        throw ConfigError("load_design: plane_efficiencies length mismatch");
    for (int k = 0; k < nplanes; ++k) {
        PhasePlane p;
        p.grid = d.grid;
        p.efficiency = effs[k];
        int w = 0, h = 0;
        p.levels = read_pgm((base / ("plane_" + std::to_string(k) + ".pgm")).string(), w, h);
        if (w != d.grid.nx || h != d.grid.ny)
            throw ConfigError("load_design: plane_" + std::to_string(k) + ".pgm size mismatch");
        d.planes.push_back(std::move(p));
    }
    d.validate();
    return d;
}

}  // namespace homsim
