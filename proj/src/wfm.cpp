#include "homsim/wfm.hpp"

#include <cmath>

namespace homsim {

namespace {

void check_unitary(const Eigen::MatrixXcd& U) {
    if (U.rows() != U.cols()) throw ConfigError("wavefront_match: U must be square");
    const double dev = (U.adjoint() * U - Eigen::MatrixXcd::Identity(U.rows(), U.cols()))
                           .cwiseAbs()
                           .maxCoeff();
    if (dev > 1e-10)
        throw ConfigError("wavefront_match: U is not unitary (deviation " +
                          std::to_string(dev) + ")");
}

}  // namespace

std::pair<MplcDesign, WfmReport> wavefront_match(const Basis& input,
                                                 const Eigen::MatrixXcd& U,
                                                 const WfmConfig& cfg) {
    if (input.dim() == 0) throw ConfigError("wavefront_match: empty basis");
    if (U.rows() != input.dim())
        throw ConfigError("wavefront_match: U dimension does not match basis");
    check_unitary(U);
    if (cfg.planes < 1) throw ConfigError("wavefront_match: need at least one plane");
    if (cfg.planes > 1 && !(cfg.spacing > 0.0))
        throw ConfigError("wavefront_match: spacing must be positive");
    if (cfg.sweeps < 1) throw ConfigError("wavefront_match: sweeps must be >= 1");

    const Grid grid = input.fields.front().grid;
    const double lambda0 = input.fields.front().wavelength;
    std::vector<double> lambdas = cfg.wavelengths;
    if (lambdas.empty()) lambdas.push_back(lambda0);
    for (double wl : lambdas)
        if (!(wl > 0.0)) throw ConfigError("wavefront_match: bad design wavelength");

    const int d = input.dim();
    const int nl = static_cast<int>(lambdas.size());
    const int np = cfg.planes;
    const std::size_t npix = grid.size();

    MplcDesign design;
    design.grid = grid;
    design.wavelength = lambda0;
    design.design_wavelengths = lambdas;
    design.spacing = cfg.spacing;
    design.input_specs = input.specs;
    design.output_specs = input.specs;  // projection basis at the output plane
    design.target = U;
    design.planes.assign(np, PhasePlane{grid, std::vector<std::uint8_t>(npix, 0), 1.0});

    // z = 0 profiles are wavelength independent; tag copies per lambda so the
    // propagator picks the right kernel.
    auto at_lambda = [&](const Field& f, double wl) {
        Field g = f;
        g.wavelength = wl;
        return g;
    };

    // targets: column m of U combined over the output basis fields
    std::vector<Field> targets(d);
    for (int m = 0; m < d; ++m) {
        std::vector<std::pair<const Field*, cplx>> terms;
        for (int i = 0; i < d; ++i) terms.emplace_back(&input.fields[i], U(i, m));
        targets[m] = superpose(terms);
    }

    WfmReport report;
    auto idx = [d](int m, int il) { return il * d + m; };
    std::vector<Field> fwd(static_cast<std::size_t>(d) * nl);
    // back[k][m,lambda]: target propagated backwards to just after plane k's input side
    std::vector<std::vector<Field>> back(np,
                                         std::vector<Field>(static_cast<std::size_t>(d) * nl));
    std::vector<double> raw_phase(npix);

    for (int sweep = 0; sweep < cfg.sweeps; ++sweep) {
        // backward cascade with the planes as they stand at sweep start;
        // plane k's update only needs back fields through planes > k, which
        // are untouched until after k is written
        for (int il = 0; il < nl; ++il) {
            for (int m = 0; m < d; ++m) {
                Field b = at_lambda(targets[m], lambdas[il]);
                back[np - 1][idx(m, il)] = b;
                for (int k = np - 2; k >= 0; --k) {
                    b = apply_plane_adjoint(back[k + 1][idx(m, il)], design.planes[k + 1]);
                    b = propagate(b, -cfg.spacing);
                    back[k][idx(m, il)] = b;
                }
            }
        }

        for (int il = 0; il < nl; ++il)
            for (int m = 0; m < d; ++m)
                fwd[idx(m, il)] = at_lambda(input.fields[m], lambdas[il]);

        double sweep_eff = 0.0;
        std::vector<double> lambda_eff(nl, 0.0);
        for (int k = 0; k < np; ++k) {
            // overlap map with each mode referenced to its current net
            // transmission phase
            std::vector<cplx> overlap(npix, cplx(0.0, 0.0));
            for (int il = 0; il < nl; ++il) {
                for (int m = 0; m < d; ++m) {
                    const Field& F = fwd[idx(m, il)];
                    const Field bp = apply_plane(F, design.planes[k]);
                    const cplx t = inner_product(back[k][idx(m, il)], bp);
                    const double mag = std::abs(t);
                    const cplx ref = mag > 1e-300 ? t / mag : cplx(1.0, 0.0);
                    const std::vector<cplx>& B = back[k][idx(m, il)].amp;
                    for (std::size_t i = 0; i < npix; ++i)
                        overlap[i] += std::conj(ref) * std::conj(B[i]) * F.amp[i];
                }
            }
            for (std::size_t i = 0; i < npix; ++i) {
                const cplx o = overlap[i];
                raw_phase[i] = (std::norm(o) > 0.0) ? -std::arg(o) : 0.0;
            }
            design.planes[k].levels = quantize_phase(raw_phase);

            for (int il = 0; il < nl; ++il) {
                for (int m = 0; m < d; ++m) {
                    Field& F = fwd[idx(m, il)];
                    F = apply_plane(F, design.planes[k]);
                    if (k == np - 1) {
                        const cplx t = inner_product(back[k][idx(m, il)], F);
                        lambda_eff[il] += std::norm(t) / d;
                    } else {
                        F = propagate(F, cfg.spacing);
                    }
                }
            }
        }
        for (int il = 0; il < nl; ++il) sweep_eff += lambda_eff[il] / nl;
        report.sweep_efficiency.push_back(sweep_eff);
        report.sweeps_run = sweep + 1;
        if (cfg.stop_efficiency > 0.0 && sweep_eff >= cfg.stop_efficiency) break;
    }

    report.final_efficiency = report.sweep_efficiency.back();
    {
        // recompute the per-wavelength breakdown from the finished design
        for (int il = 0; il < nl; ++il) {
            double eff = 0.0;
            for (int m = 0; m < d; ++m) {
                const Field out = apply_mplc(design, at_lambda(input.fields[m], lambdas[il]));
                const Field tgt = at_lambda(targets[m], lambdas[il]);
                eff += std::norm(inner_product(tgt, out)) / d;
            }
            report.wavelength_efficiency.emplace_back(lambdas[il], eff);
        }
    }
    return {std::move(design), report};
}

std::vector<TransferMetrics> bandwidth_scan(const MplcDesign& d,
                                            const std::vector<double>& wavelengths) {
    if (wavelengths.empty()) throw ConfigError("bandwidth_scan: no wavelengths");
    std::vector<TransferMetrics> out;
    out.reserve(wavelengths.size());
    for (double wl : wavelengths) out.push_back(transfer_matrix(d, wl));
    return out;
}

}  // namespace homsim
