#include "homsim/scanlab.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "homsim/rng.hpp"

namespace homsim {

namespace {

double sinc(double x) {
    if (std::abs(x) < 1e-6) return 1.0 - x * x / 6.0;
    return std::sin(x) / x;
}

double sinc_prime(double x) {
    if (std::abs(x) < 1e-4) return -x / 3.0 + x * x * x / 30.0;
    return (std::cos(x) - sinc(x)) / x;
}

double sign_of(InterferenceKind k) {
    return k == InterferenceKind::bump ? 1.0 : -1.0;
}

}  // namespace

double gamma_of_delay(double dt, double d1, double d2) {
    const double g = d2 * dt;
    return sinc(d1 * dt) * std::exp(-g * g);
}

void ScanModel::validate() const {
    if (!(r_classical > 0.0)) throw ConfigError("scan model: R_cl must be positive");
    if (visibility < 0.0 || visibility > 1.0)
        throw ConfigError("scan model: visibility must lie in [0, 1]");
    if (d2 < 0.0) throw ConfigError("scan model: d2 must be non-negative");
    if (sign == InterferenceKind::none && visibility != 0.0)
        throw ConfigError("scan model: sign 'none' requires zero visibility");
    if (points < 2) throw ConfigError("scan model: need at least 2 delay points");
    if (!(delay_stop > delay_start)) throw ConfigError("scan model: empty delay range");
}

std::vector<double> ScanModel::delays() const {
    std::vector<double> d(points);
    for (int i = 0; i < points; ++i)
        d[i] = delay_start + (delay_stop - delay_start) * i / (points - 1);
    return d;
}

double expected_rate(const ScanModel& m, double dt) {
    const double s = m.sign == InterferenceKind::none ? 0.0 : sign_of(m.sign);
    return m.r_classical * (1.0 + s * m.visibility * gamma_of_delay(dt, m.d1, m.d2)) +
           m.slope * dt;
}

void ScanRecord::validate() const {
    const std::size_t n = delays.size();
    if (coincidences.size() != n || singles1.size() != n || singles2.size() != n)
        throw ConfigError("scan record: arrays must have equal length");
    if (!(dwell > 0.0)) throw ConfigError("scan record: dwell must be positive");
    if (window < 0.0) throw ConfigError("scan record: window must be non-negative");
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(delays[i]) || !std::isfinite(coincidences[i]) ||
            !std::isfinite(singles1[i]) || !std::isfinite(singles2[i]))
            throw ConfigError("scan record: non-finite entry at point " + std::to_string(i));
        if (coincidences[i] < 0.0 || singles1[i] < 0.0 || singles2[i] < 0.0)
            throw ConfigError("scan record: negative count at point " + std::to_string(i));
    }
}

ScanRecord synthesize(const ScanModel& m, double singles_rate1, double singles_rate2,
                      double dwell, std::uint64_t seed, const SynthOptions& opt,
                      double window) {
    m.validate();
    if (singles_rate1 < 0.0 || singles_rate2 < 0.0)
        throw ConfigError("synthesize: singles rates must be non-negative");
    if (dwell < 0.0) throw ConfigError("synthesize: dwell must be non-negative");

    ScanRecord rec;
    rec.delays = m.delays();
    rec.dwell = dwell;
    rec.window = window;
    const std::size_t n = rec.delays.size();
    rec.coincidences.resize(n);
    rec.singles1.resize(n);
    rec.singles2.resize(n);

    Rng rng(seed);
    const double s = m.sign == InterferenceKind::none ? 0.0 : sign_of(m.sign);
    for (std::size_t i = 0; i < n; ++i) {
        const double dt = rec.delays[i];
        // linear source decay, shared proportionally by pairs and singles
        const double drift =
            1.0 + opt.drift_fraction * (0.5 - (n > 1 ? double(i) / (n - 1) : 0.0));
        const double structure =
            s * m.r_classical * m.visibility * gamma_of_delay(dt, m.d1, m.d2);
        const double pair_rate = std::max(expected_rate(m, dt) * drift, 0.0);
        const double s1 = std::max((singles_rate1 + opt.singles_dip_fraction * structure) *
                                       drift, 0.0);
        const double s2 = std::max((singles_rate2 + opt.singles_dip_fraction * structure) *
                                       drift, 0.0);
        const double acc = s1 * s2 * window;
        const double mu_c = (pair_rate + acc) * dwell;
        if (opt.noise) {
            rec.coincidences[i] = static_cast<double>(rng.poisson(mu_c));
            rec.singles1[i] = static_cast<double>(rng.poisson(s1 * dwell));
            rec.singles2[i] = static_cast<double>(rng.poisson(s2 * dwell));
        } else {
            rec.coincidences[i] = mu_c;
            rec.singles1[i] = s1 * dwell;
            rec.singles2[i] = s2 * dwell;
        }
    }
    return rec;
}

CorrectedRates correct_accidentals(const ScanRecord& rec) {
    rec.validate();
    CorrectedRates out;
    out.rates.resize(rec.size());
    for (std::size_t i = 0; i < rec.size(); ++i) {
        const double s1 = rec.singles1[i] / rec.dwell;
        const double s2 = rec.singles2[i] / rec.dwell;
        out.rates[i] = rec.coincidences[i] / rec.dwell - s1 * s2 * rec.window;
        if (out.rates[i] < 0.0) out.any_negative = true;
    }
    return out;
}

std::vector<double> drift_factors(const ScanRecord& rec) {
    rec.validate();
    const std::size_t n = rec.size();
    std::vector<double> g(n), factors(n, 1.0);
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        g[i] = std::sqrt(rec.singles1[i] * rec.singles2[i]);
        if (g[i] <= 0.0) return factors;  // no singles information: identity
        mean += g[i] / n;
    }
    for (std::size_t i = 0; i < n; ++i) factors[i] = mean / g[i];
    return factors;
}

CorrectedRates corrected_rates(const ScanRecord& rec) {
    CorrectedRates out = correct_accidentals(rec);
    const std::vector<double> f = drift_factors(rec);
    for (std::size_t i = 0; i < out.rates.size(); ++i) out.rates[i] *= f[i];
    return out;
}

// ---------------------------------------------------------------------------
// fitting

namespace {

struct FitData {
    std::vector<double> t;    // delay, s
    std::vector<double> y;    // corrected rate, counts/s
    std::vector<double> var;  // rate variance, counts^2/s^2
};

double kernel(double x, double d1, double d2) {
    const double g = d2 * x;
    return sinc(d1 * x) * std::exp(-g * g);
}

// model: r = Rcl (1 + s V k(t - t0)) + S (t - t0), params (Rcl, V, d1, d2, S, t0)
void eval_model(const Eigen::VectorXd& p, double sgn, const FitData& d,
                Eigen::VectorXd& r, Eigen::MatrixXd* J) {
    const double rcl = p(0), v = p(1), d1 = p(2), d2 = p(3), sl = p(4), t0 = p(5);
    const std::size_t n = d.t.size();
    for (std::size_t i = 0; i < n; ++i) {
        const double x = d.t[i] - t0;
        const double u = d1 * x;
        const double g = std::exp(-(d2 * x) * (d2 * x));
        const double k = sinc(u) * g;
        r(i) = rcl * (1.0 + sgn * v * k) + sl * x;
        if (J) {
            const double dk_dd1 = x * sinc_prime(u) * g;
            const double dk_dd2 = sinc(u) * g * (-2.0 * d2 * x * x);
            const double dk_dx = d1 * sinc_prime(u) * g - 2.0 * d2 * d2 * x * sinc(u) * g;
            (*J)(i, 0) = 1.0 + sgn * v * k;
            (*J)(i, 1) = sgn * rcl * k;
            (*J)(i, 2) = sgn * rcl * v * dk_dd1;
            (*J)(i, 3) = sgn * rcl * v * dk_dd2;
            (*J)(i, 4) = x;
            (*J)(i, 5) = -(sgn * rcl * v * dk_dx + sl);
        }
    }
}

double chi2_of(const Eigen::VectorXd& r, const FitData& d) {
    double c = 0.0;
    for (std::size_t i = 0; i < d.y.size(); ++i) {
        const double res = d.y[i] - r(i);
        c += res * res / d.var[i];
    }
    return c;
}

struct LmOutcome {
    Eigen::VectorXd p;
    double chi2 = 0.0;
    int iterations = 0;
    bool converged = false;
};

// The parameters differ by ~25 orders of magnitude (rates ~1e2, kernel
// frequencies ~1e13, delays ~1e-12), so the raw normal matrix is numerically
// singular. Every solve and the rank test work on the equilibrated matrix
// D*A*D with D = diag(1/sqrt(A_aa)).
Eigen::VectorXd equilibration(const Eigen::MatrixXd& A) {
    Eigen::VectorXd D(A.rows());
    for (Eigen::Index a = 0; a < A.rows(); ++a)
        D(a) = A(a, a) > 0.0 ? 1.0 / std::sqrt(A(a, a)) : 1.0;
    return D;
}

LmOutcome levenberg_marquardt(const FitData& d, double sgn, Eigen::VectorXd p0,
                              int max_iter) {
    const std::size_t n = d.t.size();
    const int np = 6;
    Eigen::VectorXd r(n);
    Eigen::MatrixXd J(n, np);
    eval_model(p0, sgn, d, r, &J);
    double chi2 = chi2_of(r, d);

    double lambda = 1e-3;
    LmOutcome out{p0, chi2, 0, false};
    int settled = 0;
    for (int it = 0; it < max_iter; ++it) {
        out.iterations = it + 1;
        Eigen::MatrixXd A = Eigen::MatrixXd::Zero(np, np);
        Eigen::VectorXd g = Eigen::VectorXd::Zero(np);
        for (std::size_t i = 0; i < n; ++i) {
            const double w = 1.0 / d.var[i];
            const double res = d.y[i] - r(i);
            for (int a = 0; a < np; ++a) {
                g(a) += w * J(i, a) * res;
                for (int b = a; b < np; ++b) A(a, b) += w * J(i, a) * J(i, b);
            }
        }
        for (int a = 0; a < np; ++a)
            for (int b = 0; b < a; ++b) A(a, b) = A(b, a);
        const Eigen::VectorXd D = equilibration(A);
        const Eigen::MatrixXd As = D.asDiagonal() * A * D.asDiagonal();
        const Eigen::VectorXd gs = D.asDiagonal() * g;

        bool stepped = false;
        for (int tries = 0; tries < 12 && !stepped; ++tries) {
            Eigen::MatrixXd Ad = As;
            for (int a = 0; a < np; ++a) Ad(a, a) += lambda;
            Eigen::VectorXd step = D.asDiagonal() * Ad.ldlt().solve(gs).eval();
            if (!step.allFinite()) {
                lambda *= 10.0;
                continue;
            }
            Eigen::VectorXd pt = out.p + step;
            if (pt(3) < 0.0) pt(3) = -pt(3);  // d2 enters squared
            Eigen::VectorXd rt(n);
            eval_model(pt, sgn, d, rt, nullptr);
            const double ct = chi2_of(rt, d);
            if (std::isfinite(ct) && ct <= chi2) {
                const double gain = chi2 - ct;
                out.p = pt;
                chi2 = ct;
                r = rt;
                lambda = std::max(lambda / 3.0, 1e-12);
                stepped = true;
                if (gain < 1e-10 * (1.0 + chi2)) {
                    ++settled;
                } else {
                    settled = 0;
                }
            } else {
                lambda *= 10.0;
            }
        }
        if (!stepped) {
            // no downhill direction left at high damping: local optimum
            out.converged = true;
            break;
        }
        if (settled >= 2) {
            out.converged = true;
            break;
        }
        eval_model(out.p, sgn, d, r, &J);
    }
    out.chi2 = chi2;
    return out;
}

struct InitialGuess {
    double rcl, v, d1, d2, slope;
    std::vector<double> t0_candidates;
    double sign;       // +1 bump, -1 dip
    double t_ext;      // extremum location
    double depth;      // largest excursion from the edge baseline
    double depth_var;  // counting variance at that point
};

InitialGuess make_guess(const FitData& d, const FitOptions& opt) {
    const std::size_t n = d.t.size();
    const std::size_t ne = std::max<std::size_t>(2, n / 6);

    // baseline line through the scan edges
    double sx = 0, sy = 0, sxx = 0, sxy = 0, m = 0;
    auto add = [&](std::size_t i) {
        sx += d.t[i];
        sy += d.y[i];
        sxx += d.t[i] * d.t[i];
        sxy += d.t[i] * d.y[i];
        m += 1.0;
    };
    for (std::size_t i = 0; i < ne; ++i) add(i);
    for (std::size_t i = n - ne; i < n; ++i) add(i);
    const double det = m * sxx - sx * sx;
    double b = det != 0.0 ? (m * sxy - sx * sy) / det : 0.0;
    double a = (sy - b * sx) / m;

    std::size_t iext = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dev = std::abs(d.y[i] - (a + b * d.t[i]));
        if (dev > best) {
            best = dev;
            iext = i;
        }
    }
    const double dev_ext = d.y[iext] - (a + b * d.t[iext]);

    InitialGuess g;
    g.t_ext = d.t[iext];
    g.depth = std::abs(dev_ext);
    g.depth_var = d.var[iext];
    g.sign = opt.sign == FitSign::automatic ? (dev_ext >= 0.0 ? 1.0 : -1.0)
                                            : (opt.sign == FitSign::bump ? 1.0 : -1.0);
    g.slope = b;
    g.rcl = std::max(a + b * g.t_ext, 1e-12);
    g.v = std::clamp(std::abs(dev_ext) / g.rcl, 0.02, 1.0);

    // crude width from the half-depth crossings around the extremum
    const double half = std::abs(dev_ext) / 2.0;
    double tl = d.t.front(), tr = d.t.back();
    for (std::size_t i = iext; i-- > 0;) {
        if (std::abs(d.y[i] - (a + b * d.t[i])) < half) {
            tl = d.t[i];
            break;
        }
    }
    for (std::size_t i = iext + 1; i < n; ++i) {
        if (std::abs(d.y[i] - (a + b * d.t[i])) < half) {
            tr = d.t[i];
            break;
        }
    }
    double width = tr - tl;
    const double span = d.t.back() - d.t.front();
    if (!(width > 0.0) || width > 0.9 * span) width = span / 4.0;

    g.d1 = opt.d1_init > 0.0 ? opt.d1_init : 2.8 / width;
    g.d2 = opt.d2_init > 0.0 ? opt.d2_init : g.d1 / 4.0;
    g.t0_candidates = {g.t_ext, g.t_ext - width / 4.0, g.t_ext + width / 4.0,
                       0.5 * (d.t.front() + d.t.back())};
    return g;
}

// fallback when the kernel shape carries no information (V ~ 0): freeze the
// kernel and solve the remaining linear problem in (Rcl, Rcl*V, slope)
void linear_fixed_kernel_fit(const FitData& d, const InitialGuess& g, FitResult& fr) {
    const std::size_t n = d.t.size();
    Eigen::MatrixXd X(n, 3);
    Eigen::VectorXd y(n), w(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = d.t[i] - g.t_ext;
        X(i, 0) = 1.0;
        X(i, 1) = g.sign * kernel(x, g.d1, g.d2);
        X(i, 2) = x;
        y(i) = d.y[i];
        w(i) = 1.0 / d.var[i];
    }
    Eigen::MatrixXd A = X.transpose() * w.asDiagonal() * X;
    Eigen::VectorXd rhs = X.transpose() * w.asDiagonal() * y;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(A);
    Eigen::VectorXd beta = ldlt.solve(rhs);
    Eigen::MatrixXd cov = ldlt.solve(Eigen::MatrixXd::Identity(3, 3));

    fr.r_classical = beta(0);
    const double v = beta(0) != 0.0 ? beta(1) / beta(0) : 0.0;
    fr.visibility = v;
    fr.d1 = g.d1;
    fr.d2 = g.d2;
    fr.slope = beta(2);
    fr.delay_offset = g.t_ext;
    fr.err_r_classical = std::sqrt(std::max(cov(0, 0), 0.0));
    // delta method for the ratio beta1/beta0
    const double b0 = beta(0), b1 = beta(1);
    if (b0 != 0.0) {
        const double var_v = cov(1, 1) / (b0 * b0) +
                             b1 * b1 * cov(0, 0) / (b0 * b0 * b0 * b0) -
                             2.0 * b1 * cov(0, 1) / (b0 * b0 * b0);
        fr.err_visibility = std::sqrt(std::max(var_v, 0.0));
    }
    fr.err_slope = std::sqrt(std::max(cov(2, 2), 0.0));
    fr.err_d1 = fr.err_d2 = fr.err_delay_offset = 0.0;

    Eigen::VectorXd r = X * beta;
    double chi2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double res = y(i) - r(i);
        chi2 += res * res * w(i);
    }
    fr.residual_norm = std::sqrt(chi2);
    fr.reduced_chi2 = n > 3 ? chi2 / (n - 3) : 0.0;
    fr.converged = true;
    fr.kernel_degenerate = true;
}

FitResult& clamp_visibility(FitResult& fr) {
    if (fr.visibility < -0.05) {
        fr.visibility = -0.05;
        fr.visibility_clamped = true;
    } else if (fr.visibility > 1.05) {
        fr.visibility = 1.05;
        fr.visibility_clamped = true;
    }
    return fr;
}

}  // namespace

FitResult fit_scan(const ScanRecord& rec, const FitOptions& opt) {
    rec.validate();
    const std::size_t n = rec.size();
    if (n < 8) throw ConfigError("fit_scan: need at least 8 delay points");

    CorrectedRates corr =
        opt.drift_correction ? corrected_rates(rec) : correct_accidentals(rec);

    FitData d;
    d.t = rec.delays;
    d.y = corr.rates;
    d.var.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        d.var[i] = std::max(rec.coincidences[i], 1.0) / (rec.dwell * rec.dwell);

    double yspread = 0.0;
    for (std::size_t i = 1; i < n; ++i) yspread = std::max(yspread, std::abs(d.y[i] - d.y[0]));
    if (!(yspread >= 0.0) || !std::isfinite(yspread))
        throw NumericError("fit_scan: corrected rates are not finite");

    const InitialGuess g = make_guess(d, opt);

    FitResult fr;
    fr.negative_corrected_rates = corr.any_negative;
    fr.sign = g.sign > 0 ? InterferenceKind::bump : InterferenceKind::dip;

    // A flat scan has no curvature to fit: the largest of ~n noise excursions
    // sits near 3 sigma, while genuine interference structure at practical
    // count rates clears 5 sigma by an order of magnitude.
    if (g.depth * g.depth < 25.0 * g.depth_var) {
        linear_fixed_kernel_fit(d, g, fr);
        return clamp_visibility(fr);
    }

    LmOutcome best;
    best.chi2 = std::numeric_limits<double>::infinity();
    for (double t0 : g.t0_candidates) {
        Eigen::VectorXd p0(6);
        p0 << g.rcl, g.v, g.d1, g.d2, g.slope, t0;
        LmOutcome o = levenberg_marquardt(d, g.sign, p0, opt.max_iterations);
        if (o.chi2 < best.chi2) best = o;
    }
    if (!best.p.allFinite())
        throw NumericError("fit_scan: optimizer diverged");

    // Observed-count weights overweight downward fluctuations, biasing deep
    // dips high; refit once with variances predicted by the fitted model.
    Eigen::VectorXd rm(n);
    eval_model(best.p, g.sign, d, rm, nullptr);
    for (std::size_t i = 0; i < n; ++i) {
        const double acc =
            rec.singles1[i] / rec.dwell * (rec.singles2[i] / rec.dwell) * rec.window;
        d.var[i] = std::max((rm(i) + acc) * rec.dwell, 1.0) / (rec.dwell * rec.dwell);
    }
    best = levenberg_marquardt(d, g.sign, best.p, opt.max_iterations);
    if (!best.p.allFinite())
        throw NumericError("fit_scan: optimizer diverged");

    // covariance from the unscaled normal matrix at the optimum
    Eigen::VectorXd r(n);
    Eigen::MatrixXd J(n, 6);
    eval_model(best.p, g.sign, d, r, &J);
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(6, 6);
    for (std::size_t i = 0; i < n; ++i) {
        const double w = 1.0 / d.var[i];
        for (int a = 0; a < 6; ++a)
            for (int b = 0; b < 6; ++b) A(a, b) += w * J(i, a) * J(i, b);
    }
    const Eigen::VectorXd D = equilibration(A);
    const Eigen::MatrixXd As = D.asDiagonal() * A * D.asDiagonal();
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(As);
    cod.setThreshold(1e-10);
    bool diag_ok = true;
    for (int a = 0; a < 6; ++a) diag_ok = diag_ok && A(a, a) > 0.0;
    if (!diag_ok || cod.rank() < 6) {
        linear_fixed_kernel_fit(d, g, fr);
    } else {
        Eigen::MatrixXd cov =
            D.asDiagonal() * cod.pseudoInverse() * D.asDiagonal();
        fr.r_classical = best.p(0);
        fr.visibility = best.p(1);
        fr.d1 = std::abs(best.p(2));  // kernel is even in d1
        fr.d2 = std::abs(best.p(3));
        fr.slope = best.p(4);
        fr.delay_offset = best.p(5);
        auto err = [&cov](int i) { return std::sqrt(std::max(cov(i, i), 0.0)); };
        fr.err_r_classical = err(0);
        fr.err_visibility = err(1);
        fr.err_d1 = err(2);
        fr.err_d2 = err(3);
        fr.err_slope = err(4);
        fr.err_delay_offset = err(5);
        fr.residual_norm = std::sqrt(best.chi2);
        fr.reduced_chi2 = n > 6 ? best.chi2 / (n - 6) : 0.0;
        fr.iterations = best.iterations;
        fr.converged = best.converged;
    }

    return clamp_visibility(fr);
}

WitnessResult witness(const std::array<double, 3>& vis, const std::array<double, 3>& err,
                      double k_sigma) {
    if (k_sigma < 0.0) throw ConfigError("witness: k_sigma must be non-negative");
    WitnessResult w;
    w.visibilities = vis;
    w.errors = err;
    w.k_sigma = k_sigma;
    double var = 0.0;
    for (int i = 0; i < 3; ++i) {
        if (!std::isfinite(vis[i]) || !std::isfinite(err[i]) || err[i] < 0.0)
            throw ConfigError("witness: bad visibility/error input");
        w.w += std::abs(vis[i]);
        var += err[i] * err[i];
    }
    w.w_error = std::sqrt(var);
    w.entangled = (w.w - 1.0) > k_sigma * w.w_error;
    return w;
}

WitnessResult witness_from_counts(const std::array<std::array<double, 4>, 3>& counts,
                                  double k_sigma) {
    std::array<double, 3> vis{}, err{};
    for (int b = 0; b < 3; ++b) {
        const auto& c = counts[b];  // (N11, N12, N21, N22)
        for (double v : c)
            if (!(v >= 0.0) || !std::isfinite(v))
                throw ConfigError("witness_from_counts: counts must be non-negative");
        const double corr = c[0] + c[3];
        const double anti = c[1] + c[2];
        const double total = corr + anti;
        if (total <= 0.0)
            throw ConfigError("witness_from_counts: basis " + std::to_string(b) +
                              " has no counts");
        vis[b] = (corr - anti) / total;
        err[b] = std::sqrt(4.0 * corr * anti / (total * total * total));
    }
    return witness(vis, err, k_sigma);
}

double singles_dip_ratio(const ScanRecord& rec) {
    // drift correction off: singles carrying the structure would corrupt it
    FitOptions opt;
    opt.drift_correction = false;
    const FitResult cf = fit_scan(rec, opt);

    const double depth = cf.r_classical * std::abs(cf.visibility);
    const double sigma_depth = std::hypot(cf.r_classical * cf.err_visibility,
                                          cf.visibility * cf.err_r_classical);
    if (cf.kernel_degenerate || std::abs(cf.visibility) < 0.02 || depth < 2.0 * sigma_depth)
        return 0.0;

    const double sgn = sign_of(cf.sign);
    const std::size_t n = rec.size();
    double depth_sum = 0.0;
    for (int arm = 0; arm < 2; ++arm) {
        const std::vector<double>& counts = arm == 0 ? rec.singles1 : rec.singles2;
        Eigen::MatrixXd X(n, 3);
        Eigen::VectorXd y(n), w(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double x = rec.delays[i] - cf.delay_offset;
            X(i, 0) = 1.0;
            X(i, 1) = kernel(x, cf.d1, cf.d2);
            X(i, 2) = x;
            y(i) = counts[i] / rec.dwell;
            w(i) = 1.0 / (std::max(counts[i], 1.0) / (rec.dwell * rec.dwell));
        }
        Eigen::MatrixXd A = X.transpose() * w.asDiagonal() * X;
        Eigen::VectorXd beta = A.ldlt().solve(X.transpose() * w.asDiagonal() * y);
        // project the singles structure onto the coincidence direction
        depth_sum += sgn * beta(1);
    }
    return (depth_sum / 2.0) / depth;
}

// ---------------------------------------------------------------------------
// persistence

std::string sidecar_path(const std::string& csv_path) {
    const std::string suffix = ".csv";
    if (csv_path.size() > suffix.size() &&
        csv_path.compare(csv_path.size() - suffix.size(), suffix.size(), suffix) == 0)
        return csv_path.substr(0, csv_path.size() - suffix.size()) + ".meta.json";
    return csv_path + ".meta.json";
}

void write_scan_csv(const ScanRecord& rec, const std::string& csv_path) {
    rec.validate();
    std::ofstream out(csv_path);
    if (!out) throw ConfigError("write_scan_csv: cannot open " + csv_path);
    out << "delay_s,coinc,singles1,singles2\n";
    char buf[160];
    for (std::size_t i = 0; i < rec.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g\n", rec.delays[i],
                      rec.coincidences[i], rec.singles1[i], rec.singles2[i]);
        out << buf;
    }
    if (!out) throw ConfigError("write_scan_csv: write failed for " + csv_path);

    std::ofstream meta(sidecar_path(csv_path));
    if (!meta) throw ConfigError("write_scan_csv: cannot open " + sidecar_path(csv_path));
    char mbuf[96];
    std::snprintf(mbuf, sizeof(mbuf), "{\n  \"dwell\": %.17g,\n  \"window\": %.17g\n}\n",
                  rec.dwell, rec.window);
    meta << mbuf;
}

ScanRecord read_scan_csv(const std::string& csv_path) {
    std::ifstream in(csv_path);
    if (!in) throw ConfigError("read_scan_csv: cannot open " + csv_path);
    std::string line;
    if (!std::getline(in, line) || line.rfind("delay_s,coinc,singles1,singles2", 0) != 0)
        throw ConfigError("read_scan_csv: missing header in " + csv_path);
    ScanRecord rec;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        double a, b, c, d;
        if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf", &a, &b, &c, &d) != 4)
            throw ConfigError("read_scan_csv: bad row at line " + std::to_string(lineno) +
                              " of " + csv_path);
        rec.delays.push_back(a);
        rec.coincidences.push_back(b);
        rec.singles1.push_back(c);
        rec.singles2.push_back(d);
    }

    std::ifstream meta(sidecar_path(csv_path));
    if (!meta)
        throw ConfigError("read_scan_csv: missing sidecar " + sidecar_path(csv_path));
    std::stringstream ss;
    ss << meta.rdbuf();
    const std::string text = ss.str();
    auto find_number = [&text](const char* key) {
        const std::string k = "\"" + std::string(key) + "\"";
        const std::size_t at = text.find(k);
        if (at == std::string::npos)
            throw ConfigError(std::string("read_scan_csv: sidecar missing ") + key);
        const std::size_t colon = text.find(':', at);
        return std::stod(text.substr(colon + 1));
    };
    rec.dwell = find_number("dwell");
    rec.window = find_number("window");
    rec.validate();
    return rec;
}

void write_corrected_csv(const ScanRecord& rec, const std::string& csv_path) {
    const CorrectedRates corr = corrected_rates(rec);
    std::ofstream out(csv_path);
    if (!out) throw ConfigError("write_corrected_csv: cannot open " + csv_path);
    out << "delay_s,rate_corrected\n";
    char buf[96];
    for (std::size_t i = 0; i < rec.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", rec.delays[i], corr.rates[i]);
        out << buf;
    }
}

}  // namespace homsim
