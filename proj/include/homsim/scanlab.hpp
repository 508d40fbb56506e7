#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "homsim/biphoton.hpp"
#include "homsim/common.hpp"

namespace homsim {

// Wavepacket indistinguishability at relative delay dt:
//   gamma = sinc(d1*dt) * exp(-(d2*dt)^2),  sinc(x) = sin(x)/x (unnormalized)
// gamma(0) = 1, even in dt, range [min sinc ~ -0.217, 1].
double gamma_of_delay(double dt, double d1, double d2);

// Coincidence-rate model fitted to delay scans:
//   R(dt) = R_cl * (1 +/- V * gamma(dt)) + S * dt
struct ScanModel {
    double r_classical = 0.0;                    // counts/s
    double visibility = 0.0;                     // [0, 1]
    InterferenceKind sign = InterferenceKind::dip;
    double d1 = 0.0, d2 = 0.0;                   // 1/s
    double slope = 0.0;                          // counts/s per s of delay
    double delay_start = 0.0, delay_stop = 0.0;  // s
    int points = 0;
    void validate() const;
    std::vector<double> delays() const;          // uniform grid over the range
};

double expected_rate(const ScanModel& m, double dt);

// Raw counts of one delay scan. Counts are per dwell; singles rates are
// counts/dwell in each arm; window is the coincidence gate.
struct ScanRecord {
    std::vector<double> delays;                  // s
    std::vector<double> coincidences;            // counts per dwell
    std::vector<double> singles1, singles2;      // counts per dwell
    double dwell = 1.0;                          // s
    double window = 1e-9;                        // s
    void validate() const;
    std::size_t size() const { return delays.size(); }
};

struct SynthOptions {
    bool noise = true;               // Poisson counts; false writes exact means
    double drift_fraction = 0.0;     // linear fractional rate change start->end (pairs and singles)
    double singles_dip_fraction = 0.0;  // per-arm singles depth as a fraction of the
                                        // coincidence interference depth
};

// Monte-Carlo twin of a scan: accidentals singles1*singles2*window are added
// to the coincidence mean before sampling. Deterministic per seed.
ScanRecord synthesize(const ScanModel& m, double singles_rate1, double singles_rate2,
                      double dwell, std::uint64_t seed, const SynthOptions& opt = {},
                      double window = 1e-9);

struct CorrectedRates {
    std::vector<double> rates;       // counts/s
    bool any_negative = false;       // negatives kept, not clipped
};

// rate - S1*S2*window per point, singles rates taken from the record itself
CorrectedRates correct_accidentals(const ScanRecord& rec);
// per-point factor mean(g)/g_i with g_i the geometric mean of the two
// singles channels; identity when singles carry no information
std::vector<double> drift_factors(const ScanRecord& rec);
// accidental subtraction followed by drift rescaling
CorrectedRates corrected_rates(const ScanRecord& rec);

enum class FitSign { automatic, dip, bump };

struct FitOptions {
    FitSign sign = FitSign::automatic;
    bool drift_correction = true;    // singles with real interference structure
                                     // should fit with this off
    double d1_init = 0.0;            // 0 = estimate from the data
    double d2_init = 0.0;
    int max_iterations = 200;
};

struct FitResult {
    // estimates
    double r_classical = 0.0, visibility = 0.0, d1 = 0.0, d2 = 0.0;
    double slope = 0.0, delay_offset = 0.0;
    // standard errors (local quadratic model at the optimum)
    double err_r_classical = 0.0, err_visibility = 0.0, err_d1 = 0.0, err_d2 = 0.0;
    double err_slope = 0.0, err_delay_offset = 0.0;
    InterferenceKind sign = InterferenceKind::dip;
    double residual_norm = 0.0;      // sqrt of weighted chi^2
    double reduced_chi2 = 0.0;
    int iterations = 0;
    bool converged = false;
    bool visibility_clamped = false; // raw estimate left [-0.05, 1.05]
    bool kernel_degenerate = false;  // no curvature: kernel frozen, linear fit
    bool negative_corrected_rates = false;
};

// Weighted Levenberg-Marquardt of the scan model against corrected rates.
// Weights use variance = max(count, 1); multi-start on the delay offset.
FitResult fit_scan(const ScanRecord& rec, const FitOptions& opt = {});

struct WitnessResult {
    std::array<double, 3> visibilities{};
    std::array<double, 3> errors{};
    double w = 0.0;
    double w_error = 0.0;
    double k_sigma = 3.0;
    bool entangled = false;          // w - 1 > k_sigma * w_error
};

WitnessResult witness(const std::array<double, 3>& vis, const std::array<double, 3>& err,
                      double k_sigma = 3.0);

// Counts per basis ordered (N11, N12, N21, N22): correlation visibility
// (N11 + N22 - N12 - N21) / total with Poisson error propagation.
WitnessResult witness_from_counts(const std::array<std::array<double, 4>, 3>& counts,
                                  double k_sigma = 3.0);

// Depth of the singles-channel interference structure relative to the
// coincidence depth (0.5 for the two-photon-state model). Kernel shape is
// frozen from the coincidence fit; returns 0 when the coincidence scan shows
// no significant structure.
double singles_dip_ratio(const ScanRecord& rec);

// CSV "delay_s,coinc,singles1,singles2" plus sidecar JSON (dwell, window) at
// <csv path with .csv replaced by .meta.json>.
void write_scan_csv(const ScanRecord& rec, const std::string& csv_path);
ScanRecord read_scan_csv(const std::string& csv_path);
std::string sidecar_path(const std::string& csv_path);
// plot-ready corrected rates: "delay_s,rate_corrected"
void write_corrected_csv(const ScanRecord& rec, const std::string& csv_path);

}  // namespace homsim
