#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "homsim/freespace.hpp"

namespace homsim {

struct WfmConfig {
    int planes = 3;
    double spacing = 0.8;           // m
    int sweeps = 100;
    std::vector<double> wavelengths;  // empty => design at the basis wavelength only
    bool quantize_each_update = true; // 8-bit quantization inside the loop, not after
    double stop_efficiency = 0.0;     // early stop once mean efficiency reaches this (0 = run all sweeps)
};

struct WfmReport {
    std::vector<double> sweep_efficiency;  // mean |<target|out>|^2 after each sweep, averaged over wavelengths
    double final_efficiency = 0.0;
    std::vector<std::pair<double, double>> wavelength_efficiency;  // (lambda, efficiency)
    int sweeps_run = 0;
};

// Iterative phase retrieval for a multi-plane converter implementing U on the
// given basis. Planes start flat and are updated first-to-last each sweep;
// the phase written at each pixel maximizes the summed mode overlaps, with
// every mode referenced to the conjugate of its current net transmission
// phase so already-converged modes are not scrambled. Deterministic: same
// basis, U and config give a bit-identical design.
std::pair<MplcDesign, WfmReport> wavefront_match(const Basis& input,
                                                 const Eigen::MatrixXcd& U,
                                                 const WfmConfig& cfg);

// Detuning robustness: transfer metrics of a finished design across
// wavelengths.
std::vector<TransferMetrics> bandwidth_scan(const MplcDesign& d,
                                            const std::vector<double>& wavelengths);

}  // namespace homsim
