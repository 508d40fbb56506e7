#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "homsim/modefield.hpp"

namespace homsim {

// Angular-spectrum propagation over a signed distance. Evanescent components
// are zeroed, so the operator is unitary on the propagating subspace and
// composes: propagate(f, a+b) == propagate(propagate(f, a), b).
Field propagate(const Field& f, double distance);

// 8-bit phase-only element. Level v maps to phase 2*pi*v/256, so the
// representable range is [0, 2*pi*255/256] and quantization error is at most
// pi/256. `efficiency` is an amplitude factor applied per reflection.
struct PhasePlane {
    Grid grid;
    std::vector<std::uint8_t> levels;
    double efficiency = 1.0;

    static double phase_of_level(std::uint8_t v) { return 2.0 * pi * v / 256.0; }
};

// Wrap raw phases (radians, any real) onto the 256-level scale.
std::vector<std::uint8_t> quantize_phase(const std::vector<double>& phase);

Field apply_plane(const Field& f, const PhasePlane& plane);
// Adjoint of the phase action (conjugate phase, no efficiency); used by
// backward cascades.
Field apply_plane_adjoint(const Field& f, const PhasePlane& plane);

// Multi-plane converter: planes at uniform spacing, input arrives at plane 0,
// output is read directly after the last plane (no trailing propagation).
struct MplcDesign {
    Grid grid;
    double wavelength = 0.0;               // design center wavelength, m
    std::vector<double> design_wavelengths;
    double spacing = 0.0;                  // m between adjacent planes
    std::vector<PhasePlane> planes;
    std::vector<ModeSpec> input_specs;
    std::vector<ModeSpec> output_specs;
    Eigen::MatrixXcd target;               // intended unitary, column convention

    int dim() const { return static_cast<int>(input_specs.size()); }
    void validate() const;
};

// Run one field through the converter at the field's own wavelength.
Field apply_mplc(const MplcDesign& d, const Field& in);

struct TransferMetrics {
    double wavelength = 0.0;
    Eigen::MatrixXcd transfer;              // T(j,i) = <out_j | system | in_i>
    std::vector<double> mode_efficiency;    // per input, power landing anywhere in the output basis
    std::vector<double> target_efficiency;  // per input, power landing in the intended output state
    double mean_mode_efficiency = 0.0;
    double mean_target_efficiency = 0.0;
    double mode_independent_loss = 0.0;     // 1 - mean_mode_efficiency
    double in_space_error = 0.0;            // crosstalk power / total lost power
    double max_singular_value = 0.0;
};

// Transfer matrix between the design's input and output bases at an arbitrary
// wavelength (bases are re-realized, so detuning only affects propagation).
// Passivity is asserted: singular values must not exceed 1 + 1e-9.
TransferMetrics transfer_matrix(const MplcDesign& d, double wavelength);

// Directory persistence: one plane_<k>.pgm per plane plus design.json.
// Round-trips bit-exactly (levels are bytes, doubles survive via
// shortest-round-trip JSON).
void save_design(const MplcDesign& d, const std::string& dir);
MplcDesign load_design(const std::string& dir);

}  // namespace homsim
