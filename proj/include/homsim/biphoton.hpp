#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "homsim/common.hpp"

namespace homsim {

// Mode-space unitaries act on coefficient column vectors: state_out = U * state_in.
// Basis order is ascending in OAM throughout (2D: l = -1, +1; 3D: -1, 0, +1;
// 4D: -2, -1, +1, +2).

void require_unitary(const Eigen::MatrixXcd& U, const char* ctx, double tol = 1e-10);

// 2D symmetric multiport: (1/sqrt2) [[1, -1], [1, 1]]
Eigen::MatrixXcd u2();
// 3D symmetric multiport (tritter), columns l = -1, 0, +1
Eigen::MatrixXcd u3();
// Tritter times a real rotation, expressed in ascending basis order. The
// source publication states this product with rows/columns 1 and 2 swapped
// (basis listed as -1, +1, 0); pass ascending=false for that raw layout.
Eigen::MatrixXcd rot3(bool ascending = true);
// 4D tunable beam splitter: two balanced splitter layers with an internal
// phase on one arm. Balanced (|entries| = 1/2) for every phi; phi = 0 gives
// anti-coalescence, pi/2 no interference, pi coalescence on the canonical
// (first, last) mode pair.
Eigen::MatrixXcd u4(double phi);

Eigen::MatrixXcd named_unitary(const std::string& name, int* dim_out = nullptr);

// Single-photon states from the measurement catalog, ascending basis order.
// 2D: "d", "a" (circular-type MUB), "h", "v" (real MUB).
// 3D: "mub2_2", "mub2_3" (second MUB pair), "a1", "a2" (anti-coalescence pair).
Eigen::VectorXcd named_state(const std::string& name, int dim);

enum class InterferenceKind { dip, bump, none };
const char* to_string(InterferenceKind k);

// One coincidence measurement: photons enter in single-photon states in1 and
// in2, pass U, and are detected behind projectors proj1/proj2 (either the
// same mode or orthogonal modes). gamma in [-1, 1] interpolates from fully
// distinguishable (0) to indistinguishable (1); negative values realize the
// sinc sidelobes of a delay scan.
struct PairSetup {
    Eigen::MatrixXcd unitary;
    Eigen::VectorXcd in1, in2;
    Eigen::VectorXcd proj1, proj2;
    double gamma = 1.0;
};

// Unordered coincidence probability:
//   distinct projectors: |A|^2 + |B|^2 + 2 gamma Re(conj(A) B)
//   same projector:      (1 + gamma) |A|^2
// with A = <p|U|u><q|U|v>, B = <p|U|v><q|U|u>. Affine in gamma.
double coincidence_rate(const PairSetup& s);

double visibility(double r_classical, double r_quantum, InterferenceKind kind);
InterferenceKind classify(double r_classical, double r_quantum, double tol = 1e-12);

// Fully symmetrized two-photon state in the Fock amplitude convention:
// amplitude(i, j) with i < j is the |1_i, 1_j> coefficient, amplitude(i, i)
// the |2_i> coefficient; sum of |amplitude|^2 over i <= j equals 1. Global
// phase fixed by making the largest-magnitude amplitude real positive.
struct TwoPhotonState {
    int dim = 0;
    Eigen::MatrixXcd amp;  // upper triangle holds the Fock amplitudes

    cplx amplitude(int i, int j) const {
        return i <= j ? amp(i, j) : amp(j, i);
    }
    // detection probability of the unordered outcome (i, j)
    double probability(int i, int j) const { return std::norm(amplitude(i, j)); }
};

TwoPhotonState transform_pair(const Eigen::MatrixXcd& U, const Eigen::VectorXcd& in1,
                              const Eigen::VectorXcd& in2);

}  // namespace homsim
