// om.hpp — Optomechanical cavity with a movable mirror: radiation-pressure
// Hamiltonian with an optional quantum-jump term, conditional evolution, the
// exact two-branch closed form of the prepared field/mirror state, and the
// free-decay map applied while waiting for detection.
//
// Mode order: (field-2, mirror). The closed form lives in the frame with the
// free optical rotation Omega_c A^dag A factored out; comparisons against the
// full-Hamiltonian propagator must remove that photon-sector phase first.

#pragma once

#include <array>
#include <complex>

#include "ionmirror/fock.hpp"

namespace ionmirror::om {

using fock::CoherentAmplitude;
using fock::Complex;
using fock::ModeLayout;
using fock::Operator;
using fock::StateVector;

struct OmParams {
    double Omega_c = 0.0;   // cavity-2 field frequency (rad/s)
    double Omega_m = 1.0;   // mirror frequency (rad/s)
    double coupling = 0.0;  // optomechanical coupling g (rad/s)
    double Gamma = 0.0;     // cavity-2 decay rate (rad/s)
    CoherentAmplitude alpha0;  // initial mirror amplitude

    // Dimensionless displacement per photon; recomputed, never stored.
    double kappa() const { return coupling / Omega_m; }
    void validate() const;
};

// Largest coherent magnitude the mirror reaches during one evolution:
// the branch orbit is a circle of radius |alpha0 - kappa| centred at kappa.
double mirror_amplitude_bound(const OmParams& p);
// Mirror cutoff from the sizing rule applied to that bound.
int default_mirror_dim(const OmParams& p);

ModeLayout om_layout(int mirror_dim);

// H = Omega_c A^dag A + Omega_m B^dag B - g A^dag A (B + B^dag), plus
// -i (Gamma/2) A^dag A when with_jump. The photon number commutes with the
// Hermitian part, so decay only rescales photon sectors.
Operator build_om_hamiltonian(const OmParams& p, bool with_jump, int mirror_dim);

// Conditional no-click evolution of an arbitrary (field-2, mirror) state.
StateVector evolve_om_conditional(const OmParams& p, const StateVector& initial,
                                  double t_dprime);

struct OmBranch {
    int photons = 0;
    CoherentAmplitude mirror_amplitude;
    Complex coefficient{0.0, 0.0};
};

struct OmPreparationResult {
    StateVector state;  // (field-2, mirror), normalized
    std::array<OmBranch, 2> branches;
    double norm_constant = 0.0;  // 1 / sqrt(sum |coefficient|^2)
};

// Exact evolved state from (|0>_2 + |1>_2)|alpha0>_m / sqrt(2):
//   branch 0: |0>_2 |alpha0 e^{-i w t}>,   coefficient 1/sqrt(2)
//   branch 1: |1>_2 |alpha(t)>, coefficient
//             (1/sqrt(2)) e^{-Gamma t/2} e^{i(phi(t) + chi(t))}
// with alpha(t) = alpha0 e^{-iwt} + kappa(1 - e^{-iwt}),
//      phi(t) = kappa^2 (wt - sin wt),
//      chi(t) = kappa Im[(1 - e^{-iwt}) alpha0]   (w = Omega_m).
// chi is the displacement-interference phase; it vanishes at wt in {0, pi,
// 2pi} for real alpha0, where the state reduces to the familiar two-branch
// form with branch separation 2 kappa.
OmPreparationResult closed_form_om_state(const OmParams& p, double t_dprime,
                                         int mirror_dim);
OmPreparationResult closed_form_om_state(const OmParams& p, double t_dprime);

// Free no-click decay while waiting for a detector click: multiplies each
// photon-number component n of the designated field mode by
// e^{-rate n t / 2}. Renormalization is left to the caller.
StateVector decay_to_detection(const StateVector& state, std::size_t field_mode_index,
                               double rate, double t);

// Remove the free optical phase of one field mode (multiply sector n by
// e^{+i omega n t}); used to compare frame-fixed closed forms against the
// full-Hamiltonian propagator.
StateVector remove_field_phase(const StateVector& state, std::size_t field_mode_index,
                               double omega, double t);

} // namespace ionmirror::om
