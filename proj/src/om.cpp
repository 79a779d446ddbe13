#include "ionmirror/om.hpp"

#include <cmath>

namespace ionmirror::om {

using fock::Hermiticity;
using fock::Matrix;
using fock::Mode;
using fock::ModeTag;
using fock::Vector;

namespace {
const Complex I(0.0, 1.0);
}

void OmParams::validate() const {
    if (Omega_m <= 0.0) throw InvalidArgumentError("OmParams: Omega_m must be > 0");
    if (Gamma < 0.0) throw InvalidArgumentError("OmParams: Gamma must be >= 0");
    if (coupling < 0.0) throw InvalidArgumentError("OmParams: g must be >= 0");
}

double mirror_amplitude_bound(const OmParams& p) {
    const double k = p.kappa();
    return k + std::abs(p.alpha0.value - k);
}

int default_mirror_dim(const OmParams& p) {
    return fock::required_coherent_dim(mirror_amplitude_bound(p));
}

ModeLayout om_layout(int mirror_dim) {
    return ModeLayout{Mode(ModeTag::field_2, 3), Mode(ModeTag::mirror, mirror_dim)};
}

Operator build_om_hamiltonian(const OmParams& p, bool with_jump, int mirror_dim) {
    p.validate();
    const ModeLayout layout = om_layout(mirror_dim);
    const Matrix a = fock::ladder(3).entries();
    const Matrix b = fock::ladder(mirror_dim).entries();
    const Matrix n3 = a.adjoint() * a;
    const Matrix id_m = Matrix::Identity(mirror_dim, mirror_dim);
    const Matrix id_3 = Matrix::Identity(3, 3);

    auto kron = [](const Matrix& x, const Matrix& y) {
        Matrix out(x.rows() * y.rows(), x.cols() * y.cols());
        for (Eigen::Index i = 0; i < x.rows(); ++i)
            for (Eigen::Index j = 0; j < x.cols(); ++j)
                out.block(i * y.rows(), j * y.cols(), y.rows(), y.cols()) = x(i, j) * y;
        return out;
    };

    Matrix h = p.Omega_c * kron(n3, id_m) + p.Omega_m * kron(id_3, b.adjoint() * b) -
               p.coupling * kron(n3, b + b.adjoint());
    if (!with_jump) {
        return Operator(layout, std::move(h), Hermiticity::hermitian);
    }
    h += Complex(0.0, -0.5 * p.Gamma) * kron(n3, id_m);
    return Operator(layout, std::move(h), Hermiticity::anti_hermitian_part_present);
}

StateVector evolve_om_conditional(const OmParams& p, const StateVector& initial,
                                  double t_dprime) {
    if (t_dprime < 0.0) {
        throw InvalidArgumentError("evolve_om_conditional: negative time");
    }
    const std::size_t mirror = initial.layout().index_of(ModeTag::mirror);
    const int mirror_dim = initial.layout().dim(mirror);
    const Operator h = build_om_hamiltonian(p, /*with_jump=*/true, mirror_dim);
    return fock::expm_apply(h, t_dprime, initial);
}

OmPreparationResult closed_form_om_state(const OmParams& p, double t_dprime,
                                         int mirror_dim) {
    p.validate();
    if (t_dprime < 0.0) {
        throw InvalidArgumentError("closed_form_om_state: negative time");
    }
    const double wt = p.Omega_m * t_dprime;
    const double k = p.kappa();
    const Complex rot = std::exp(-I * wt);
    const Complex eta = 1.0 - rot;

    const Complex alpha_free = p.alpha0.value * rot;
    const Complex alpha_kicked = alpha_free + k * eta;
    const double phi = k * k * (wt - std::sin(wt));
    const double chi = k * std::imag(eta * p.alpha0.value);

    OmPreparationResult out{
        StateVector(om_layout(mirror_dim),
                    Vector::Zero(static_cast<Eigen::Index>(3 * mirror_dim))),
        {OmBranch{0, CoherentAmplitude(alpha_free), 1.0 / std::sqrt(2.0)},
         OmBranch{1, CoherentAmplitude(alpha_kicked),
                  (1.0 / std::sqrt(2.0)) * std::exp(-0.5 * p.Gamma * t_dprime) *
                      std::exp(I * (phi + chi))}},
        0.0};

    Vector v = Vector::Zero(static_cast<Eigen::Index>(3 * mirror_dim));
    double weight = 0.0;
    for (const OmBranch& branch : out.branches) {
        const Vector mirror =
            fock::coherent_state(branch.mirror_amplitude, mirror_dim).amplitudes();
        v.segment(branch.photons * mirror_dim, mirror_dim) += branch.coefficient * mirror;
        weight += std::norm(branch.coefficient);
    }
    out.norm_constant = 1.0 / std::sqrt(weight);
    out.state = StateVector(om_layout(mirror_dim), std::move(v)).normalized();
    return out;
}

OmPreparationResult closed_form_om_state(const OmParams& p, double t_dprime) {
    return closed_form_om_state(p, t_dprime, default_mirror_dim(p));
}

namespace {

StateVector scale_photon_sectors(const StateVector& state, std::size_t field_mode_index,
                                 const std::vector<Complex>& factors) {
    const fock::ModeLayout& layout = state.layout();
    if (field_mode_index >= layout.mode_count()) {
        throw InvalidArgumentError("photon-sector map: unknown mode index");
    }
    const std::size_t stride = layout.stride(field_mode_index);
    const auto dim = static_cast<std::size_t>(layout.dim(field_mode_index));
    Vector v = state.amplitudes();
    const std::size_t outer = layout.total_dim() / (stride * dim);
    for (std::size_t o = 0; o < outer; ++o) {
        for (std::size_t n = 0; n < dim; ++n) {
            const std::size_t base = (o * dim + n) * stride;
            v.segment(static_cast<Eigen::Index>(base), static_cast<Eigen::Index>(stride)) *=
                factors[n];
        }
    }
    return StateVector(layout, std::move(v));
}

} // namespace

StateVector decay_to_detection(const StateVector& state, std::size_t field_mode_index,
                               double rate, double t) {
    if (rate < 0.0 || t < 0.0) {
        throw InvalidArgumentError("decay_to_detection: rate and time must be >= 0");
    }
    if (field_mode_index >= state.layout().mode_count()) {
        throw InvalidArgumentError("decay_to_detection: unknown mode index");
    }
    const auto dim = static_cast<std::size_t>(state.layout().dim(field_mode_index));
    std::vector<Complex> factors(dim);
    for (std::size_t n = 0; n < dim; ++n) {
        factors[n] = std::exp(-0.5 * rate * static_cast<double>(n) * t);
    }
    return scale_photon_sectors(state, field_mode_index, factors);
}

StateVector remove_field_phase(const StateVector& state, std::size_t field_mode_index,
                               double omega, double t) {
    const auto dim = static_cast<std::size_t>(state.layout().dim(field_mode_index));
    std::vector<Complex> factors(dim);
    for (std::size_t n = 0; n < dim; ++n) {
        factors[n] = std::exp(I * omega * static_cast<double>(n) * t);
    }
    return scale_photon_sectors(state, field_mode_index, factors);
}

} // namespace ionmirror::om
