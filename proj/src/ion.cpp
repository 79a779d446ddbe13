#include "ionmirror/ion.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>

namespace ionmirror::ion {

using fock::Hermiticity;
using fock::Matrix;
using fock::Mode;
using fock::ModeTag;
using fock::Vector;

namespace {
const Complex I(0.0, 1.0);
}

void IonParams::validate() const {
    if (lamb_dicke <= 0.0) throw InvalidArgumentError("IonParams: eta must be > 0");
    if (coupling <= 0.0) throw InvalidArgumentError("IonParams: G must be > 0");
    if (gamma < 0.0) throw InvalidArgumentError("IonParams: gamma must be >= 0");
    if (theta < 0.0 || theta > std::numbers::pi / 2.0) {
        throw InvalidArgumentError("IonParams: theta must lie in [0, pi/2]");
    }
}

double preparation_time(const IonParams& p) {
    return std::numbers::pi / (2.0 * p.eta_g());
}

ModeLayout ion_layout() {
    return ModeLayout{Mode(ModeTag::field_1, 3), Mode(ModeTag::ion_vibration, 2),
                      Mode(ModeTag::ion_electronic, 2)};
}

ModeLayout ion_field_vib_layout() {
    return ModeLayout{Mode(ModeTag::field_1, 3), Mode(ModeTag::ion_vibration, 2)};
}

Operator sigma_plus() {
    Matrix m = Matrix::Zero(2, 2);
    m(1, 0) = 1.0;  // |e><g|
    return Operator(ModeLayout{Mode(ModeTag::ion_electronic, 2)}, std::move(m),
                    Hermiticity::anti_hermitian_part_present);
}

Operator sigma_minus() { return sigma_plus().adjoint(); }

Operator sigma_z() {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 0) = -1.0;
    m(1, 1) = 1.0;
    return Operator(ModeLayout{Mode(ModeTag::ion_electronic, 2)}, std::move(m),
                    Hermiticity::hermitian);
}

namespace {

// sin(X) of a Hermitian X via eigendecomposition.
Matrix operator_sine(const Matrix& x) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(x);
    if (es.info() != Eigen::Success) {
        throw NumericalError("operator_sine: eigendecomposition failed");
    }
    const Eigen::VectorXd s = es.eigenvalues().array().sin();
    return es.eigenvectors() * s.asDiagonal() * es.eigenvectors().adjoint();
}

struct IonModeIndices {
    std::size_t field, vib, elec;
};

IonModeIndices locate(const ModeLayout& layout) {
    return {layout.index_of(ModeTag::field_1), layout.index_of(ModeTag::ion_vibration),
            layout.index_of(ModeTag::ion_electronic)};
}

// Embed a single-mode matrix into the full layout (identity elsewhere).
Matrix one_mode(const ModeLayout& layout, std::size_t target, const Matrix& local) {
    Matrix acc = Matrix::Identity(1, 1);
    for (std::size_t m = 0; m < layout.mode_count(); ++m) {
        const int d = layout.dim(m);
        const Matrix id = Matrix::Identity(d, d);
        const Matrix& factor = (m == target) ? local : id;
        Matrix next(acc.rows() * factor.rows(), acc.cols() * factor.cols());
        for (Eigen::Index i = 0; i < acc.rows(); ++i)
            for (Eigen::Index j = 0; j < acc.cols(); ++j)
                next.block(i * factor.rows(), j * factor.cols(), factor.rows(),
                           factor.cols()) = acc(i, j) * factor;
        acc = std::move(next);
    }
    return acc;
}

} // namespace

Operator build_full_ion_hamiltonian(const IonParams& p, const ModeLayout& layout) {
    p.validate();
    const auto idx = locate(layout);
    const Matrix a = fock::ladder(layout.dim(idx.field)).entries();
    const Matrix b = fock::ladder(layout.dim(idx.vib)).entries();
    const Matrix sx = sigma_plus().entries() + sigma_minus().entries();

    const Matrix field_n = one_mode(layout, idx.field, a.adjoint() * a);
    const Matrix vib_n = one_mode(layout, idx.vib, b.adjoint() * b);
    const Matrix elec_z = one_mode(layout, idx.elec, sigma_z().entries());

    const Matrix coupling = one_mode(layout, idx.elec, sx) *
                            one_mode(layout, idx.field, a + a.adjoint()) *
                            one_mode(layout, idx.vib,
                                     operator_sine(p.lamb_dicke * (b + b.adjoint())));

    Matrix h = p.omega_c * field_n + p.omega_v * vib_n + 0.5 * p.omega_0 * elec_z +
               p.coupling * coupling;
    return Operator(layout, std::move(h), Hermiticity::hermitian);
}

Operator build_sideband_hamiltonian(const IonParams& p, Sideband side, bool with_jump,
                                    const ModeLayout& layout) {
    p.validate();
    const auto idx = locate(layout);
    const Matrix a = one_mode(layout, idx.field, fock::ladder(layout.dim(idx.field)).entries());
    const Matrix b = one_mode(layout, idx.vib, fock::ladder(layout.dim(idx.vib)).entries());
    const Matrix sm = one_mode(layout, idx.elec, sigma_minus().entries());

    // Red converts an electronic quantum into a photon plus a phonon; blue
    // into a photon at the cost of a phonon.
    const Matrix lower = (side == Sideband::red) ? Matrix(sm * a.adjoint() * b.adjoint())
                                                 : Matrix(sm * a.adjoint() * b);
    Matrix h = p.eta_g() * (lower + lower.adjoint());
    if (!with_jump) {
        return Operator(layout, std::move(h), Hermiticity::hermitian);
    }
    h += Complex(0.0, -0.5 * p.gamma) * (a.adjoint() * a);
    return Operator(layout, std::move(h), Hermiticity::anti_hermitian_part_present);
}

Operator build_sideband_hamiltonian(const IonParams& p, Sideband side, bool with_jump) {
    return build_sideband_hamiltonian(p, side, with_jump, ion_layout());
}

namespace {

IonPreparationResult prepare(const IonParams& p, Sideband side, double t_prime) {
    p.validate();
    if (t_prime < 0.0) {
        throw InvalidArgumentError("prepare_ion: negative preparation time");
    }
    const ModeLayout layout = ion_layout();
    const int vib0 = (side == Sideband::red) ? 0 : 1;

    Vector init = Vector::Zero(static_cast<Eigen::Index>(layout.total_dim()));
    const int occ_e[] = {0, vib0, 1};
    const int occ_g[] = {0, vib0, 0};
    init(static_cast<Eigen::Index>(layout.flat_index(occ_e))) = std::cos(p.theta);
    init(static_cast<Eigen::Index>(layout.flat_index(occ_g))) = std::sin(p.theta);
    StateVector psi0(layout, std::move(init));

    const Operator h = build_sideband_hamiltonian(p, side, /*with_jump=*/true, layout);
    const StateVector evolved = fock::expm_apply(h, t_prime, psi0);

    const std::size_t elec = layout.index_of(ModeTag::ion_electronic);
    const StateVector projected = fock::project_mode(evolved, elec, 0);
    const double success = projected.norm_squared() / evolved.norm_squared();

    IonPreparationResult result{projected.normalized(), side, success, {}, {}};
    result.dark_coefficient = projected.amplitude({0, vib0});
    result.bright_coefficient = projected.amplitude({1, 1 - vib0});
    return result;
}

} // namespace

IonPreparationResult prepare_ion_red(const IonParams& p, double t_prime) {
    return prepare(p, Sideband::red, t_prime);
}

IonPreparationResult prepare_ion_blue(const IonParams& p, double t_prime) {
    return prepare(p, Sideband::blue, t_prime);
}

IonPreparationResult closed_form_ion_state(const IonParams& p, Sideband side,
                                           double t_prime, BlueBrightDecay reading) {
    p.validate();
    if (t_prime < 0.0) {
        throw InvalidArgumentError("closed_form_ion_state: negative preparation time");
    }
    const double phase = p.eta_g() * t_prime;                        // eta G t'
    const double hyp = 0.5 * p.gamma * p.eta_g() * t_prime * t_prime;

    Complex dark, bright;
    if (side == Sideband::red) {
        dark = std::sin(p.theta);
        bright = (I * std::cos(phase) * std::exp(-p.gamma * t_prime) * std::sinh(hyp) -
                  I * std::sin(phase) * std::cosh(hyp)) *
                 std::cos(p.theta);
    } else {
        dark = std::exp(I * p.xi) * std::sin(p.theta);
        bright = (-I * std::cos(phase) * std::exp(-0.5 * p.gamma * t_prime) * std::sinh(hyp) -
                  I * std::sin(phase) * std::cosh(hyp)) *
                 std::cos(p.theta);
        if (reading == BlueBrightDecay::at_prep_time) {
            bright *= std::exp(-0.5 * p.gamma * t_prime);
        }
    }

    const ModeLayout layout = ion_field_vib_layout();
    const int vib0 = (side == Sideband::red) ? 0 : 1;
    Vector v = Vector::Zero(static_cast<Eigen::Index>(layout.total_dim()));
    const int occ_dark[] = {0, vib0};
    const int occ_bright[] = {1, 1 - vib0};
    v(static_cast<Eigen::Index>(layout.flat_index(occ_dark))) = dark;
    v(static_cast<Eigen::Index>(layout.flat_index(occ_bright))) = bright;

    StateVector raw(layout, std::move(v));
    // The closed form describes the already-projected branch pair; its
    // success probability is not part of the printed expression.
    return IonPreparationResult{raw.normalized(), side, 1.0, dark, bright};
}

NoDetectionProbability p_no_detection_red(const IonParams& p) {
    p.validate();
    const double ratio = p.gamma / p.eta_g();
    const double s = std::numbers::pi * std::numbers::pi * ratio / 8.0;
    const double c2 = std::cos(p.theta) * std::cos(p.theta);
    const double s2 = std::sin(p.theta) * std::sin(p.theta);
    // Written with tan^2(theta) the expression is singular at theta = pi/2;
    // multiplying through by cos^2(theta) keeps it finite there and exactly
    // 1 at gamma = 0.
    const double num = std::cosh(s) * std::cosh(s) * c2 + s2;
    const double den =
        num + std::exp(-std::numbers::pi * ratio) * std::sinh(s) * std::sinh(s) * c2;

    NoDetectionProbability out;
    out.formula = num / den;
    out.propagated = prepare_ion_red(p, preparation_time(p)).success_probability;
    return out;
}

} // namespace ionmirror::ion
