#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "ionmirror/fock.hpp"
#include "ionmirror/ion.hpp"
#include "oracles.hpp"

using namespace ionmirror;
using namespace ionmirror::fock;
using namespace ionmirror::ion;
using std::numbers::pi;

namespace {

const Complex I(0.0, 1.0);

IonParams base_params(double gamma_over_etaG, double theta) {
    IonParams p;
    p.lamb_dicke = 0.1;
    p.coupling = 10.0;  // eta G = 1
    p.gamma = gamma_over_etaG * p.eta_g();
    p.theta = theta;
    return p;
}

// Normalized (dark, bright) pair from the closed-form 2x2 conditional
// evolution, independent of the library's propagator.
Eigen::Vector2cd oracle_projected_pair(const IonParams& p, double t_prime) {
    const auto amps = oracles::conditional_two_level(p.eta_g(), p.gamma, t_prime);
    Eigen::Vector2cd v;
    v << std::sin(p.theta), std::cos(p.theta) * amps.transfer;
    return v.normalized();
}

Eigen::Vector2cd result_pair(const IonPreparationResult& r) {
    Eigen::Vector2cd v;
    v << r.dark_coefficient, r.bright_coefficient;
    return v.normalized();
}

} // namespace

// -------------------------- full ion Hamiltonian ------------------------------

TEST_CASE("full ion Hamiltonian: decoupled limit is diagonal") {
    IonParams p = base_params(0.0, 0.3);
    p.coupling = 1e-30;  // G -> 0 (exact zero is rejected by validation)
    ModeLayout layout{Mode(ModeTag::field_1, 3), Mode(ModeTag::ion_vibration, 6),
                      Mode(ModeTag::ion_electronic, 2)};
    Operator h = build_full_ion_hamiltonian(p, layout);
    for (std::size_t flat = 0; flat < layout.total_dim(); ++flat) {
        const auto occ = layout.occupations(flat);
        const double expect =
            p.omega_c * occ[0] + p.omega_v * occ[1] + 0.5 * p.omega_0 * (occ[2] == 1 ? 1 : -1);
        CHECK(std::abs(h.entries()(flat, flat) - expect) < 1e-12);
    }
    // off-diagonal part negligible
    Matrix off = h.entries();
    off.diagonal().setZero();
    CHECK(off.cwiseAbs().maxCoeff() < 1e-25);
}

TEST_CASE("full ion Hamiltonian is Hermitian for random parameters") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.1, 2.0);
    ModeLayout layout{Mode(ModeTag::field_1, 3), Mode(ModeTag::ion_vibration, 5),
                      Mode(ModeTag::ion_electronic, 2)};
    for (int trial = 0; trial < 5; ++trial) {
        IonParams p;
        p.omega_c = u(rng);
        p.omega_v = u(rng);
        p.omega_0 = u(rng);
        p.coupling = u(rng);
        p.lamb_dicke = 0.05 + 0.1 * u(rng);
        Operator h = build_full_ion_hamiltonian(p, layout);
        CHECK(h.hermiticity() == Hermiticity::hermitian);
        const double scale = h.entries().cwiseAbs().maxCoeff();
        CHECK((h.entries() - h.entries().adjoint()).cwiseAbs().maxCoeff() < 1e-12 * scale);
    }
}

TEST_CASE("full ion Hamiltonian coupling element matches the sine series oracle") {
    IonParams p = base_params(0.0, 0.0);
    p.lamb_dicke = 0.15;
    ModeLayout layout{Mode(ModeTag::field_1, 3), Mode(ModeTag::ion_vibration, 8),
                      Mode(ModeTag::ion_electronic, 2)};
    Operator h = build_full_ion_hamiltonian(p, layout);

    const Matrix b = ladder(8).entries();
    const Matrix sin_ref = oracles::sin_series(Matrix(p.lamb_dicke * (b + b.adjoint())));

    // <1,1,g| H |0,0,e> picks out G <1|(a+a^dag)|0> <1|sin(eta(b+b^dag))|0>.
    const int bra[] = {1, 1, 0}, ket[] = {0, 0, 1};
    const Complex elem = h.entries()(static_cast<Eigen::Index>(layout.flat_index(bra)),
                                     static_cast<Eigen::Index>(layout.flat_index(ket)));
    CHECK(std::abs(elem - p.coupling * sin_ref(1, 0)) < 1e-10);

    // the field-diagonal element vanishes: (a + a^dag) has no <0|.|0> part
    const int bra0[] = {0, 1, 0};
    const Complex elem0 = h.entries()(static_cast<Eigen::Index>(layout.flat_index(bra0)),
                                      static_cast<Eigen::Index>(layout.flat_index(ket)));
    CHECK(std::abs(elem0) < 1e-14);
}

// ------------------------- sideband Hamiltonians ------------------------------

TEST_CASE("red sideband Hamiltonian: defining matrix element") {
    IonParams p = base_params(0.0, 0.0);
    Operator h = build_sideband_hamiltonian(p, Sideband::red, false);
    const ModeLayout layout = ion_layout();
    StateVector in = basis_state(layout, std::array{0, 0, 1});  // |0>_1 |0>_v |e>
    StateVector out = h * in;
    // = eta G |1>_1 |1>_v |g>
    CHECK(std::abs(out.amplitude({1, 1, 0}) - p.eta_g()) < 1e-13);
    CHECK(out.norm_squared() == doctest::Approx(p.eta_g() * p.eta_g()).epsilon(1e-12));
}

TEST_CASE("blue sideband Hamiltonian: defining matrix element") {
    IonParams p = base_params(0.0, 0.0);
    Operator h = build_sideband_hamiltonian(p, Sideband::blue, false);
    const ModeLayout layout = ion_layout();
    StateVector in = basis_state(layout, std::array{0, 1, 1});  // |0>_1 |1>_v |e>
    StateVector out = h * in;
    // = eta G |1>_1 |0>_v |g>
    CHECK(std::abs(out.amplitude({1, 0, 0}) - p.eta_g()) < 1e-13);
    CHECK(out.norm_squared() == doctest::Approx(p.eta_g() * p.eta_g()).epsilon(1e-12));
}

TEST_CASE("jump term adds -i(gamma/2) a^dag a entrywise") {
    IonParams p = base_params(0.37, 0.0);
    for (Sideband side : {Sideband::red, Sideband::blue}) {
        Operator h0 = build_sideband_hamiltonian(p, side, false);
        Operator h1 = build_sideband_hamiltonian(p, side, true);
        CHECK(h1.hermiticity() == Hermiticity::anti_hermitian_part_present);
        const Matrix diff = h1.entries() - h0.entries();
        const ModeLayout layout = ion_layout();
        for (std::size_t flat = 0; flat < layout.total_dim(); ++flat) {
            const auto occ = layout.occupations(flat);
            const Complex expect = -I * 0.5 * p.gamma * static_cast<double>(occ[0]);
            CHECK(std::abs(diff(flat, flat) - expect) < 1e-14);
        }
        Matrix off = diff;
        off.diagonal().setZero();
        CHECK(off.cwiseAbs().maxCoeff() < 1e-14);
    }
}

// ------------------------------ preparation -----------------------------------

TEST_CASE("red preparation at gamma=0, theta=pi/4 gives the balanced pair") {
    IonParams p = base_params(0.0, pi / 4.0);
    auto r = prepare_ion_red(p, preparation_time(p));
    // (|0,0> - i |1,1>)/sqrt(2)
    CHECK(std::abs(r.state.amplitude({0, 0}) - 1.0 / std::sqrt(2.0)) < 1e-10);
    CHECK(std::abs(r.state.amplitude({1, 1}) - (-I / std::sqrt(2.0))) < 1e-10);
    CHECK(r.success_probability == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("red preparation from pure |g> is dark") {
    for (double gr : {0.0, 0.3, 1.0}) {
        IonParams p = base_params(gr, pi / 2.0);
        auto r = prepare_ion_red(p, preparation_time(p));
        CHECK(std::abs(r.state.amplitude({0, 0}) - 1.0) < 1e-12);
        CHECK(r.success_probability == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("red preparation matches the non-Hermitian 2x2 oracle") {
    IonParams p = base_params(0.01, pi / 4.0);
    const double tp = preparation_time(p);
    auto r = prepare_ion_red(p, tp);
    const double f = std::norm(oracle_projected_pair(p, tp).dot(result_pair(r)));
    CHECK(f >= 1.0 - 1e-10);
}

TEST_CASE("blue preparation at gamma=0") {
    IonParams p = base_params(0.0, pi / 4.0);
    auto r = prepare_ion_blue(p, preparation_time(p));
    // (|0,1> - i |1,0>)/sqrt(2)
    CHECK(std::abs(r.state.amplitude({0, 1}) - 1.0 / std::sqrt(2.0)) < 1e-10);
    CHECK(std::abs(r.state.amplitude({1, 0}) - (-I / std::sqrt(2.0))) < 1e-10);

    // theta = 0: full Rabi transfer to -i |1,0> with unit success
    IonParams p0 = base_params(0.0, 0.0);
    auto r0 = prepare_ion_blue(p0, preparation_time(p0));
    CHECK(std::abs(r0.state.amplitude({1, 0}) - (-I)) < 1e-10);
    CHECK(r0.success_probability == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("blue preparation matches the non-Hermitian 2x2 oracle") {
    IonParams p = base_params(0.05, pi / 3.0);
    const double tp = preparation_time(p);
    auto r = prepare_ion_blue(p, tp);
    const double f = std::norm(oracle_projected_pair(p, tp).dot(result_pair(r)));
    CHECK(f >= 1.0 - 1e-10);
}

TEST_CASE("conditional evolution never increases the stored norm") {
    IonParams p = base_params(0.2, pi / 3.0);
    const ModeLayout layout = ion_layout();
    Operator h = build_sideband_hamiltonian(p, Sideband::red, true, layout);
    Vector init = Vector::Zero(12);
    init(layout.flat_index(std::array{0, 0, 1})) = std::cos(p.theta);
    init(layout.flat_index(std::array{0, 0, 0})) = std::sin(p.theta);
    StateVector psi(layout, std::move(init));
    double prev = psi.norm_squared();
    for (int k = 1; k <= 20; ++k) {
        const double t = 0.25 * k;
        const double now = expm_apply(h, t, psi).norm_squared();
        CHECK(now <= prev + 1e-12);
        prev = now;
    }
}

TEST_CASE("dynamics stays confined to the three-state spans") {
    IonParams p = base_params(0.08, pi / 3.0);
    const ModeLayout layout = ion_layout();
    for (Sideband side : {Sideband::red, Sideband::blue}) {
        const int vib0 = (side == Sideband::red) ? 0 : 1;
        Operator h = build_sideband_hamiltonian(p, side, true, layout);
        Vector init = Vector::Zero(12);
        init(layout.flat_index(std::array{0, vib0, 1})) = std::cos(p.theta);
        init(layout.flat_index(std::array{0, vib0, 0})) = std::sin(p.theta);
        StateVector evolved = expm_apply(h, 2.7, StateVector(layout, init));

        const std::size_t allowed[] = {layout.flat_index(std::array{0, vib0, 1}),
                                       layout.flat_index(std::array{1, 1 - vib0, 0}),
                                       layout.flat_index(std::array{0, vib0, 0})};
        for (std::size_t flat = 0; flat < 12; ++flat) {
            if (std::find(std::begin(allowed), std::end(allowed), flat) ==
                std::end(allowed)) {
                CHECK(std::abs(evolved.amplitudes()(flat)) < 1e-12);
            }
        }
    }
}

TEST_CASE("electronic projection probabilities add up to the stored norm") {
    IonParams p = base_params(0.15, 1.1);
    const ModeLayout layout = ion_layout();
    Operator h = build_sideband_hamiltonian(p, Sideband::red, true, layout);
    Vector init = Vector::Zero(12);
    init(layout.flat_index(std::array{0, 0, 1})) = std::cos(p.theta);
    init(layout.flat_index(std::array{0, 0, 0})) = std::sin(p.theta);
    StateVector evolved = expm_apply(h, 1.8, StateVector(layout, init));
    const std::size_t elec = layout.index_of(ModeTag::ion_electronic);
    const double pg = project_mode(evolved, elec, 0).norm_squared();
    const double pe = project_mode(evolved, elec, 1).norm_squared();
    CHECK(std::abs(pg + pe - evolved.norm_squared()) < 1e-10);
}

// ------------------------------ closed forms ----------------------------------

TEST_CASE("closed form equals the propagator at gamma=0 on a theta x time grid") {
    for (Sideband side : {Sideband::red, Sideband::blue}) {
        for (int it = 0; it < 20; ++it) {
            const double theta = (pi / 2.0) * it / 19.0;
            IonParams p = base_params(0.0, theta);
            for (int k = 1; k <= 10; ++k) {
                const double tp = preparation_time(p) * (0.2 * k);
                auto numeric = (side == Sideband::red) ? prepare_ion_red(p, tp)
                                                       : prepare_ion_blue(p, tp);
                auto analytic = closed_form_ion_state(p, side, tp);
                CHECK(fidelity(numeric.state, analytic.state) >= 1.0 - 1e-10);
            }
        }
    }
}

TEST_CASE("closed form red coefficients at the preparation time") {
    IonParams p = base_params(0.04, 0.7);
    auto r = closed_form_ion_state(p, Sideband::red, preparation_time(p));
    const double s = pi * pi * (p.gamma / p.eta_g()) / 8.0;
    CHECK(std::abs(r.dark_coefficient - std::sin(p.theta)) < 1e-12);
    CHECK(std::abs(r.bright_coefficient - (-I * std::cosh(s) * std::cos(p.theta))) < 1e-12);
}

TEST_CASE("closed-form fidelity deficit shrinks quadratically with the decay ratio") {
    const double tp = pi / 2.0;  // eta G = 1
    auto deficit = [&](double ratio) {
        IonParams p = base_params(ratio, pi / 4.0);
        auto analytic = closed_form_ion_state(p, Sideband::red, tp);
        const double f =
            std::norm(oracle_projected_pair(p, tp).dot(result_pair(analytic)));
        return 1.0 - f;
    };
    const double d2 = deficit(1e-2);
    const double d3 = deficit(1e-3);
    CHECK(d2 <= 1e-3);
    CHECK(d2 / d3 > 50.0);
    CHECK(d2 / d3 < 200.0);
    CHECK(deficit(0.0) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("blue bright-branch decay readings coincide at gamma=0 and differ otherwise") {
    IonParams p0 = base_params(0.0, 0.9);
    const double tp = preparation_time(p0);
    auto a0 = closed_form_ion_state(p0, Sideband::blue, tp, BlueBrightDecay::at_zero);
    auto b0 = closed_form_ion_state(p0, Sideband::blue, tp, BlueBrightDecay::at_prep_time);
    CHECK(fidelity(a0.state, b0.state) >= 1.0 - 1e-14);

    IonParams p1 = base_params(0.2, 0.9);
    auto a1 = closed_form_ion_state(p1, Sideband::blue, tp, BlueBrightDecay::at_zero);
    auto b1 = closed_form_ion_state(p1, Sideband::blue, tp, BlueBrightDecay::at_prep_time);
    CHECK(std::abs(b1.bright_coefficient / a1.bright_coefficient -
                   std::exp(-0.5 * p1.gamma * tp)) < 1e-12);
}

// ------------------------- no-detection probability ----------------------------

TEST_CASE("no-detection probability limits") {
    IonParams g0 = base_params(0.0, 0.6);
    CHECK(p_no_detection_red(g0).formula == 1.0);

    IonParams tpi2 = base_params(0.3, pi / 2.0);
    CHECK(p_no_detection_red(tpi2).formula == 1.0);
}

TEST_CASE("no-detection formula matches extended precision and the oracle") {
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> ratio_d(0.0, 0.2), theta_d(0.0, pi / 2.0);
    for (int trial = 0; trial < 10; ++trial) {
        const double ratio = ratio_d(rng), theta = theta_d(rng);
        IonParams p = base_params(ratio, theta);
        const auto pnd = p_no_detection_red(p);
        const long double ref = oracles::no_detection_formula_long(ratio, theta);
        CHECK(std::abs(pnd.formula - static_cast<double>(ref)) < 1e-12);
    }

    // formula vs exact conditional dynamics: agreement to quadratic order
    IonParams p = base_params(0.1, pi / 4.0);
    const auto pnd = p_no_detection_red(p);
    CHECK(std::abs(pnd.formula - pnd.propagated) < 1.0 * 0.1 * 0.1);

    IonParams p2 = base_params(0.01, pi / 4.0);
    const auto pnd2 = p_no_detection_red(p2);
    CHECK(std::abs(pnd2.formula - pnd2.propagated) < 1.0 * 0.01 * 0.01);
}

TEST_CASE("preparation success equals the propagated no-detection value") {
    for (double ratio : {0.0, 0.05, 0.15}) {
        IonParams p = base_params(ratio, 0.8);
        auto r = prepare_ion_red(p, preparation_time(p));
        auto pnd = p_no_detection_red(p);
        CHECK(std::abs(r.success_probability - pnd.propagated) < 1e-10);
    }
}

TEST_CASE("parameter validation") {
    IonParams p = base_params(0.0, 0.5);
    p.theta = 2.0;
    CHECK_THROWS_AS(p.validate(), InvalidArgumentError);
    p.theta = 0.5;
    p.gamma = -1.0;
    CHECK_THROWS_AS(p.validate(), InvalidArgumentError);
    p.gamma = 0.0;
    p.lamb_dicke = 0.5;
    CHECK(p.lamb_dicke_warning());
    CHECK_THROWS_AS(prepare_ion_red(base_params(0.0, 0.5), -1.0), InvalidArgumentError);
}
