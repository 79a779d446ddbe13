// fock.hpp — Dense complex linear algebra over truncated composite Fock spaces:
// mode layouts, state vectors, operators, tensor products, partial trace, and
// a non-Hermitian matrix exponential. All values are immutable after
// construction; every operation returns a new value, so everything here is
// safe to share across threads.
//
// Units: hbar = 1 throughout. Hamiltonian entries are angular frequencies and
// evolve states via exp(-i H t).

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "ionmirror/errors.hpp"

namespace ionmirror::fock {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// --------------------------------- layouts ----------------------------------

// Semantic role of a mode within the protocol. Generic scratch modes used in
// tests may stay untagged.
enum class ModeTag { field_1, ion_vibration, ion_electronic, field_2, mirror };

std::string_view to_string(ModeTag tag);

struct Mode {
    std::optional<ModeTag> tag;
    int dim = 0;

    Mode(ModeTag t, int d) : tag(t), dim(d) {}
    explicit Mode(int d) : tag(std::nullopt), dim(d) {}

    bool operator==(const Mode&) const = default;
};

// Ordered list of per-mode truncation dimensions. Index convention is
// Kronecker order: the first mode is the most significant digit of the flat
// index, i.e. flat = ((i0*d1 + i1)*d2 + i2)*...
class ModeLayout {
public:
    // Global memory cap: composite dimension per state.
    static constexpr std::size_t kMaxTotalDim = std::size_t{1} << 16;

    explicit ModeLayout(std::vector<Mode> modes);
    ModeLayout(std::initializer_list<Mode> modes)
        : ModeLayout(std::vector<Mode>(modes)) {}

    std::size_t mode_count() const { return modes_.size(); }
    const Mode& mode(std::size_t i) const { return modes_.at(i); }
    int dim(std::size_t i) const { return modes_.at(i).dim; }
    std::size_t total_dim() const { return total_; }

    bool has(ModeTag tag) const;
    // Index of the unique mode carrying `tag`; throws if absent.
    std::size_t index_of(ModeTag tag) const;

    std::size_t flat_index(std::span<const int> occupations) const;
    std::vector<int> occupations(std::size_t flat) const;
    // Stride of mode i in the flat index (product of the dims to its right).
    std::size_t stride(std::size_t i) const;

    // Concatenation; tagged modes must be disjoint between the operands.
    ModeLayout concatenated(const ModeLayout& other) const;
    // Layout with the given mode positions removed (must not remove all).
    ModeLayout without(std::span<const std::size_t> drop) const;

    bool operator==(const ModeLayout&) const = default;

private:
    std::vector<Mode> modes_;
    std::size_t total_ = 1;
};

// --------------------------------- states -----------------------------------

// Complex amplitude array over a ModeLayout. States may be deliberately
// unnormalized under conditional evolution; `norm_squared()` caches the sum
// of squared magnitudes as stored.
class StateVector {
public:
    StateVector(ModeLayout layout, Vector amplitudes);

    const ModeLayout& layout() const { return layout_; }
    const Vector& amplitudes() const { return amplitudes_; }
    std::size_t dim() const { return static_cast<std::size_t>(amplitudes_.size()); }

    double norm_squared() const { return norm_squared_; }
    bool is_normalized(double tol = 1e-10) const {
        return std::abs(norm_squared_ - 1.0) <= tol;
    }
    StateVector normalized() const;

    Complex amplitude(std::span<const int> occupations) const;
    Complex amplitude(std::initializer_list<int> occupations) const {
        return amplitude(std::span<const int>(occupations.begin(), occupations.size()));
    }

private:
    ModeLayout layout_;
    Vector amplitudes_;
    double norm_squared_;
};

// |n> over a single (optionally tagged) mode.
StateVector fock_state(Mode mode, int n);
// Basis state of a composite layout.
StateVector basis_state(ModeLayout layout, std::span<const int> occupations);

// -------------------------------- operators ---------------------------------

enum class Hermiticity { hermitian, anti_hermitian_part_present, unknown };

class Operator {
public:
    Operator(ModeLayout layout, Matrix entries,
             Hermiticity herm = Hermiticity::unknown);

    const ModeLayout& layout() const { return layout_; }
    const Matrix& entries() const { return entries_; }
    Hermiticity hermiticity() const { return hermiticity_; }

    Operator adjoint() const;

    static Operator identity(ModeLayout layout);

    friend Operator operator+(const Operator& a, const Operator& b);
    friend Operator operator-(const Operator& a, const Operator& b);
    friend Operator operator*(const Operator& a, const Operator& b);
    friend Operator operator*(Complex c, const Operator& a);
    friend StateVector operator*(const Operator& a, const StateVector& v);

private:
    ModeLayout layout_;
    Matrix entries_;
    Hermiticity hermiticity_;
};

// Annihilation operator over a single untagged mode: <n-1|a|n> = sqrt(n).
// The creation operator is its adjoint. Throws DimensionError for dim < 2.
Operator ladder(int dim);
Operator ladder(Mode mode);

// Number operator a^dag a (diagonal 0..dim-1).
Operator number_operator(Mode mode);

// ----------------------------- coherent states -------------------------------

// Dimensionless displacement amplitude used to build coherent states.
struct CoherentAmplitude {
    Complex value{0.0, 0.0};

    CoherentAmplitude() = default;
    CoherentAmplitude(Complex v) : value(v) {}
    CoherentAmplitude(double v) : value(v, 0.0) {}

    double magnitude() const { return std::abs(value); }
};

// Smallest cutoff for which the Poisson tail of |alpha> stays below 1e-10:
// ceil(|a|^2 + 6|a| + 10).
int required_coherent_dim(double alpha_magnitude);

// c_n = exp(-|a|^2/2) a^n / sqrt(n!) for n < dim. The stored norm is the
// captured weight (<= 1); callers renormalize on request. Throws
// TruncationError when dim violates the cutoff rule.
StateVector coherent_state(CoherentAmplitude alpha, Mode mode);
StateVector coherent_state(CoherentAmplitude alpha, int dim);

// ------------------------------- operations ---------------------------------

// Kronecker composition. Layout is the concatenation; the norm is
// multiplicative. Tagged modes must be disjoint.
StateVector tensor(const StateVector& a, const StateVector& b);
Operator tensor(const Operator& a, const Operator& b);

// Reduced density matrix over the kept mode positions (order preserved).
struct ReducedDensity {
    ModeLayout layout;
    Matrix rho;
};
ReducedDensity partial_trace(const StateVector& state,
                             std::span<const std::size_t> keep);
ReducedDensity partial_trace(const StateVector& state,
                             std::initializer_list<std::size_t> keep);

// e^M for a dense complex square matrix, by scaling-and-squaring with a
// diagonal Pade approximant; the scaled norm is brought below 1/2 before
// squaring back.
Matrix expm(const Matrix& m);

// exp(-i * generator * t) * state (hbar = 1). The generator may carry an
// anti-Hermitian jump part, in which case the stored norm shrinks. Throws
// OverflowError on non-finite input or output.
StateVector expm_apply(const Operator& generator, double t, const StateVector& state);

// Apply an operator over a subset of modes (gather/scatter over spectator
// indices). `op` must match the dims of `modes` in the given order.
StateVector apply_on_modes(const StateVector& state, const Matrix& op,
                           std::span<const std::size_t> modes);
StateVector apply_on_modes(const StateVector& state, const Matrix& op,
                           std::initializer_list<std::size_t> modes);

// Project mode `mode_index` onto basis value `value` and drop the mode.
// The result is unnormalized; its squared norm is the projection weight.
StateVector project_mode(const StateVector& state, std::size_t mode_index, int value);

// |<a|b>|^2 / (|a|^2 |b|^2); both inputs may be unnormalized.
double fidelity(const StateVector& a, const StateVector& b);
double fidelity(const Vector& a, const Vector& b);

} // namespace ionmirror::fock
