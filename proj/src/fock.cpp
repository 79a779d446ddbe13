#include "ionmirror/fock.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ionmirror::fock {

namespace {

bool all_finite(const Vector& v) { return v.allFinite(); }

std::string dim_message(std::string_view what, std::size_t got) {
    std::ostringstream os;
    os << what << " (got " << got << ")";
    return os.str();
}

} // namespace

// --------------------------------- layouts ----------------------------------

std::string_view to_string(ModeTag tag) {
    switch (tag) {
        case ModeTag::field_1: return "field-1";
        case ModeTag::ion_vibration: return "ion-vibration";
        case ModeTag::ion_electronic: return "ion-electronic";
        case ModeTag::field_2: return "field-2";
        case ModeTag::mirror: return "mirror";
    }
    return "?";
}

ModeLayout::ModeLayout(std::vector<Mode> modes) : modes_(std::move(modes)) {
    if (modes_.empty()) {
        throw DimensionError("ModeLayout: at least one mode required");
    }
    total_ = 1;
    for (const Mode& m : modes_) {
        if (m.dim < 2) {
            throw DimensionError(dim_message("ModeLayout: mode dimension must be >= 2",
                                             static_cast<std::size_t>(m.dim)));
        }
        if (m.tag == ModeTag::ion_electronic && m.dim != 2) {
            throw DimensionError("ModeLayout: electronic mode must have dimension 2");
        }
        if (total_ > kMaxTotalDim / static_cast<std::size_t>(m.dim)) {
            throw MemoryCapError("ModeLayout: composite dimension exceeds 2^16 cap");
        }
        total_ *= static_cast<std::size_t>(m.dim);
    }
}

bool ModeLayout::has(ModeTag tag) const {
    return std::any_of(modes_.begin(), modes_.end(),
                       [tag](const Mode& m) { return m.tag == tag; });
}

std::size_t ModeLayout::index_of(ModeTag tag) const {
    for (std::size_t i = 0; i < modes_.size(); ++i) {
        if (modes_[i].tag == tag) return i;
    }
    throw InvalidArgumentError(std::string("ModeLayout: no mode tagged ") +
                               std::string(to_string(tag)));
}

std::size_t ModeLayout::stride(std::size_t i) const {
    std::size_t s = 1;
    for (std::size_t m = i + 1; m < modes_.size(); ++m) {
        s *= static_cast<std::size_t>(modes_[m].dim);
    }
    return s;
}

std::size_t ModeLayout::flat_index(std::span<const int> occupations) const {
    if (occupations.size() != modes_.size()) {
        throw InvalidArgumentError("flat_index: occupation count != mode count");
    }
    std::size_t flat = 0;
    for (std::size_t i = 0; i < modes_.size(); ++i) {
        const int n = occupations[i];
        if (n < 0 || n >= modes_[i].dim) {
            throw InvalidArgumentError("flat_index: occupation out of range");
        }
        flat = flat * static_cast<std::size_t>(modes_[i].dim) + static_cast<std::size_t>(n);
    }
    return flat;
}

std::vector<int> ModeLayout::occupations(std::size_t flat) const {
    std::vector<int> occ(modes_.size());
    for (std::size_t i = modes_.size(); i-- > 0;) {
        const auto d = static_cast<std::size_t>(modes_[i].dim);
        occ[i] = static_cast<int>(flat % d);
        flat /= d;
    }
    return occ;
}

ModeLayout ModeLayout::concatenated(const ModeLayout& other) const {
    for (const Mode& m : modes_) {
        if (m.tag && other.has(*m.tag)) {
            throw InvalidArgumentError(std::string("tensor: operand layouts share mode ") +
                                       std::string(to_string(*m.tag)));
        }
    }
    std::vector<Mode> joined = modes_;
    joined.insert(joined.end(), other.modes_.begin(), other.modes_.end());
    return ModeLayout(std::move(joined));
}

ModeLayout ModeLayout::without(std::span<const std::size_t> drop) const {
    std::vector<Mode> kept;
    for (std::size_t i = 0; i < modes_.size(); ++i) {
        if (std::find(drop.begin(), drop.end(), i) == drop.end()) {
            kept.push_back(modes_[i]);
        }
    }
    if (kept.empty()) {
        throw InvalidArgumentError("ModeLayout: cannot drop every mode");
    }
    return ModeLayout(std::move(kept));
}

// --------------------------------- states -----------------------------------

StateVector::StateVector(ModeLayout layout, Vector amplitudes)
    : layout_(std::move(layout)), amplitudes_(std::move(amplitudes)) {
    if (static_cast<std::size_t>(amplitudes_.size()) != layout_.total_dim()) {
        throw DimensionError("StateVector: amplitude length != layout dimension");
    }
    if (!all_finite(amplitudes_)) {
        throw OverflowError("StateVector: non-finite amplitude");
    }
    norm_squared_ = amplitudes_.squaredNorm();
}

StateVector StateVector::normalized() const {
    if (norm_squared_ <= 0.0) {
        throw NumericalError("normalized: zero-norm state");
    }
    return StateVector(layout_, amplitudes_ / std::sqrt(norm_squared_));
}

Complex StateVector::amplitude(std::span<const int> occupations) const {
    return amplitudes_(static_cast<Eigen::Index>(layout_.flat_index(occupations)));
}

StateVector fock_state(Mode mode, int n) {
    if (n < 0 || n >= mode.dim) {
        throw InvalidArgumentError("fock_state: occupation out of range");
    }
    Vector v = Vector::Zero(mode.dim);
    v(n) = 1.0;
    return StateVector(ModeLayout{mode}, std::move(v));
}

StateVector basis_state(ModeLayout layout, std::span<const int> occupations) {
    Vector v = Vector::Zero(static_cast<Eigen::Index>(layout.total_dim()));
    v(static_cast<Eigen::Index>(layout.flat_index(occupations))) = 1.0;
    return StateVector(std::move(layout), std::move(v));
}

// -------------------------------- operators ---------------------------------

Operator::Operator(ModeLayout layout, Matrix entries, Hermiticity herm)
    : layout_(std::move(layout)), entries_(std::move(entries)), hermiticity_(herm) {
    const auto n = static_cast<Eigen::Index>(layout_.total_dim());
    if (entries_.rows() != n || entries_.cols() != n) {
        throw DimensionError("Operator: matrix side != layout dimension");
    }
}

Operator Operator::adjoint() const {
    return Operator(layout_, entries_.adjoint(), hermiticity_);
}

Operator Operator::identity(ModeLayout layout) {
    const auto n = static_cast<Eigen::Index>(layout.total_dim());
    return Operator(std::move(layout), Matrix::Identity(n, n), Hermiticity::hermitian);
}

namespace {
Hermiticity combine_additive(Hermiticity a, Hermiticity b) {
    if (a == Hermiticity::hermitian && b == Hermiticity::hermitian) {
        return Hermiticity::hermitian;
    }
    return Hermiticity::unknown;
}
} // namespace

Operator operator+(const Operator& a, const Operator& b) {
    if (a.layout() != b.layout()) throw DimensionError("operator+: layout mismatch");
    return Operator(a.layout_, a.entries_ + b.entries_,
                    combine_additive(a.hermiticity_, b.hermiticity_));
}

Operator operator-(const Operator& a, const Operator& b) {
    if (a.layout() != b.layout()) throw DimensionError("operator-: layout mismatch");
    return Operator(a.layout_, a.entries_ - b.entries_,
                    combine_additive(a.hermiticity_, b.hermiticity_));
}

Operator operator*(const Operator& a, const Operator& b) {
    if (a.layout() != b.layout()) throw DimensionError("operator*: layout mismatch");
    return Operator(a.layout_, a.entries_ * b.entries_, Hermiticity::unknown);
}

Operator operator*(Complex c, const Operator& a) {
    Hermiticity h = Hermiticity::unknown;
    if (a.hermiticity_ == Hermiticity::hermitian && c.imag() == 0.0) {
        h = Hermiticity::hermitian;
    }
    return Operator(a.layout_, c * a.entries_, h);
}

StateVector operator*(const Operator& a, const StateVector& v) {
    if (a.layout() != v.layout()) throw DimensionError("operator*state: layout mismatch");
    return StateVector(v.layout(), a.entries() * v.amplitudes());
}

Operator ladder(int dim) { return ladder(Mode(dim)); }

Operator ladder(Mode mode) {
    if (mode.dim < 2) {
        throw DimensionError(dim_message("ladder: dimension must be >= 2",
                                         static_cast<std::size_t>(mode.dim)));
    }
    Matrix m = Matrix::Zero(mode.dim, mode.dim);
    for (int n = 1; n < mode.dim; ++n) {
        m(n - 1, n) = std::sqrt(static_cast<double>(n));
    }
    return Operator(ModeLayout{mode}, std::move(m),
                    Hermiticity::anti_hermitian_part_present);
}

Operator number_operator(Mode mode) {
    Matrix m = Matrix::Zero(mode.dim, mode.dim);
    for (int n = 0; n < mode.dim; ++n) m(n, n) = static_cast<double>(n);
    return Operator(ModeLayout{mode}, std::move(m), Hermiticity::hermitian);
}

// ----------------------------- coherent states -------------------------------

int required_coherent_dim(double alpha_magnitude) {
    const double a = std::abs(alpha_magnitude);
    const int d = static_cast<int>(std::ceil(a * a + 6.0 * a + 10.0));
    return std::max(d, 2);
}

namespace {
// Captured Poisson weight of |alpha> under a cutoff.
long double captured_weight(double alpha_magnitude, int dim) {
    const long double lambda =
        static_cast<long double>(alpha_magnitude) * alpha_magnitude;
    long double term = std::exp(-lambda);
    long double sum = 0.0L;
    for (int n = 0; n < dim; ++n) {
        sum += term;
        term *= lambda / static_cast<long double>(n + 1);
    }
    return sum;
}
} // namespace

StateVector coherent_state(CoherentAmplitude alpha, Mode mode) {
    // The sizing rule guarantees a tail below 1e-10; smaller cutoffs are fine
    // as long as they capture the same weight (e.g. the vacuum at any dim).
    if (mode.dim < required_coherent_dim(alpha.magnitude()) &&
        captured_weight(alpha.magnitude(), mode.dim) < 1.0L - 1e-10L) {
        std::ostringstream os;
        os << "coherent_state: dim " << mode.dim << " captures less than 1 - 1e-10 of |alpha| = "
           << alpha.magnitude();
        throw TruncationError(os.str());
    }
    Vector v(mode.dim);
    Complex c = std::exp(-0.5 * alpha.magnitude() * alpha.magnitude());
    for (int n = 0; n < mode.dim; ++n) {
        v(n) = c;
        c *= alpha.value / std::sqrt(static_cast<double>(n + 1));
    }
    return StateVector(ModeLayout{mode}, std::move(v));
}

StateVector coherent_state(CoherentAmplitude alpha, int dim) {
    return coherent_state(alpha, Mode(dim));
}

// ------------------------------- operations ---------------------------------

StateVector tensor(const StateVector& a, const StateVector& b) {
    ModeLayout joined = a.layout().concatenated(b.layout());
    const auto na = a.amplitudes().size();
    const auto nb = b.amplitudes().size();
    Vector v(na * nb);
    for (Eigen::Index i = 0; i < na; ++i) {
        v.segment(i * nb, nb) = a.amplitudes()(i) * b.amplitudes();
    }
    return StateVector(std::move(joined), std::move(v));
}

Operator tensor(const Operator& a, const Operator& b) {
    ModeLayout joined = a.layout().concatenated(b.layout());
    const auto na = a.entries().rows();
    const auto nb = b.entries().rows();
    Matrix m(na * nb, na * nb);
    for (Eigen::Index i = 0; i < na; ++i) {
        for (Eigen::Index j = 0; j < na; ++j) {
            m.block(i * nb, j * nb, nb, nb) = a.entries()(i, j) * b.entries();
        }
    }
    Hermiticity h = Hermiticity::unknown;
    if (a.hermiticity() == Hermiticity::hermitian &&
        b.hermiticity() == Hermiticity::hermitian) {
        h = Hermiticity::hermitian;
    }
    return Operator(std::move(joined), std::move(m), h);
}

ReducedDensity partial_trace(const StateVector& state,
                             std::span<const std::size_t> keep) {
    if (keep.empty()) {
        throw InvalidArgumentError("partial_trace: empty keep set");
    }
    const ModeLayout& layout = state.layout();
    for (std::size_t k : keep) {
        if (k >= layout.mode_count()) {
            throw InvalidArgumentError("partial_trace: mode index out of range");
        }
    }

    std::vector<std::size_t> traced;
    for (std::size_t i = 0; i < layout.mode_count(); ++i) {
        if (std::find(keep.begin(), keep.end(), i) == keep.end()) traced.push_back(i);
    }

    std::size_t kept_dim = 1;
    for (std::size_t k : keep) kept_dim *= static_cast<std::size_t>(layout.dim(k));
    std::size_t traced_dim = 1;
    for (std::size_t t : traced) traced_dim *= static_cast<std::size_t>(layout.dim(t));

    // Reshape psi into a (kept x traced) matrix, then rho = Psi Psi^dag.
    Matrix psi = Matrix::Zero(static_cast<Eigen::Index>(kept_dim),
                              static_cast<Eigen::Index>(traced_dim));
    const std::size_t total = layout.total_dim();
    for (std::size_t flat = 0; flat < total; ++flat) {
        const std::vector<int> occ = layout.occupations(flat);
        std::size_t row = 0;
        for (std::size_t k : keep) {
            row = row * static_cast<std::size_t>(layout.dim(k)) +
                  static_cast<std::size_t>(occ[k]);
        }
        std::size_t col = 0;
        for (std::size_t t : traced) {
            col = col * static_cast<std::size_t>(layout.dim(t)) +
                  static_cast<std::size_t>(occ[t]);
        }
        psi(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) =
            state.amplitudes()(static_cast<Eigen::Index>(flat));
    }

    std::vector<Mode> kept_modes;
    for (std::size_t k : keep) kept_modes.push_back(layout.mode(k));
    return ReducedDensity{ModeLayout(std::move(kept_modes)), psi * psi.adjoint()};
}

ReducedDensity partial_trace(const StateVector& state,
                             std::initializer_list<std::size_t> keep) {
    return partial_trace(state, std::span<const std::size_t>(keep.begin(), keep.size()));
}

// ------------------------- matrix exponential --------------------------------

namespace {

// Diagonal [6/6] Pade coefficients of e^x.
constexpr double kPade6[] = {1.0,          1.0 / 2.0,     5.0 / 44.0, 1.0 / 66.0,
                             1.0 / 792.0,  1.0 / 15840.0, 1.0 / 665280.0};

Matrix expm_pade_small(const Matrix& a) {
    const auto n = a.rows();
    const Matrix a2 = a * a;
    const Matrix a4 = a2 * a2;
    const Matrix a6 = a2 * a4;
    const Matrix id = Matrix::Identity(n, n);
    const Matrix even = kPade6[0] * id + kPade6[2] * a2 + kPade6[4] * a4 + kPade6[6] * a6;
    const Matrix odd = a * (kPade6[1] * id + kPade6[3] * a2 + kPade6[5] * a4);
    // p/q with q(x) = p(-x); both are polynomials in a, so they commute.
    return (even - odd).partialPivLu().solve(even + odd);
}

} // namespace

Matrix expm(const Matrix& m) {
    if (m.rows() != m.cols()) {
        throw DimensionError("expm: matrix must be square");
    }
    if (!m.allFinite()) {
        throw OverflowError("expm: non-finite entry in generator");
    }
    const double norm = m.cwiseAbs().rowwise().sum().maxCoeff(); // infinity norm
    int squarings = 0;
    if (norm > 0.5) {
        squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
    }
    Matrix r = expm_pade_small(m / std::pow(2.0, squarings));
    for (int s = 0; s < squarings; ++s) r = r * r;
    if (!r.allFinite()) {
        throw OverflowError("expm: non-finite result");
    }
    return r;
}

StateVector expm_apply(const Operator& generator, double t, const StateVector& state) {
    if (generator.layout() != state.layout()) {
        throw DimensionError("expm_apply: generator/state layout mismatch");
    }
    if (t < 0.0) {
        throw InvalidArgumentError("expm_apply: negative time");
    }
    const Matrix u = expm(Complex(0.0, -t) * generator.entries());
    Vector v = u * state.amplitudes();
    if (!v.allFinite()) {
        throw OverflowError("expm_apply: non-finite amplitudes");
    }
    return StateVector(state.layout(), std::move(v));
}

// ----------------------- mode-targeted application ---------------------------

StateVector apply_on_modes(const StateVector& state, const Matrix& op,
                           std::span<const std::size_t> modes) {
    const ModeLayout& layout = state.layout();
    std::size_t sub_dim = 1;
    std::vector<std::size_t> strides, dims;
    for (std::size_t m : modes) {
        if (m >= layout.mode_count()) {
            throw InvalidArgumentError("apply_on_modes: mode index out of range");
        }
        sub_dim *= static_cast<std::size_t>(layout.dim(m));
        strides.push_back(layout.stride(m));
        dims.push_back(static_cast<std::size_t>(layout.dim(m)));
    }
    if (op.rows() != static_cast<Eigen::Index>(sub_dim) || op.rows() != op.cols()) {
        throw DimensionError("apply_on_modes: operator side != product of mode dims");
    }

    // Offsets of each target sub-index combination in the flat index.
    std::vector<std::size_t> target_offset(sub_dim, 0);
    for (std::size_t c = 0; c < sub_dim; ++c) {
        std::size_t rem = c;
        for (std::size_t i = modes.size(); i-- > 0;) {
            target_offset[c] += (rem % dims[i]) * strides[i];
            rem /= dims[i];
        }
    }

    // Spectator combinations: walk every flat index whose target digits are 0.
    std::vector<std::size_t> spect_modes, spect_dims, spect_strides;
    for (std::size_t i = 0; i < layout.mode_count(); ++i) {
        if (std::find(modes.begin(), modes.end(), i) == modes.end()) {
            spect_modes.push_back(i);
            spect_dims.push_back(static_cast<std::size_t>(layout.dim(i)));
            spect_strides.push_back(layout.stride(i));
        }
    }
    std::size_t spect_count = 1;
    for (std::size_t d : spect_dims) spect_count *= d;

    Vector out = Vector::Zero(state.amplitudes().size());
    Vector gathered(static_cast<Eigen::Index>(sub_dim));
    for (std::size_t s = 0; s < spect_count; ++s) {
        std::size_t base = 0, rem = s;
        for (std::size_t i = spect_dims.size(); i-- > 0;) {
            base += (rem % spect_dims[i]) * spect_strides[i];
            rem /= spect_dims[i];
        }
        for (std::size_t c = 0; c < sub_dim; ++c) {
            gathered(static_cast<Eigen::Index>(c)) =
                state.amplitudes()(static_cast<Eigen::Index>(base + target_offset[c]));
        }
        const Vector mixed = op * gathered;
        for (std::size_t c = 0; c < sub_dim; ++c) {
            out(static_cast<Eigen::Index>(base + target_offset[c])) =
                mixed(static_cast<Eigen::Index>(c));
        }
    }
    return StateVector(layout, std::move(out));
}

StateVector apply_on_modes(const StateVector& state, const Matrix& op,
                           std::initializer_list<std::size_t> modes) {
    return apply_on_modes(state, op, std::span<const std::size_t>(modes.begin(), modes.size()));
}

StateVector project_mode(const StateVector& state, std::size_t mode_index, int value) {
    const ModeLayout& layout = state.layout();
    if (mode_index >= layout.mode_count()) {
        throw InvalidArgumentError("project_mode: mode index out of range");
    }
    if (value < 0 || value >= layout.dim(mode_index)) {
        throw InvalidArgumentError("project_mode: basis value out of range");
    }
    const std::size_t drop[] = {mode_index};
    ModeLayout rest = layout.without(drop);
    Vector v(static_cast<Eigen::Index>(rest.total_dim()));

    const std::size_t stride = layout.stride(mode_index);
    const auto d = static_cast<std::size_t>(layout.dim(mode_index));
    const std::size_t outer = layout.total_dim() / (stride * d);
    Eigen::Index w = 0;
    for (std::size_t o = 0; o < outer; ++o) {
        const std::size_t base = o * stride * d + static_cast<std::size_t>(value) * stride;
        for (std::size_t inner = 0; inner < stride; ++inner) {
            v(w++) = state.amplitudes()(static_cast<Eigen::Index>(base + inner));
        }
    }
    return StateVector(std::move(rest), std::move(v));
}

double fidelity(const Vector& a, const Vector& b) {
    const double na = a.squaredNorm(), nb = b.squaredNorm();
    if (na <= 0.0 || nb <= 0.0) {
        throw NumericalError("fidelity: zero-norm state");
    }
    return std::norm(a.dot(b)) / (na * nb);
}

double fidelity(const StateVector& a, const StateVector& b) {
    if (a.layout() != b.layout()) throw DimensionError("fidelity: layout mismatch");
    return fidelity(a.amplitudes(), b.amplitudes());
}

} // namespace ionmirror::fock
