#include "qsr/qstate.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "qsr/rng.hpp"

namespace qsr {

// ── StateVector ──────────────────────────────────────────────────────────────

StateVector::StateVector(Vector amplitudes) : amp_(std::move(amplitudes)) {
    if (amp_.size() < 1) throw DimensionError("StateVector: dim must be >= 1");
}

StateVector StateVector::basis(Index dim, Index k) {
    if (k < 0 || k >= dim) throw DimensionError("StateVector::basis: index out of range");
    Vector v = Vector::Zero(dim);
    v(k) = 1.0;
    return StateVector(std::move(v));
}

StateVector StateVector::normalized() const {
    double n = amp_.norm();
    if (n < 1e-300) throw PreconditionError("StateVector::normalized: zero vector");
    return StateVector(amp_ / n);
}

Complex StateVector::overlap(const StateVector& other) const {
    if (dim() != other.dim())
        throw DimensionError("StateVector::overlap: dimension mismatch");
    return amp_.dot(other.amp_);  // Eigen dot conjugates the left argument
}

// ── OperatorMatrix ───────────────────────────────────────────────────────────

OperatorMatrix::OperatorMatrix(Matrix entries) : m_(std::move(entries)) {
    if (m_.rows() != m_.cols() || m_.rows() < 1)
        throw DimensionError("OperatorMatrix: matrix must be square and nonempty");
}

OperatorMatrix OperatorMatrix::identity(Index dim) {
    return OperatorMatrix(Matrix::Identity(dim, dim));
}

double OperatorMatrix::unitarity_defect() const {
    Matrix d = m_.adjoint() * m_ - Matrix::Identity(dim(), dim());
    return d.cwiseAbs().maxCoeff();
}

// ── StateOperator ────────────────────────────────────────────────────────────

StateOperator StateOperator::make(Matrix entries, const Tolerances& tol) {
    if (entries.rows() != entries.cols() || entries.rows() < 1)
        throw DimensionError("StateOperator: matrix must be square and nonempty");

    double herm = (entries - entries.adjoint().eval()).cwiseAbs().maxCoeff();
    if (herm > tol.hermiticity) {
        std::ostringstream os;
        os << "StateOperator: not Hermitian (defect " << herm << ")";
        throw PreconditionError(os.str());
    }
    double tr_err = std::abs(entries.trace() - Complex(1.0, 0.0));
    if (tr_err > tol.trace_one) {
        std::ostringstream os;
        os << "StateOperator: trace differs from 1 by " << tr_err;
        throw PreconditionError(os.str());
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(entries, Eigen::EigenvaluesOnly);
    double min_eig = es.eigenvalues().minCoeff();
    if (min_eig < tol.positivity_floor) {
        std::ostringstream os;
        os << "StateOperator: negative eigenvalue " << min_eig;
        throw PreconditionError(os.str());
    }
    return StateOperator(std::move(entries));
}

StateOperator pure_state(const StateVector& psi) {
    StateVector n = psi.normalized();
    return StateOperator::make(n.amplitudes() * n.amplitudes().adjoint());
}

// ── SpaceLayout ──────────────────────────────────────────────────────────────

SpaceLayout::SpaceLayout(std::vector<Index> dims, std::vector<std::string> names)
    : factor_dims(std::move(dims)), labels(std::move(names)) {
    if (factor_dims.empty()) throw LayoutError("SpaceLayout: no factors");
    for (Index d : factor_dims)
        if (d < 1) throw LayoutError("SpaceLayout: factor dims must be positive");
    if (labels.size() != factor_dims.size())
        throw LayoutError("SpaceLayout: one label per factor required");
}

Index SpaceLayout::dim() const {
    Index p = 1;
    for (Index d : factor_dims) p *= d;
    return p;
}

std::vector<Index> SpaceLayout::digits_of(Index composite) const {
    std::vector<Index> digits(factors());
    for (std::size_t f = factors(); f-- > 0;) {
        digits[f] = composite % factor_dims[f];
        composite /= factor_dims[f];
    }
    return digits;
}

Index SpaceLayout::index_of(const std::vector<Index>& digits) const {
    if (digits.size() != factors())
        throw LayoutError("SpaceLayout::index_of: wrong digit count");
    Index idx = 0;
    for (std::size_t f = 0; f < factors(); ++f) {
        idx = idx * factor_dims[f] + digits[f];
    }
    return idx;
}

// ── Tensor products ──────────────────────────────────────────────────────────

namespace {

Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Index i = 0; i < a.rows(); ++i)
        for (Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

}  // namespace

StateVector tensor(const StateVector& a, const StateVector& b) {
    Vector out(a.dim() * b.dim());
    for (Index i = 0; i < a.dim(); ++i)
        out.segment(i * b.dim(), b.dim()) = a.amplitudes()(i) * b.amplitudes();
    return StateVector(std::move(out));
}

OperatorMatrix tensor(const OperatorMatrix& a, const OperatorMatrix& b) {
    return OperatorMatrix(kron(a.entries(), b.entries()));
}

StateOperator tensor(const StateOperator& a, const StateOperator& b,
                     const Tolerances& tol) {
    return StateOperator::make(kron(a.entries(), b.entries()), tol);
}

// ── Partial trace ────────────────────────────────────────────────────────────

StateOperator partial_trace(const StateOperator& rho, const SpaceLayout& layout,
                            const std::vector<std::size_t>& keep,
                            const Tolerances& tol) {
    if (layout.dim() != rho.dim())
        throw LayoutError("partial_trace: layout dimension does not match state");
    if (keep.empty()) throw LayoutError("partial_trace: keep set is empty");
    std::vector<std::size_t> k = keep;
    std::sort(k.begin(), k.end());
    if (std::adjacent_find(k.begin(), k.end()) != k.end())
        throw LayoutError("partial_trace: duplicate factor in keep set");
    if (k.back() >= layout.factors())
        throw LayoutError("partial_trace: keep index out of range");

    Index kept_dim = 1;
    for (std::size_t f : k) kept_dim *= layout.factor_dims[f];

    const Index n = layout.dim();
    // composite index -> (kept part, traced part)
    std::vector<Index> kept_of(n), traced_of(n);
    for (Index i = 0; i < n; ++i) {
        auto digits = layout.digits_of(i);
        Index kp = 0, tp = 0;
        std::size_t ki = 0;
        for (std::size_t f = 0; f < layout.factors(); ++f) {
            if (ki < k.size() && k[ki] == f) {
                kp = kp * layout.factor_dims[f] + digits[f];
                ++ki;
            } else {
                tp = tp * layout.factor_dims[f] + digits[f];
            }
        }
        kept_of[i] = kp;
        traced_of[i] = tp;
    }

    // bucket composite indices by traced part; sum diagonal blocks
    const Index traced_dim = n / kept_dim;
    std::vector<std::vector<Index>> bucket(static_cast<std::size_t>(traced_dim));
    for (Index i = 0; i < n; ++i) bucket[static_cast<std::size_t>(traced_of[i])].push_back(i);

    Matrix out = Matrix::Zero(kept_dim, kept_dim);
    const Matrix& m = rho.entries();
    for (const auto& idx : bucket)
        for (Index i : idx)
            for (Index j : idx) out(kept_of[i], kept_of[j]) += m(i, j);

    return StateOperator::make(std::move(out), tol);
}

// ── Evolution and metrics ────────────────────────────────────────────────────

StateOperator evolve(const OperatorMatrix& u, const StateOperator& rho,
                     const Tolerances& tol) {
    if (u.dim() != rho.dim()) throw DimensionError("evolve: dimension mismatch");
    double defect = u.unitarity_defect();
    if (defect > tol.unitarity) {
        std::ostringstream os;
        os << "evolve: operator is not unitary (defect " << defect << ")";
        throw PreconditionError(os.str());
    }
    return StateOperator::make(u.entries() * rho.entries() * u.entries().adjoint(), tol);
}

double trace_distance(const StateOperator& a, const StateOperator& b) {
    if (a.dim() != b.dim())
        throw DimensionError("trace_distance: dimension mismatch");
    Eigen::SelfAdjointEigenSolver<Matrix> es(a.entries() - b.entries(),
                                             Eigen::EigenvaluesOnly);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

// ── Seeded generators ────────────────────────────────────────────────────────

StateVector random_state(Index dim, std::uint64_t seed) {
    if (dim < 1) throw DimensionError("random_state: dim must be >= 1");
    rng::Stream s(seed);
    Vector v(dim);
    for (Index i = 0; i < dim; ++i) v(i) = s.complex_normal();
    return StateVector(std::move(v)).normalized();
}

OperatorMatrix random_unitary(Index dim, std::uint64_t seed) {
    if (dim < 1) throw DimensionError("random_unitary: dim must be >= 1");
    rng::Stream s(seed);
    Matrix g(dim, dim);
    for (Index i = 0; i < dim; ++i)
        for (Index j = 0; j < dim; ++j) g(i, j) = s.complex_normal();
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ();
    Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    // fix the phase gauge so the result is unique and well spread
    for (Index j = 0; j < dim; ++j) {
        Complex d = r(j, j);
        double mag = std::abs(d);
        q.col(j) *= (mag > 0) ? d / mag : Complex(1.0, 0.0);
    }
    return OperatorMatrix(std::move(q));
}

StateOperator random_density(Index dim, std::uint64_t seed, Index rank) {
    if (dim < 1) throw DimensionError("random_density: dim must be >= 1");
    if (rank <= 0 || rank > dim) rank = dim;
    rng::Stream s(seed);
    Matrix m = Matrix::Zero(dim, dim);
    double wsum = 0.0;
    std::vector<double> w(static_cast<std::size_t>(rank));
    for (auto& wi : w) {
        wi = s.uniform01() + 1e-3;
        wsum += wi;
    }
    for (Index r = 0; r < rank; ++r) {
        Vector v(dim);
        for (Index i = 0; i < dim; ++i) v(i) = s.complex_normal();
        v.normalize();
        m += (w[static_cast<std::size_t>(r)] / wsum) * (v * v.adjoint());
    }
    // clean the trace exactly enough for the factory
    m /= m.trace().real();
    return StateOperator::make(std::move(m));
}

}  // namespace qsr
