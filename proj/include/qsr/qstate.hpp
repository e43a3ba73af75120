#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "qsr/errors.hpp"
#include "qsr/tolerances.hpp"

namespace qsr {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;
using Index = Eigen::Index;

// ── Domain types ─────────────────────────────────────────────────────────────

// Pure state on a finite-dimensional Hilbert space. Immutable.
class StateVector {
public:
    explicit StateVector(Vector amplitudes);

    static StateVector basis(Index dim, Index k);

    Index dim() const { return amp_.size(); }
    const Vector& amplitudes() const { return amp_; }
    double norm() const { return amp_.norm(); }

    // Unit-norm copy; throws PreconditionError on (numerically) zero input.
    StateVector normalized() const;

    Complex overlap(const StateVector& other) const;  // <this|other>

private:
    Vector amp_;
};

// Square complex matrix acting on a Hilbert space (unitaries, projectors,
// observables, cross terms). Immutable.
class OperatorMatrix {
public:
    explicit OperatorMatrix(Matrix entries);

    static OperatorMatrix identity(Index dim);

    Index dim() const { return m_.rows(); }
    const Matrix& entries() const { return m_; }

    OperatorMatrix adjoint() const { return OperatorMatrix(m_.adjoint()); }

    // max elementwise |U^dag U - I|
    double unitarity_defect() const;
    bool is_unitary(double tol) const { return unitarity_defect() <= tol; }

private:
    Matrix m_;
};

// Hermitian, positive, unit-trace operator. The factory validates all three
// invariants; there is no mutable access afterwards.
class StateOperator {
public:
    static StateOperator make(Matrix entries,
                              const Tolerances& tol = default_tolerances());

    Index dim() const { return m_.rows(); }
    const Matrix& entries() const { return m_; }

    double trace() const { return m_.trace().real(); }
    double purity() const { return (m_ * m_).trace().real(); }

private:
    explicit StateOperator(Matrix m) : m_(std::move(m)) {}
    Matrix m_;
};

// |psi><psi| as a validated state operator.
StateOperator pure_state(const StateVector& psi);

// Ordered tensor-factor structure of a composite space.
struct SpaceLayout {
    std::vector<Index> factor_dims;
    std::vector<std::string> labels;

    SpaceLayout(std::vector<Index> dims, std::vector<std::string> names);

    Index dim() const;
    std::size_t factors() const { return factor_dims.size(); }

    // Row-major digit convention: factor 0 is the slowest index, matching
    // tensor()'s left-operand-slow rule.
    std::vector<Index> digits_of(Index composite) const;
    Index index_of(const std::vector<Index>& digits) const;
};

// ── Operations ───────────────────────────────────────────────────────────────

// Kronecker products, left operand slow.
StateVector tensor(const StateVector& a, const StateVector& b);
OperatorMatrix tensor(const OperatorMatrix& a, const OperatorMatrix& b);
StateOperator tensor(const StateOperator& a, const StateOperator& b,
                     const Tolerances& tol = default_tolerances());

// Reduced state on the kept factors (ascending order, non-empty, unique).
StateOperator partial_trace(const StateOperator& rho, const SpaceLayout& layout,
                            const std::vector<std::size_t>& keep,
                            const Tolerances& tol = default_tolerances());

// U rho U^dag. Throws PreconditionError if U is not unitary within tolerance.
StateOperator evolve(const OperatorMatrix& u, const StateOperator& rho,
                     const Tolerances& tol = default_tolerances());

// (1/2) sum |eigenvalues(a - b)|.
double trace_distance(const StateOperator& a, const StateOperator& b);

// Seeded generators. Deterministic: same seed, same output.
StateVector random_state(Index dim, std::uint64_t seed);
OperatorMatrix random_unitary(Index dim, std::uint64_t seed);

// Random full- or low-rank density operator (mixture of seeded pure states).
StateOperator random_density(Index dim, std::uint64_t seed, Index rank = 0);

}  // namespace qsr
