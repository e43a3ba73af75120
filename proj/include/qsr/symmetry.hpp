#pragma once

#include <cstddef>
#include <vector>

#include "qsr/qstate.hpp"

namespace qsr::symmetry {

enum class Statistics { bosonic, fermionic };

// A set of tensor factors holding identical particles. All referenced factors
// must share one dimension; single-factor groups are rejected (the projector
// would silently be the identity).
struct IdenticalGroup {
    std::vector<std::size_t> factor_indices;
    Statistics statistics = Statistics::bosonic;

    // Explicit n! permutation sum; factorial growth caps the group size.
    static constexpr std::size_t max_factors = 4;
};

// The (anti)symmetrization projector together with the group it was built
// for. Validated idempotent and Hermitian at construction.
struct ProjectorBundle {
    OperatorMatrix projector;
    IdenticalGroup group;
    SpaceLayout layout;
};

// One permutation operator of the group's factors, as an exact 0/1 matrix.
// perm maps slot -> slot: the content of group factor k moves to group factor
// perm[k].
OperatorMatrix permutation_operator(const SpaceLayout& layout,
                                    const IdenticalGroup& group,
                                    const std::vector<std::size_t>& perm);

// All |group|! permutation operators, parity-ordered as generated.
std::vector<std::pair<OperatorMatrix, int>> group_permutations(
    const SpaceLayout& layout, const IdenticalGroup& group);

// Pi = (1/n!) sum_pi sgn(pi)^f P_pi. The signed integer sum is accumulated
// exactly before the single 1/n! scaling, so cancellations (e.g. three
// fermions on two levels) give an exactly zero matrix.
ProjectorBundle build_projector(const SpaceLayout& layout,
                                const IdenticalGroup& group,
                                const Tolerances& tol = default_tolerances());

// nu * Pi rho Pi with nu = 1/tr(Pi rho Pi). Throws AnnihilatedError when the
// state has no component in the (anti)symmetric sector.
StateOperator project_normalize(const StateOperator& rho, const ProjectorBundle& p,
                                const Tolerances& tol = default_tolerances());

// Compares the product description |psi><psi| (x) T_env against its
// symmetrized counterpart on a permutation-symmetric observable. psi lives on
// the layout's first factor, T_env on the remaining factors in order.
bool descriptions_agree(const StateVector& psi, const StateOperator& t_env,
                        const ProjectorBundle& p, const OperatorMatrix& obs,
                        const Tolerances& tol = default_tolerances());

}  // namespace qsr::symmetry
