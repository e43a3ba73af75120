#include "qsr/symmetry.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace qsr::symmetry {

namespace {

void check_group(const SpaceLayout& layout, const IdenticalGroup& group) {
    if (group.factor_indices.size() < 2)
        throw LayoutError("IdenticalGroup: needs at least 2 factors");
    if (group.factor_indices.size() > IdenticalGroup::max_factors)
        throw LayoutError("IdenticalGroup: more than 4 factors not supported");
    std::vector<std::size_t> sorted = group.factor_indices;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw LayoutError("IdenticalGroup: duplicate factor index");
    if (sorted.back() >= layout.factors())
        throw LayoutError("IdenticalGroup: factor index out of range");
    Index d = layout.factor_dims[group.factor_indices[0]];
    for (std::size_t f : group.factor_indices)
        if (layout.factor_dims[f] != d)
            throw LayoutError("IdenticalGroup: factors must have equal dimension");
}

int permutation_sign(std::vector<std::size_t> p) {
    int sign = 1;
    for (std::size_t i = 0; i < p.size(); ++i) {
        while (p[i] != i) {
            std::swap(p[i], p[p[i]]);
            sign = -sign;
        }
    }
    return sign;
}

}  // namespace

OperatorMatrix permutation_operator(const SpaceLayout& layout,
                                    const IdenticalGroup& group,
                                    const std::vector<std::size_t>& perm) {
    check_group(layout, group);
    if (perm.size() != group.factor_indices.size())
        throw LayoutError("permutation_operator: wrong permutation size");

    const Index n = layout.dim();
    Matrix p = Matrix::Zero(n, n);
    for (Index b = 0; b < n; ++b) {
        auto digits = layout.digits_of(b);
        auto target = digits;
        for (std::size_t k = 0; k < perm.size(); ++k)
            target[group.factor_indices[perm[k]]] = digits[group.factor_indices[k]];
        p(layout.index_of(target), b) = 1.0;
    }
    return OperatorMatrix(std::move(p));
}

std::vector<std::pair<OperatorMatrix, int>> group_permutations(
    const SpaceLayout& layout, const IdenticalGroup& group) {
    check_group(layout, group);
    std::vector<std::size_t> perm(group.factor_indices.size());
    std::iota(perm.begin(), perm.end(), std::size_t{0});

    std::vector<std::pair<OperatorMatrix, int>> out;
    do {
        out.emplace_back(permutation_operator(layout, group, perm),
                         permutation_sign(perm));
    } while (std::next_permutation(perm.begin(), perm.end()));
    return out;
}

ProjectorBundle build_projector(const SpaceLayout& layout,
                                const IdenticalGroup& group,
                                const Tolerances& tol) {
    check_group(layout, group);
    const Index n = layout.dim();
    const bool fermionic = group.statistics == Statistics::fermionic;

    Matrix sum = Matrix::Zero(n, n);
    std::size_t count = 0;
    for (const auto& [p, sign] : group_permutations(layout, group)) {
        sum += (fermionic && sign < 0) ? -p.entries() : p.entries();
        ++count;
    }
    Matrix pi = sum / static_cast<double>(count);

    double idem = (pi * pi - pi).cwiseAbs().maxCoeff();
    if (idem > tol.projector_algebra) {
        std::ostringstream os;
        os << "build_projector: idempotence defect " << idem;
        throw NumericalError(os.str());
    }
    double herm = (pi - pi.adjoint().eval()).cwiseAbs().maxCoeff();
    if (herm > tol.hermiticity)
        throw NumericalError("build_projector: projector not Hermitian");

    return ProjectorBundle{OperatorMatrix(std::move(pi)), group, layout};
}

StateOperator project_normalize(const StateOperator& rho, const ProjectorBundle& p,
                                const Tolerances& tol) {
    if (rho.dim() != p.projector.dim())
        throw DimensionError("project_normalize: dimension mismatch");
    Matrix sandwiched = p.projector.entries() * rho.entries() * p.projector.entries();
    double t = sandwiched.trace().real();
    if (t < tol.annihilation)
        throw AnnihilatedError("project_normalize: state annihilated by projector");
    return StateOperator::make(sandwiched / t, tol);
}

bool descriptions_agree(const StateVector& psi, const StateOperator& t_env,
                        const ProjectorBundle& p, const OperatorMatrix& obs,
                        const Tolerances& tol) {
    const SpaceLayout& layout = p.layout;
    if (psi.dim() != layout.factor_dims[0])
        throw DimensionError("descriptions_agree: psi must live on factor 0");
    if (psi.dim() * t_env.dim() != layout.dim())
        throw DimensionError("descriptions_agree: psi (x) T_env must fill the layout");
    if (obs.dim() != layout.dim())
        throw DimensionError("descriptions_agree: observable dimension mismatch");

    for (const auto& [perm, sign] : group_permutations(layout, p.group)) {
        (void)sign;
        double comm = (obs.entries() * perm.entries() - perm.entries() * obs.entries())
                          .cwiseAbs()
                          .maxCoeff();
        if (comm > tol.projector_algebra)
            throw PreconditionError(
                "descriptions_agree: observable is not permutation-symmetric");
    }

    StateOperator product = tensor(pure_state(psi), t_env, tol);
    StateOperator symmetrized = project_normalize(product, p, tol);

    Complex lhs = (obs.entries() * product.entries()).trace();
    Complex rhs = (obs.entries() * symmetrized.entries()).trace();
    return std::abs(lhs - rhs) <= tol.agreement;
}

}  // namespace qsr::symmetry
