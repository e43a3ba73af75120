#include "qsr/reduction.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "qsr/rng.hpp"

namespace qsr::reduction {

namespace {

Matrix kron2(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Index i = 0; i < a.rows(); ++i)
        for (Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

double projector_defect(const Matrix& q) {
    double idem = (q * q - q).cwiseAbs().maxCoeff();
    double herm = (q - q.adjoint().eval()).cwiseAbs().maxCoeff();
    return std::max(idem, herm);
}

void check_signal_projectors(const std::vector<OperatorMatrix>& qs, Index dim,
                             const Tolerances& tol) {
    for (std::size_t i = 0; i < qs.size(); ++i) {
        if (qs[i].dim() != dim)
            throw DimensionError("signal projector dimension mismatch");
        if (projector_defect(qs[i].entries()) > tol.projector_algebra)
            throw PreconditionError("signal projectors must be orthogonal projectors");
        for (std::size_t j = i + 1; j < qs.size(); ++j) {
            double overlap =
                (qs[i].entries() * qs[j].entries()).cwiseAbs().maxCoeff();
            if (overlap > tol.projector_algebra)
                throw PreconditionError("signal projectors must be mutually orthogonal");
        }
    }
}

}  // namespace

// ── ChannelDecomposition ─────────────────────────────────────────────────────

ChannelDecomposition::ChannelDecomposition(std::vector<StateVector> channels,
                                           std::vector<Complex> coeffs,
                                           std::vector<bool> absorbed_flags,
                                           const Tolerances& tol)
    : channels_(std::move(channels)),
      coeffs_(std::move(coeffs)),
      absorbed_(std::move(absorbed_flags)) {
    if (channels_.empty())
        throw PreconditionError("ChannelDecomposition: no channels");
    if (coeffs_.size() != channels_.size() || absorbed_.size() != channels_.size())
        throw PreconditionError("ChannelDecomposition: size mismatch");

    const Index d = channels_[0].dim();
    double wsum = 0.0;
    for (std::size_t k = 0; k < channels_.size(); ++k) {
        if (channels_[k].dim() != d)
            throw DimensionError("ChannelDecomposition: channel dimension mismatch");
        if (std::abs(channels_[k].norm() - 1.0) > tol.state_norm)
            throw PreconditionError("ChannelDecomposition: channel not normalized");
        for (std::size_t l = k + 1; l < channels_.size(); ++l) {
            if (std::abs(channels_[k].overlap(channels_[l])) > tol.orthogonality)
                throw PreconditionError("ChannelDecomposition: channels not orthogonal");
        }
        wsum += std::norm(coeffs_[k]);
    }
    if (std::abs(wsum - 1.0) > tol.coeff_sum) {
        std::ostringstream os;
        os << "ChannelDecomposition: sum |c_k|^2 = " << wsum;
        throw PreconditionError(os.str());
    }
}

bool ChannelDecomposition::any_absorbed() const {
    return std::any_of(absorbed_.begin(), absorbed_.end(), [](bool b) { return b; });
}

StateVector ChannelDecomposition::reconstruct() const {
    Vector v = Vector::Zero(channels_[0].dim());
    for (std::size_t k = 0; k < channels_.size(); ++k)
        v += coeffs_[k] * channels_[k].amplitudes();
    return StateVector(std::move(v));
}

// ── ProperMixture ────────────────────────────────────────────────────────────

ProperMixture::ProperMixture(std::vector<Component> components, const Tolerances& tol)
    : components_(std::move(components)) {
    if (components_.empty()) throw PreconditionError("ProperMixture: empty");
    const Index d = components_[0].second.dim();
    double wsum = 0.0;
    for (const auto& [w, state] : components_) {
        if (w < -tol.weight_sum)
            throw PreconditionError("ProperMixture: negative weight");
        if (state.dim() != d)
            throw DimensionError("ProperMixture: component dimension mismatch");
        wsum += w;
    }
    if (std::abs(wsum - 1.0) > tol.weight_sum) {
        std::ostringstream os;
        os << "ProperMixture: weights sum to " << wsum;
        throw PreconditionError(os.str());
    }
}

std::pair<std::size_t, const StateOperator*> sample(const ProperMixture& mixture,
                                                    std::uint64_t seed) {
    rng::Stream s(seed);
    double u = s.uniform01();
    double acc = 0.0;
    std::size_t last = mixture.size() - 1;
    for (std::size_t k = 0; k < mixture.size(); ++k) {
        acc += mixture.weight(k);
        if (u < acc) return {k, &mixture.state(k)};
    }
    return {last, &mixture.state(last)};
}

// ── ScreeningScenario ────────────────────────────────────────────────────────

ScreeningScenario::ScreeningScenario(SpaceLayout layout_,
                                     ChannelDecomposition decomposition_,
                                     StateOperator body_state_,
                                     OperatorMatrix coupling_,
                                     std::optional<ProjectorBundle> projector_,
                                     OperatorMatrix thr_free_evolution_,
                                     std::vector<OperatorMatrix> signal_projectors_,
                                     const Tolerances& tolerances)
    : layout(std::move(layout_)),
      decomposition(std::move(decomposition_)),
      body_state(std::move(body_state_)),
      coupling(std::move(coupling_)),
      projector(std::move(projector_)),
      thr_free_evolution(std::move(thr_free_evolution_)),
      signal_projectors(std::move(signal_projectors_)),
      tol(tolerances) {
    if (layout.factors() < 2)
        throw LayoutError("ScreeningScenario: layout needs a system and a body factor");
    const Index d = system_dim();
    if (decomposition.channels()[0].dim() != d)
        throw DimensionError("ScreeningScenario: channels must live on the system factor");
    if (body_state.dim() * d != layout.dim())
        throw DimensionError("ScreeningScenario: body state dimension mismatch");
    if (coupling.dim() != layout.dim())
        throw DimensionError("ScreeningScenario: coupling dimension mismatch");
    if (!coupling.is_unitary(tol.unitarity))
        throw PreconditionError("ScreeningScenario: coupling is not unitary");
    if (thr_free_evolution.dim() != d)
        throw DimensionError("ScreeningScenario: free evolution must act on the system");
    if (!thr_free_evolution.is_unitary(tol.unitarity))
        throw PreconditionError("ScreeningScenario: free evolution is not unitary");
    if (projector) {
        if (projector->projector.dim() != layout.dim())
            throw DimensionError("ScreeningScenario: projector dimension mismatch");
        const auto& idx = projector->group.factor_indices;
        if (std::find(idx.begin(), idx.end(), std::size_t{0}) == idx.end())
            throw LayoutError(
                "ScreeningScenario: identical group must contain the system factor");
    }
    if (!signal_projectors.empty()) {
        if (signal_projectors.size() != decomposition.size())
            throw PreconditionError(
                "ScreeningScenario: one signal projector per channel required");
        check_signal_projectors(signal_projectors, layout.dim(), tol);
    }
}

std::vector<std::size_t> ScreeningScenario::body_factors() const {
    std::vector<std::size_t> out(layout.factors() - 1);
    std::iota(out.begin(), out.end(), std::size_t{1});
    return out;
}

// ── BilinearExpansion ────────────────────────────────────────────────────────

BilinearExpansion::BilinearExpansion(std::vector<std::vector<Matrix>> terms,
                                     std::vector<double> raw_traces,
                                     std::vector<bool> absorbed,
                                     const Tolerances& tol)
    : terms_(std::move(terms)), raw_traces_(std::move(raw_traces)),
      absorbed_(std::move(absorbed)) {
    const std::size_t n = terms_.size();
    if (n == 0 || raw_traces_.size() != n || absorbed_.size() != n)
        throw PreconditionError("BilinearExpansion: size mismatch");
    const Index dim = terms_[0][0].rows();
    for (std::size_t k = 0; k < n; ++k) {
        if (terms_[k].size() != n)
            throw PreconditionError("BilinearExpansion: terms must be n x n");
        for (std::size_t l = 0; l < n; ++l) {
            if (terms_[k][l].rows() != dim || terms_[k][l].cols() != dim)
                throw DimensionError("BilinearExpansion: term dimension mismatch");
            double pair_defect =
                (terms_[k][l].adjoint() - terms_[l][k]).cwiseAbs().maxCoeff();
            if (pair_defect > tol.projector_algebra)
                throw PreconditionError(
                    "BilinearExpansion: T_kl^dag must equal T_lk");
        }
    }
    diagonal_.reserve(n);
    for (std::size_t k = 0; k < n; ++k)
        diagonal_.push_back(StateOperator::make(terms_[k][k], tol));
}

StateOperator BilinearExpansion::resum(const std::vector<Complex>& coeffs,
                                       const Tolerances& tol) const {
    if (coeffs.size() != size())
        throw PreconditionError("resum: one coefficient per channel required");
    Matrix s = Matrix::Zero(dim(), dim());
    for (std::size_t k = 0; k < size(); ++k)
        for (std::size_t l = 0; l < size(); ++l)
            s += coeffs[k] * std::conj(coeffs[l]) *
                 std::sqrt(raw_traces_[k] * raw_traces_[l]) * terms_[k][l];
    double tr = s.trace().real();
    if (tr < tol.annihilation)
        throw AnnihilatedError("resum: vanishing trace");
    return StateOperator::make(s / tr, tol);
}

// ── Operations ───────────────────────────────────────────────────────────────

ChannelDecomposition channel_decompose(
    const StateVector& psi, const std::vector<OperatorMatrix>& sector_projectors,
    const std::vector<bool>& absorbed, const Tolerances& tol) {
    if (sector_projectors.empty())
        throw PreconditionError("channel_decompose: no sector projectors");
    if (!absorbed.empty() && absorbed.size() != sector_projectors.size())
        throw PreconditionError("channel_decompose: absorbed flags misaligned");
    check_signal_projectors(sector_projectors, psi.dim(), tol);

    Vector residual = psi.amplitudes();
    std::vector<Vector> parts;
    parts.reserve(sector_projectors.size());
    for (const auto& q : sector_projectors) {
        parts.push_back(q.entries() * psi.amplitudes());
        residual -= parts.back();
    }
    if (residual.norm() > tol.reconstruction) {
        std::ostringstream os;
        os << "channel_decompose: psi not contained in the sector span (residual "
           << residual.norm() << ")";
        throw DecompositionError(os.str(), residual.norm());
    }

    std::vector<StateVector> channels;
    std::vector<Complex> coeffs;
    std::vector<bool> flags;
    for (std::size_t k = 0; k < parts.size(); ++k) {
        double c = parts[k].norm();
        if (c <= tol.coeff_drop) continue;
        channels.emplace_back(parts[k] / c);
        coeffs.emplace_back(c, 0.0);
        flags.push_back(absorbed.empty() ? false : absorbed[k]);
    }
    if (channels.empty())
        throw DecompositionError("channel_decompose: all channels vanish", 1.0);
    return ChannelDecomposition(std::move(channels), std::move(coeffs),
                                std::move(flags), tol);
}

StateOperator composite_initial(const ScreeningScenario& scenario) {
    StateVector psi = scenario.decomposition.reconstruct();
    return tensor(pure_state(psi), scenario.body_state, scenario.tol);
}

StateOperator initial_projected(const ScreeningScenario& scenario) {
    StateOperator init = composite_initial(scenario);
    if (!scenario.projector) return init;
    return symmetry::project_normalize(init, *scenario.projector, scenario.tol);
}

StateOperator unitary_end_state(const ScreeningScenario& scenario) {
    return evolve(scenario.coupling, initial_projected(scenario), scenario.tol);
}

BilinearExpansion expand_bilinear(const ScreeningScenario& scenario) {
    const auto& dec = scenario.decomposition;
    const std::size_t n = dec.size();
    const Matrix& t_body = scenario.body_state.entries();
    const Matrix& u = scenario.coupling.entries();

    // raw projected terms R_kl = Pi (|psi_k><psi_l| (x) T) Pi
    std::vector<std::vector<Matrix>> raw(n, std::vector<Matrix>(n));
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t l = 0; l < n; ++l) {
            Matrix cross = dec.channels()[k].amplitudes() *
                           dec.channels()[l].amplitudes().adjoint();
            Matrix m = tensor(OperatorMatrix(std::move(cross)),
                              OperatorMatrix(t_body))
                           .entries();
            if (scenario.projector) {
                const Matrix& pi = scenario.projector->projector.entries();
                raw[k][l] = pi * m * pi;
            } else {
                raw[k][l] = std::move(m);
            }
        }
    }

    std::vector<double> traces(n);
    for (std::size_t k = 0; k < n; ++k) {
        traces[k] = raw[k][k].trace().real();
        if (traces[k] < scenario.tol.annihilation) {
            std::ostringstream os;
            os << "expand_bilinear: channel " << k << " annihilated by the projector";
            throw AnnihilatedError(os.str());
        }
    }

    std::vector<std::vector<Matrix>> terms(n, std::vector<Matrix>(n));
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = 0; l < n; ++l)
            terms[k][l] = (u * raw[k][l] * u.adjoint()) /
                          std::sqrt(traces[k] * traces[l]);

    return BilinearExpansion(std::move(terms), std::move(traces),
                             dec.absorbed(), scenario.tol);
}

bool reduction_triggered(const BilinearExpansion& expansion,
                         const std::vector<OperatorMatrix>& signal_projectors,
                         const Tolerances& tol) {
    if (signal_projectors.empty()) return false;
    if (signal_projectors.size() != expansion.size())
        throw PreconditionError(
            "reduction_triggered: one signal projector per channel required");
    check_signal_projectors(signal_projectors, expansion.dim(), tol);

    bool any_absorbed = false;
    for (std::size_t k = 0; k < expansion.size(); ++k) {
        double occ = (signal_projectors[k].entries().transpose().cwiseProduct(
                          expansion.diagonal(k).entries()))
                         .sum()
                         .real();
        if (occ <= 1.0 - tol.sector_leakage) return false;
        if (expansion.absorbed()[k]) any_absorbed = true;
    }
    return any_absorbed;
}

ProperMixture reduce(const ScreeningScenario& scenario,
                     const BilinearExpansion& expansion) {
    if (!reduction_triggered(expansion, scenario.signal_projectors, scenario.tol))
        throw NoReductionError("no reduction applies; unitary state stands",
                               unitary_end_state(scenario));

    const auto& dec = scenario.decomposition;
    std::vector<ProperMixture::Component> components;
    components.reserve(dec.size());
    for (std::size_t k = 0; k < dec.size(); ++k) {
        double weight = std::norm(dec.coeffs()[k]);
        if (std::abs(dec.coeffs()[k]) <= scenario.tol.coeff_drop) continue;
        if (dec.absorbed()[k]) {
            components.emplace_back(weight, expansion.diagonal(k));
        } else {
            // The prepared through state is a real single-particle state again:
            // symmetrization is dropped and the body is traced out.
            StateVector evolved(scenario.thr_free_evolution.entries() *
                                dec.channels()[k].amplitudes());
            StateOperator body_part =
                partial_trace(expansion.diagonal(k), scenario.layout,
                              scenario.body_factors(), scenario.tol);
            components.emplace_back(
                weight, tensor(pure_state(evolved), body_part, scenario.tol));
        }
    }
    return ProperMixture(std::move(components), scenario.tol);
}

std::vector<double> sector_occupancies(const StateOperator& rho,
                                       const std::vector<OperatorMatrix>& sectors) {
    std::vector<double> out;
    out.reserve(sectors.size());
    for (const auto& q : sectors) {
        if (q.dim() != rho.dim())
            throw DimensionError("sector_occupancies: dimension mismatch");
        out.push_back(
            q.entries().transpose().cwiseProduct(rho.entries()).sum().real());
    }
    return out;
}

// ── Scenario transforms ──────────────────────────────────────────────────────

OperatorMatrix extend_to_composite(const ScreeningScenario& scenario,
                                   const OperatorMatrix& v) {
    if (v.dim() != scenario.system_dim())
        throw DimensionError("extend_to_composite: v must act on the system factor");
    std::vector<bool> in_group(scenario.layout.factors(), false);
    in_group[0] = true;
    if (scenario.projector)
        for (std::size_t f : scenario.projector->group.factor_indices)
            in_group[f] = true;

    Matrix total = Matrix::Identity(1, 1);
    for (std::size_t f = 0; f < scenario.layout.factors(); ++f) {
        Matrix piece = in_group[f]
                           ? v.entries()
                           : Matrix(Matrix::Identity(scenario.layout.factor_dims[f],
                                                     scenario.layout.factor_dims[f]));
        total = kron2(total, piece);
    }
    return OperatorMatrix(std::move(total));
}

ScreeningScenario conjugate_scenario(const ScreeningScenario& scenario,
                                     const OperatorMatrix& v) {
    if (!v.is_unitary(scenario.tol.unitarity))
        throw PreconditionError("conjugate_scenario: v is not unitary");

    OperatorMatrix big_v = extend_to_composite(scenario, v);

    // restriction of V to the body factors
    std::vector<bool> in_group(scenario.layout.factors(), false);
    if (scenario.projector)
        for (std::size_t f : scenario.projector->group.factor_indices)
            in_group[f] = true;
    Matrix v_body = Matrix::Identity(1, 1);
    for (std::size_t f = 1; f < scenario.layout.factors(); ++f) {
        Matrix piece = in_group[f]
                           ? v.entries()
                           : Matrix(Matrix::Identity(scenario.layout.factor_dims[f],
                                                     scenario.layout.factor_dims[f]));
        v_body = kron2(v_body, piece);
    }

    std::vector<StateVector> channels;
    channels.reserve(scenario.decomposition.size());
    for (const auto& psi : scenario.decomposition.channels())
        channels.emplace_back(v.entries() * psi.amplitudes());
    ChannelDecomposition dec(std::move(channels), scenario.decomposition.coeffs(),
                             scenario.decomposition.absorbed(), scenario.tol);

    StateOperator body = StateOperator::make(
        v_body * scenario.body_state.entries() * v_body.adjoint(), scenario.tol);
    OperatorMatrix coupling(big_v.entries() * scenario.coupling.entries() *
                            big_v.entries().adjoint());
    OperatorMatrix free_ev(v.entries() * scenario.thr_free_evolution.entries() *
                           v.entries().adjoint());
    std::vector<OperatorMatrix> signals;
    signals.reserve(scenario.signal_projectors.size());
    for (const auto& q : scenario.signal_projectors)
        signals.emplace_back(big_v.entries() * q.entries() *
                             big_v.entries().adjoint());

    ScreeningScenario out(scenario.layout, std::move(dec), std::move(body),
                          std::move(coupling), scenario.projector,
                          std::move(free_ev), std::move(signals), scenario.tol);
    out.metadata = scenario.metadata;
    out.metadata["frame"] = "conjugated";
    return out;
}

// ── Canonical coupling and scenario generator ────────────────────────────────

OperatorMatrix pointer_shift_coupling(const SpaceLayout& layout,
                                      const std::vector<Index>& channel_modes) {
    if (layout.factors() < 2)
        throw LayoutError("pointer_shift_coupling: need particles plus a pointer");
    const std::size_t pointer = layout.factors() - 1;
    const Index pointer_dim = layout.factor_dims[pointer];
    if (pointer_dim < static_cast<Index>(channel_modes.size()) + 1)
        throw LayoutError("pointer_shift_coupling: pointer dimension too small");

    const Index n = layout.dim();
    Matrix u = Matrix::Zero(n, n);
    for (Index b = 0; b < n; ++b) {
        auto digits = layout.digits_of(b);
        // first channel mode occupied by any particle factor decides the shift
        Index shift = 0;
        for (std::size_t k = 0; k < channel_modes.size() && shift == 0; ++k)
            for (std::size_t f = 0; f + 1 < layout.factors(); ++f)
                if (digits[f] == channel_modes[k]) {
                    shift = static_cast<Index>(k) + 1;
                    break;
                }
        auto target = digits;
        target[pointer] = (digits[pointer] + shift) % pointer_dim;
        u(layout.index_of(target), b) = 1.0;
    }
    return OperatorMatrix(std::move(u));
}

ScreeningScenario random_scenario(std::uint64_t seed, const ScenarioOptions& options) {
    rng::Stream s(seed);

    const int n_ch = options.min_channels +
                     static_cast<int>(s.uniform_index(static_cast<std::size_t>(
                         options.max_channels - options.min_channels + 1)));
    const int n_occ = options.min_occupied +
                      static_cast<int>(s.uniform_index(static_cast<std::size_t>(
                          options.max_occupied - options.min_occupied + 1)));
    const int extra =
        options.extra_modes > 0
            ? static_cast<int>(s.uniform_index(
                  static_cast<std::size_t>(options.extra_modes) + 1))
            : 0;
    const Index d = options.with_identical ? n_ch + n_occ + extra : n_ch + extra;
    const Index pointer_dim =
        n_ch + 1 +
        (options.extra_pointer > 0
             ? static_cast<Index>(s.uniform_index(
                   static_cast<std::size_t>(options.extra_pointer) + 1))
             : 0);

    SpaceLayout layout =
        options.with_identical
            ? SpaceLayout({d, d, pointer_dim}, {"system", "particle", "pointer"})
            : SpaceLayout({d, pointer_dim}, {"system", "pointer"});

    // channels occupy the first n_ch single-particle modes, with random phases
    std::vector<Index> channel_modes(static_cast<std::size_t>(n_ch));
    std::vector<StateVector> channels;
    for (Index k = 0; k < n_ch; ++k) {
        channel_modes[static_cast<std::size_t>(k)] = k;
        Vector v = Vector::Zero(d);
        double theta = s.uniform(0.0, 6.283185307179586);
        v(k) = Complex(std::cos(theta), std::sin(theta));
        channels.emplace_back(std::move(v));
    }

    // coefficients on the unit sphere, bounded away from the drop tolerance
    std::vector<Complex> coeffs(static_cast<std::size_t>(n_ch));
    while (true) {
        double norm2 = 0.0;
        for (auto& c : coeffs) {
            c = s.complex_normal();
            norm2 += std::norm(c);
        }
        double nrm = std::sqrt(norm2);
        bool ok = true;
        for (auto& c : coeffs) {
            c /= nrm;
            if (std::abs(c) < 1e-6) ok = false;
        }
        if (ok) break;
    }

    std::vector<bool> absorbed(static_cast<std::size_t>(n_ch), false);
    switch (options.absorption) {
        case AbsorptionChoice::none:
            break;
        case AbsorptionChoice::all:
            absorbed.assign(absorbed.size(), true);
            break;
        case AbsorptionChoice::random_at_least_one:
            for (auto&& flag : absorbed) flag = s.uniform01() < 0.5;
            absorbed[s.uniform_index(absorbed.size())] = true;
            break;
    }

    ChannelDecomposition dec(std::move(channels), std::move(coeffs),
                             std::move(absorbed));

    // pointer starts in the ready level 0
    Matrix pointer_ready = Matrix::Zero(pointer_dim, pointer_dim);
    pointer_ready(0, 0) = 1.0;

    StateOperator body = [&] {
        if (!options.with_identical)
            return StateOperator::make(pointer_ready);
        // identical body particle occupies modes orthogonal to every channel
        Matrix t_modes = Matrix::Zero(d, d);
        StateOperator occ = random_density(n_occ, s.next_u64());
        t_modes.block(n_ch, n_ch, n_occ, n_occ) = occ.entries();
        return tensor(StateOperator::make(std::move(t_modes)),
                      StateOperator::make(pointer_ready));
    }();

    OperatorMatrix coupling = [&]() -> OperatorMatrix {
        if (options.degenerate_coupling) {
            // acts on the system factor only; the body is untouched
            OperatorMatrix w = random_unitary(d, s.next_u64());
            Matrix rest = Matrix::Identity(layout.dim() / d, layout.dim() / d);
            return tensor(w, OperatorMatrix(std::move(rest)));
        }
        OperatorMatrix u = pointer_shift_coupling(layout, channel_modes);
        if (options.scatter && d > n_ch) {
            // extra unitary stirring of the non-channel modes of each particle
            Matrix w = Matrix::Identity(d, d);
            w.block(n_ch, n_ch, d - n_ch, d - n_ch) =
                random_unitary(d - n_ch, s.next_u64()).entries();
            Matrix scatter = Matrix::Identity(1, 1);
            for (std::size_t f = 0; f + 1 < layout.factors(); ++f)
                scatter = kron2(scatter, w);
            scatter = kron2(scatter, Matrix::Identity(pointer_dim, pointer_dim));
            return OperatorMatrix(scatter * u.entries());
        }
        return u;
    }();

    std::optional<ProjectorBundle> projector;
    if (options.with_identical) {
        symmetry::IdenticalGroup group;
        group.factor_indices = {0, 1};
        group.statistics = options.random_statistics
                               ? (s.uniform01() < 0.5 ? Statistics::bosonic
                                                      : Statistics::fermionic)
                               : options.statistics;
        projector = symmetry::build_projector(layout, group);
    }

    OperatorMatrix free_ev = random_unitary(d, s.next_u64());

    std::vector<OperatorMatrix> signals;
    for (Index k = 0; k < n_ch; ++k) {
        Matrix e = Matrix::Zero(pointer_dim, pointer_dim);
        e(k + 1, k + 1) = 1.0;
        Matrix particles_id =
            Matrix::Identity(layout.dim() / pointer_dim, layout.dim() / pointer_dim);
        signals.emplace_back(
            tensor(OperatorMatrix(std::move(particles_id)), OperatorMatrix(std::move(e)))
                .entries());
    }

    ScreeningScenario scenario(std::move(layout), std::move(dec), std::move(body),
                               std::move(coupling), std::move(projector),
                               std::move(free_ev), std::move(signals));
    scenario.metadata["builder"] = "random_scenario";
    scenario.metadata["seed"] = std::to_string(seed);
    scenario.metadata["reduction_event"] = "registration at the pointer";

    if (options.conjugate_frame) {
        OperatorMatrix v = random_unitary(d, s.next_u64());
        return conjugate_scenario(scenario, v);
    }
    return scenario;
}

}  // namespace qsr::reduction
