#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qsr/qstate.hpp"
#include "qsr/symmetry.hpp"

namespace qsr::reduction {

using symmetry::ProjectorBundle;
using symmetry::Statistics;

// ── Domain types ─────────────────────────────────────────────────────────────

// Orthogonal channel decomposition of a prepared single-particle state,
// together with the per-channel separation-status flag (true = the channel
// is absorbed and dissipates inside the body).
class ChannelDecomposition {
public:
    ChannelDecomposition(std::vector<StateVector> channels,
                         std::vector<Complex> coeffs,
                         std::vector<bool> absorbed_flags,
                         const Tolerances& tol = default_tolerances());

    std::size_t size() const { return channels_.size(); }
    const std::vector<StateVector>& channels() const { return channels_; }
    const std::vector<Complex>& coeffs() const { return coeffs_; }
    const std::vector<bool>& absorbed() const { return absorbed_; }
    bool any_absorbed() const;

    // sum_k c_k psi_k
    StateVector reconstruct() const;

private:
    std::vector<StateVector> channels_;
    std::vector<Complex> coeffs_;
    std::vector<bool> absorbed_;
};

// Weighted ensemble with one-of-the-states sampling semantics: each
// individual system occupies exactly one component, with the stated
// probability.
class ProperMixture {
public:
    using Component = std::pair<double, StateOperator>;

    explicit ProperMixture(std::vector<Component> components,
                           const Tolerances& tol = default_tolerances());

    std::size_t size() const { return components_.size(); }
    const std::vector<Component>& components() const { return components_; }
    double weight(std::size_t k) const { return components_[k].first; }
    const StateOperator& state(std::size_t k) const { return components_[k].second; }

private:
    std::vector<Component> components_;
};

// Deterministic one-of-the-states draw: index k with probability weight_k.
std::pair<std::size_t, const StateOperator*> sample(const ProperMixture& mixture,
                                                    std::uint64_t seed);

// Complete description of one screening experiment. Factor 0 of the layout
// is the registered system; the remaining factors form the body/detector.
// The projector is optional: scenarios without an identical-particle group
// run with Pi = identity. Signal projectors (one per channel, acting on the
// detector part, supplied at composite dimension) feed the trigger predicate.
struct ScreeningScenario {
    SpaceLayout layout;
    ChannelDecomposition decomposition;
    StateOperator body_state;
    OperatorMatrix coupling;
    std::optional<ProjectorBundle> projector;
    OperatorMatrix thr_free_evolution;
    std::vector<OperatorMatrix> signal_projectors;
    std::map<std::string, std::string> metadata;  // e.g. nominal time/place tags
    Tolerances tol = default_tolerances();

    ScreeningScenario(SpaceLayout layout_, ChannelDecomposition decomposition_,
                      StateOperator body_state_, OperatorMatrix coupling_,
                      std::optional<ProjectorBundle> projector_,
                      OperatorMatrix thr_free_evolution_,
                      std::vector<OperatorMatrix> signal_projectors_,
                      const Tolerances& tolerances = default_tolerances());

    Index system_dim() const { return layout.factor_dims[0]; }
    std::vector<std::size_t> body_factors() const;
};

// The n^2 evolved cross terms T_kk' = U [nu_kk' Pi(|psi_k><psi_k'| (x) T) Pi] U^dag
// with per-term normalization nu_kk' = 1/sqrt(t_k t_k'), t_k the trace of the
// k-th projected diagonal term. Diagonal entries are valid state operators and
// equal the single-channel evolutions exactly.
class BilinearExpansion {
public:
    BilinearExpansion(std::vector<std::vector<Matrix>> terms,
                      std::vector<double> raw_traces, std::vector<bool> absorbed,
                      const Tolerances& tol = default_tolerances());

    std::size_t size() const { return diagonal_.size(); }
    Index dim() const { return terms_[0][0].rows(); }
    const Matrix& term(std::size_t k, std::size_t l) const { return terms_[k][l]; }
    const StateOperator& diagonal(std::size_t k) const { return diagonal_[k]; }
    double raw_trace(std::size_t k) const { return raw_traces_[k]; }
    const std::vector<bool>& absorbed() const { return absorbed_; }

    // sum_kk' c_k c*_k' sqrt(t_k t_k') T_kk', renormalized to unit trace.
    // Reproduces the direct evolution of the projected composite initial state.
    StateOperator resum(const std::vector<Complex>& coeffs,
                        const Tolerances& tol = default_tolerances()) const;

private:
    std::vector<std::vector<Matrix>> terms_;
    std::vector<double> raw_traces_;
    std::vector<bool> absorbed_;
    std::vector<StateOperator> diagonal_;
};

// Thrown by reduce() when the trigger predicate fails; carries the uncorrected
// (purely unitary) end state.
class NoReductionError : public Error {
public:
    NoReductionError(const std::string& what, StateOperator unitary_end)
        : Error(what), unitary_end_state(std::move(unitary_end)) {}
    StateOperator unitary_end_state;
};

// ── Operations ───────────────────────────────────────────────────────────────

// Splits psi against orthogonal sector projectors: c_k = ||Q_k psi||,
// psi_k = Q_k psi / c_k; channels below the drop tolerance are removed.
// absorbed (when given) is aligned with sector_projectors and dropped in
// tandem. Throws DecompositionError when psi is not contained in the span.
ChannelDecomposition channel_decompose(
    const StateVector& psi, const std::vector<OperatorMatrix>& sector_projectors,
    const std::vector<bool>& absorbed = {},
    const Tolerances& tol = default_tolerances());

// |psi><psi| (x) T from the reconstructed prepared state.
StateOperator composite_initial(const ScreeningScenario& scenario);

// The symmetrized composite initial state (pass-through when the scenario
// has no identical-particle group).
StateOperator initial_projected(const ScreeningScenario& scenario);

// The uncorrected end state: U applied to the projected initial state.
StateOperator unitary_end_state(const ScreeningScenario& scenario);

// All n^2 evolved cross terms. Throws AnnihilatedError (naming the channel)
// if any projected diagonal term vanishes.
BilinearExpansion expand_bilinear(const ScreeningScenario& scenario);

// True iff every diagonal term sits in its own signal sector within the
// leakage tolerance and at least one channel has lost separation status.
bool reduction_triggered(const BilinearExpansion& expansion,
                         const std::vector<OperatorMatrix>& signal_projectors,
                         const Tolerances& tol = default_tolerances());

// The state-reduction map: discards cross terms and returns the proper
// mixture [( |c_k|^2, R_k )], where R_k is the evolved diagonal term for
// absorbed channels and the de-symmetrized product
// |psi'_k><psi'_k| (x) tr_sys(T_kk) for through channels.
// Throws NoReductionError (carrying the unitary end state) when the trigger
// predicate is false.
ProperMixture reduce(const ScreeningScenario& scenario,
                     const BilinearExpansion& expansion);

// tr(Q_s rho) for each supplied sector projector.
std::vector<double> sector_occupancies(const StateOperator& rho,
                                       const std::vector<OperatorMatrix>& sectors);

// ── Scenario transforms and generators ───────────────────────────────────────

// Applies a single-particle frame change v to every piece of the scenario:
// channels v psi_k, coupling V U V^dag, body state V_body T V_body^dag, free
// evolution v u v^dag, signal projectors V Q V^dag, with V = v on the system
// factor and on every other factor of the identical group, identity elsewhere.
ScreeningScenario conjugate_scenario(const ScreeningScenario& scenario,
                                     const OperatorMatrix& v);

// The extension V of v described above, as a composite-dimension operator.
OperatorMatrix extend_to_composite(const ScreeningScenario& scenario,
                                   const OperatorMatrix& v);

enum class AbsorptionChoice { random_at_least_one, none, all };

struct ScenarioOptions {
    int min_channels = 2;
    int max_channels = 3;
    int min_occupied = 1;
    int max_occupied = 2;
    int extra_modes = 1;    // unused single-particle modes, 0..extra
    int extra_pointer = 1;  // pointer levels beyond channels+1, 0..extra
    bool with_identical = true;
    bool random_statistics = true;
    Statistics statistics = Statistics::fermionic;
    AbsorptionChoice absorption = AbsorptionChoice::random_at_least_one;
    bool conjugate_frame = false;  // rotate the whole scenario by a random frame
    bool scatter = true;           // compose a body-mode scatter into the coupling
    bool degenerate_coupling = false;  // coupling acts trivially on the body
};

// Deterministic random screening scenario: channel modes feed a pointer-shift
// coupling that registers each channel in its own signal sector; the body
// occupies modes orthogonal to every channel (separation status holds by
// construction).
ScreeningScenario random_scenario(std::uint64_t seed,
                                  const ScenarioOptions& options = {});

// The canonical registration coupling on layout [system d, (particle d,)
// pointer D]: a permutation unitary that cyclically shifts the pointer by
// k+1 whenever channel mode k is occupied by either particle. Symmetric
// under exchange of the identical factors.
OperatorMatrix pointer_shift_coupling(const SpaceLayout& layout,
                                      const std::vector<Index>& channel_modes);

}  // namespace qsr::reduction
