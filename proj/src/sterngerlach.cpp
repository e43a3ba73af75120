#include "qsr/sterngerlach.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qsr/rng.hpp"

namespace qsr::sterngerlach {

namespace {

constexpr Index kMaxCompositeDim = 4096;

struct AtomDigit {
    int spin;  // 0 = +, 1 = -
    int cell;
};

AtomDigit split_atom_digit(const SGConfig& config, Index digit) {
    const int cells = config.cells();
    return {static_cast<int>(digit) / cells, static_cast<int>(digit) % cells};
}

Index join_atom_digit(const SGConfig& config, AtomDigit a) {
    return static_cast<Index>(a.spin) * config.cells() + a.cell;
}

// spin-controlled cyclic shift of the beam cells; bound cells untouched
AtomDigit split_rule(const SGConfig& config,
                     const std::array<int, 2>& targets, AtomDigit a) {
    if (a.cell >= config.ancilla_levels) return a;  // bound lattice cell
    int t = targets[static_cast<std::size_t>(a.spin)];
    return {a.spin, (a.cell + t) % config.ancilla_levels};
}

SpaceLayout make_layout(const SGConfig& config) {
    std::vector<Index> dims;
    std::vector<std::string> labels;
    dims.push_back(config.atom_dim());
    labels.emplace_back("atom0");
    if (config.symmetrize) {
        dims.push_back(config.atom_dim());
        labels.emplace_back("atom1");
    }
    for (int g = 0; g < config.detector_grains; ++g) {
        dims.push_back(config.grain_levels);
        labels.push_back("grain" + std::to_string(g));
    }
    return SpaceLayout(std::move(dims), std::move(labels));
}

// U = U_absorb U_split as one composite basis permutation
OperatorMatrix build_coupling(const SGConfig& config, const SpaceLayout& layout) {
    const std::array<int, 2> targets{target_cell(config, 0), target_cell(config, 1)};
    const bool fires = config.packet_energy() >= config.threshold;
    const std::size_t atoms = config.symmetrize ? 2 : 1;
    const Index n = layout.dim();

    Matrix u = Matrix::Zero(n, n);
    for (Index b = 0; b < n; ++b) {
        auto digits = layout.digits_of(b);
        for (std::size_t f = 0; f < atoms; ++f) {
            AtomDigit a = split_atom_digit(config, digits[f]);
            a = split_rule(config, targets, a);
            digits[f] = join_atom_digit(config, a);
            if (fires && a.cell >= 1 && a.cell < config.ancilla_levels) {
                std::size_t slot = atoms + static_cast<std::size_t>(
                                               grain_of_cell(config, a.cell));
                digits[slot] = (digits[slot] + 1) % config.grain_levels;
            }
        }
        u(layout.index_of(digits), b) = 1.0;
    }
    return OperatorMatrix(std::move(u));
}

// projector onto "some grain of strip s fired, the other strip all metastable"
OperatorMatrix strip_signal_projector(const SGConfig& config,
                                      const SpaceLayout& layout, int strip) {
    const std::size_t atoms = config.symmetrize ? 2 : 1;
    const Index n = layout.dim();
    Matrix q = Matrix::Zero(n, n);
    for (Index b = 0; b < n; ++b) {
        auto digits = layout.digits_of(b);
        bool own_fired = false;
        bool other_fired = false;
        for (int g = 0; g < config.detector_grains; ++g) {
            if (digits[atoms + static_cast<std::size_t>(g)] == 0) continue;
            (strip_of_grain(config, g) == strip ? own_fired : other_fired) = true;
        }
        if (own_fired && !other_fired) q(b, b) = 1.0;
    }
    return OperatorMatrix(std::move(q));
}

StateOperator build_body(const SGConfig& config) {
    Matrix grains = Matrix::Zero(1, 1);
    grains(0, 0) = 1.0;
    for (int g = 0; g < config.detector_grains; ++g) {
        Matrix metastable = Matrix::Zero(config.grain_levels, config.grain_levels);
        metastable(0, 0) = 1.0;
        Matrix next = Matrix::Zero(grains.rows() * config.grain_levels,
                                   grains.cols() * config.grain_levels);
        for (Index i = 0; i < grains.rows(); ++i)
            for (Index j = 0; j < grains.cols(); ++j)
                next.block(i * config.grain_levels, j * config.grain_levels,
                           config.grain_levels, config.grain_levels) =
                    grains(i, j) * metastable;
        grains = std::move(next);
    }

    if (!config.symmetrize) return StateOperator::make(std::move(grains));

    // bound atom: equal spin mixture at the first lattice cell
    const Index ad = config.atom_dim();
    Matrix bound = Matrix::Zero(ad, ad);
    for (int spin = 0; spin < 2; ++spin) {
        Index idx = join_atom_digit(config, {spin, config.ancilla_levels});
        bound(idx, idx) = 0.5;
    }
    return tensor(StateOperator::make(std::move(bound)),
                  StateOperator::make(std::move(grains)));
}

StateVector spin_channel(const SGConfig& config, Spin j) {
    return StateVector::basis(config.atom_dim(),
                              join_atom_digit(config, {static_cast<int>(j), 0}));
}

}  // namespace

// ── Config and wiring ────────────────────────────────────────────────────────

void SGConfig::validate() const {
    if (ancilla_levels < 3)
        throw PreconditionError("SGConfig: ancilla_levels must be >= 3 "
                                "(entry cell plus one cell per strip)");
    if (detector_grains < 2)
        throw PreconditionError("SGConfig: detector_grains must be >= 2");
    if (grain_levels < 2)
        throw PreconditionError("SGConfig: grain_levels must be >= 2");
    if (packet_width <= 0.0)
        throw PreconditionError("SGConfig: packet_width must be positive");
    if (threshold < 0.0)
        throw PreconditionError("SGConfig: threshold must be nonnegative");
    if (symmetrize && bound_cells < 1)
        throw PreconditionError("SGConfig: symmetrize requires bound_cells >= 1");
    if (composite_dim() > kMaxCompositeDim) {
        std::ostringstream os;
        os << "SGConfig: composite dimension " << composite_dim()
           << " exceeds the budget " << kMaxCompositeDim;
        throw PreconditionError(os.str());
    }
}

Index SGConfig::composite_dim() const {
    Index dim = atom_dim();
    if (symmetrize) dim *= atom_dim();
    for (int g = 0; g < detector_grains; ++g) dim *= grain_levels;
    return dim;
}

int strip_of_grain(const SGConfig& config, int grain) {
    int in_strip0 = (config.detector_grains + 1) / 2;
    return grain < in_strip0 ? 0 : 1;
}

std::pair<int, int> strip_cells(const SGConfig& config, int strip) {
    int usable = config.ancilla_levels - 1;  // cell 0 is the entry
    int first_half = (usable + 1) / 2;
    if (strip == 0) return {1, 1 + first_half};
    return {1 + first_half, config.ancilla_levels};
}

int grain_of_cell(const SGConfig& config, int cell) {
    for (int strip = 0; strip < 2; ++strip) {
        auto [first, last] = strip_cells(config, strip);
        if (cell < first || cell >= last) continue;
        int in_strip0 = (config.detector_grains + 1) / 2;
        int base = strip == 0 ? 0 : in_strip0;
        int count = strip == 0 ? in_strip0 : config.detector_grains - in_strip0;
        return base + (cell - first) % count;
    }
    throw PreconditionError("grain_of_cell: cell is not a strip cell");
}

int target_cell(const SGConfig& config, int strip) {
    auto [first, last] = strip_cells(config, strip);
    rng::Stream s(rng::derive(config.seed, 1000 + static_cast<std::uint64_t>(strip)));
    return first + static_cast<int>(
                       s.uniform_index(static_cast<std::size_t>(last - first)));
}

int target_grain(const SGConfig& config, int strip) {
    return grain_of_cell(config, target_cell(config, strip));
}

// ── Operations ───────────────────────────────────────────────────────────────

reduction::ScreeningScenario build_sg_scenario(const SGConfig& config,
                                               Complex c_plus, Complex c_minus) {
    config.validate();
    SpaceLayout layout = make_layout(config);

    reduction::ChannelDecomposition dec(
        {spin_channel(config, Spin::plus), spin_channel(config, Spin::minus)},
        {c_plus, c_minus}, {true, true});

    std::optional<symmetry::ProjectorBundle> projector;
    if (config.symmetrize) {
        symmetry::IdenticalGroup group{{0, 1}, symmetry::Statistics::fermionic};
        projector = symmetry::build_projector(layout, group);
    }

    std::vector<OperatorMatrix> signals{strip_signal_projector(config, layout, 0),
                                        strip_signal_projector(config, layout, 1)};

    reduction::ScreeningScenario scenario(
        layout, std::move(dec), build_body(config),
        build_coupling(config, layout), std::move(projector),
        OperatorMatrix::identity(config.atom_dim()), std::move(signals));

    scenario.metadata["builder"] = "sterngerlach";
    scenario.metadata["grain_choice"] = "seed-driven uniform over strip cells";
    for (int strip = 0; strip < 2; ++strip) {
        scenario.metadata["target_cell_strip" + std::to_string(strip)] =
            std::to_string(target_cell(config, strip));
        scenario.metadata["target_grain_strip" + std::to_string(strip)] =
            std::to_string(target_grain(config, strip));
    }
    return scenario;
}

StateOperator evolve_definite_spin(const SGConfig& config, Spin j) {
    config.validate();
    SpaceLayout layout = make_layout(config);
    reduction::ChannelDecomposition solo({spin_channel(config, j)},
                                         {Complex(1.0, 0.0)}, {true});
    std::optional<symmetry::ProjectorBundle> projector;
    if (config.symmetrize) {
        symmetry::IdenticalGroup group{{0, 1}, symmetry::Statistics::fermionic};
        projector = symmetry::build_projector(layout, group);
    }
    reduction::ScreeningScenario scenario(
        layout, std::move(solo), build_body(config),
        build_coupling(config, layout), std::move(projector),
        OperatorMatrix::identity(config.atom_dim()), {});
    return reduction::unitary_end_state(scenario);
}

SuperpositionRun run_superposition(const SGConfig& config, Complex c_plus,
                                   Complex c_minus) {
    auto scenario = build_sg_scenario(config, c_plus, c_minus);
    auto expansion = reduction::expand_bilinear(scenario);

    // linearity check: diagonal terms against the independent definite-spin runs
    for (std::size_t k = 0; k < 2; ++k) {
        auto direct = evolve_definite_spin(config, static_cast<Spin>(k));
        double dist = trace_distance(expansion.diagonal(k), direct);
        if (dist > scenario.tol.resummation) {
            std::ostringstream os;
            os << "run_superposition: diagonal term " << k
               << " deviates from the definite-spin evolution by " << dist;
            throw NumericalError(os.str());
        }
    }

    auto mixture = reduction::reduce(scenario, expansion);

    std::vector<std::size_t> channel_of;
    std::array<Complex, 2> cs{c_plus, c_minus};
    for (std::size_t k = 0; k < 2; ++k)
        if (std::abs(cs[k]) > scenario.tol.coeff_drop) channel_of.push_back(k);

    return SuperpositionRun{std::move(expansion), std::move(mixture),
                            std::move(channel_of)};
}

BatchTally run_batch(const SGConfig& config, Complex c_plus, Complex c_minus,
                     long long n_trials) {
    if (n_trials < 1)
        throw PreconditionError("run_batch: n_trials must be >= 1");

    BatchTally tally;
    tally.n_trials = n_trials;

    std::optional<SuperpositionRun> run;
    try {
        run.emplace(run_superposition(config, c_plus, c_minus));
    } catch (const reduction::NoReductionError&) {
        tally.registered = false;  // below threshold: the meter does not react
        return tally;
    }
    tally.registered = true;

    // each component must sit in its own strip sector
    auto scenario = build_sg_scenario(config, c_plus, c_minus);
    for (std::size_t m = 0; m < run->mixture.size(); ++m) {
        int strip = wired_strip(static_cast<Spin>(run->component_channels[m]));
        double occ = reduction::sector_occupancies(
            run->mixture.state(m),
            {scenario.signal_projectors[static_cast<std::size_t>(strip)]})[0];
        tally.component_sector_occupancy[static_cast<std::size_t>(strip)] = occ;
    }

    tally.records.reserve(static_cast<std::size_t>(n_trials));
    for (long long t = 0; t < n_trials; ++t) {
        std::uint64_t trial_seed =
            rng::derive(config.seed, static_cast<std::uint64_t>(t));
        auto [component, state] = reduction::sample(run->mixture, trial_seed);
        (void)state;
        Spin j = static_cast<Spin>(run->component_channels[component]);
        int strip = wired_strip(j);
        int grain = target_grain(config, strip);
        tally.strip_counts[static_cast<std::size_t>(strip)] += 1;
        tally.records.push_back(
            {static_cast<int>(t), trial_seed, j, strip, grain});
    }
    return tally;
}

double covariance_check(const SGConfig& config, const OperatorMatrix& v_spin,
                        Complex c_plus, Complex c_minus) {
    if (v_spin.dim() != 2)
        throw PreconditionError("covariance_check: v must act on the spin factor");
    if (!v_spin.is_unitary(default_tolerances().unitarity))
        throw PreconditionError("covariance_check: v is not unitary");

    auto scenario = build_sg_scenario(config, c_plus, c_minus);
    OperatorMatrix v_atom =
        tensor(v_spin, OperatorMatrix::identity(config.cells()));

    auto conjugated = reduction::conjugate_scenario(scenario, v_atom);
    auto mix = reduction::reduce(scenario, reduction::expand_bilinear(scenario));
    auto mix_c =
        reduction::reduce(conjugated, reduction::expand_bilinear(conjugated));
    if (mix.size() != mix_c.size())
        throw NumericalError("covariance_check: component count changed");

    OperatorMatrix big_v = reduction::extend_to_composite(scenario, v_atom);
    double worst = 0.0;
    for (std::size_t k = 0; k < mix.size(); ++k) {
        auto expected = StateOperator::make(big_v.entries() *
                                            mix.state(k).entries() *
                                            big_v.entries().adjoint());
        worst = std::max(worst, trace_distance(expected, mix_c.state(k)));
    }
    return worst;
}

}  // namespace qsr::sterngerlach
