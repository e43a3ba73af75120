#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "qsr/reduction.hpp"

namespace qsr::sterngerlach {

enum class Spin { plus = 0, minus = 1 };

// Toy registration model: a spin-1/2 atom crosses a splitting field
// (spin-controlled shift on a coarse position grid) and lands on a film of
// metastable grains split into two strips. Grains fire by a permutation
// unitary once the packet energy clears the threshold.
struct SGConfig {
    int ancilla_levels = 5;   // position cells: entry cell 0 + two strips
    int detector_grains = 2;  // split across the two strips
    int grain_levels = 2;     // 0 = metastable, 1 = fired, extra = relaxed
    double packet_center = 1.5;  // mean momentum surrogate
    double packet_width = 0.25;  // momentum spread surrogate
    double threshold = 0.5;      // minimum packet energy that fires a grain
    std::uint64_t seed = 1;

    // Identical-particle toy: one silver atom bound in the film, with the
    // antisymmetrization projector over the two atom factors.
    bool symmetrize = false;
    int bound_cells = 1;

    double packet_energy() const {
        return 0.5 * (packet_center * packet_center + packet_width * packet_width);
    }

    void validate() const;

    int cells() const { return ancilla_levels + (symmetrize ? bound_cells : 0); }
    Index atom_dim() const { return 2 * cells(); }
    Index composite_dim() const;
};

// ── Film wiring (all deterministic functions of the config) ─────────────────

int strip_of_grain(const SGConfig& config, int grain);
// half-open cell range [first, last) of a strip on the position grid
std::pair<int, int> strip_cells(const SGConfig& config, int strip);
int grain_of_cell(const SGConfig& config, int cell);
// the cell the split beam is steered to, drawn uniformly from the strip's
// cells by the config seed
int target_cell(const SGConfig& config, int strip);
int target_grain(const SGConfig& config, int strip);
inline int wired_strip(Spin j) { return static_cast<int>(j); }

// ── Operations ───────────────────────────────────────────────────────────────

// The full screening scenario: channels |j> (x) |entry cell>, measurement
// coupling U = U_absorb U_split (exactly unitary permutations), strip signal
// sectors, both channels flagged absorbed.
reduction::ScreeningScenario build_sg_scenario(const SGConfig& config,
                                               Complex c_plus, Complex c_minus);

// T_j(t2): evolution of the definite-spin input.
StateOperator evolve_definite_spin(const SGConfig& config, Spin j);

struct SuperpositionRun {
    reduction::BilinearExpansion expansion;
    reduction::ProperMixture mixture;
    std::vector<std::size_t> component_channels;  // mixture index -> channel (0 = +)
};

// Expands the quadratic form, checks the diagonal terms against the
// definite-spin evolutions (trace distance < resummation tolerance), and
// reduces to the proper mixture with Born weights.
SuperpositionRun run_superposition(const SGConfig& config, Complex c_plus,
                                   Complex c_minus);

struct TrialRecord {
    int trial;
    std::uint64_t seed;
    Spin j;
    int strip;
    int grain;
};

struct BatchTally {
    bool registered = false;  // false = threshold not met, no registration
    long long n_trials = 0;
    std::array<long long, 2> strip_counts{0, 0};
    std::vector<TrialRecord> records;
    std::array<double, 2> component_sector_occupancy{0.0, 0.0};
};

// Deterministic outcome statistics: trial t samples the mixture with the
// derived seed (config.seed, t). Records one row per trial.
BatchTally run_batch(const SGConfig& config, Complex c_plus, Complex c_minus,
                     long long n_trials);

// Reduces the v-conjugated scenario (v unitary on the spin factor) and
// returns the worst component trace distance against the conjugated
// components of the direct run.
double covariance_check(const SGConfig& config, const OperatorMatrix& v_spin,
                        Complex c_plus = Complex(0.6, 0.0),
                        Complex c_minus = Complex(0.0, 0.8));

}  // namespace qsr::sterngerlach
