#pragma once

#include <map>
#include <string>

namespace qsr {

// Every numerical tolerance used anywhere in the toolkit, in one record.
// The defaults below are the contract; CLI runs may override individual
// entries and every report echoes the set actually used.
struct Tolerances {
    double state_norm        = 1e-12;  // |norm - 1| after normalization
    double hermiticity       = 1e-12;  // max elementwise |M - M^dag|
    double trace_one         = 1e-12;  // |tr(rho) - 1|
    double positivity_floor  = -1e-10; // eigenvalue floor for state operators
    double unitarity         = 1e-10;  // max elementwise |U^dag U - I|
    double projector_algebra = 1e-10;  // idempotence / commutation checks
    double orthogonality     = 1e-10;  // channel pairwise orthogonality
    double reconstruction    = 1e-10;  // |psi - sum c_k psi_k|
    double coeff_sum         = 1e-10;  // |sum |c_k|^2 - 1|
    double coeff_drop        = 1e-12;  // channels below this weight are dropped
    double annihilation      = 1e-14;  // tr(Pi rho Pi) below this is "annihilated"
    double sector_leakage    = 1e-6;   // signal-sector support for the trigger
    double resummation       = 1e-10;  // bilinear resum vs direct evolution
    double covariance        = 1e-8;   // conjugation-covariance trace distance
    double agreement         = 1e-8;   // two-description observable agreement
    double separation_overlap = 1e-8;  // prepared state vs occupied modes
    double weight_sum        = 1e-10;  // proper-mixture weight normalization
    double vprime_rel        = 1e-12;  // |V'| at refined minima, relative scale
    double well_symmetry     = 1e-10;  // equal-depth check, relative energy scale
    double eigen_residual    = 1e-8;   // ||Hv - Ev|| relative residual
    double edge_amplitude    = 1e-6;   // eigenfunction amplitude at grid edges
    double cn_norm_drift     = 1e-10;  // Crank-Nicolson norm drift per 1e4 steps

    // Named access used by the CLI's --tolerance KEY=VAL overrides and by
    // report serialization. Throws std::out_of_range for unknown keys.
    double& by_name(const std::string& key);
    std::map<std::string, double> as_map() const;
};

// Shared default-constructed instance.
const Tolerances& default_tolerances();

}  // namespace qsr
