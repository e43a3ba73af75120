#include "qsr/tolerances.hpp"

#include <stdexcept>

namespace qsr {

namespace {

template <typename Self, typename Fn>
void for_each_field(Self& t, Fn&& fn) {
    fn("state_norm", t.state_norm);
    fn("hermiticity", t.hermiticity);
    fn("trace_one", t.trace_one);
    fn("positivity_floor", t.positivity_floor);
    fn("unitarity", t.unitarity);
    fn("projector_algebra", t.projector_algebra);
    fn("orthogonality", t.orthogonality);
    fn("reconstruction", t.reconstruction);
    fn("coeff_sum", t.coeff_sum);
    fn("coeff_drop", t.coeff_drop);
    fn("annihilation", t.annihilation);
    fn("sector_leakage", t.sector_leakage);
    fn("resummation", t.resummation);
    fn("covariance", t.covariance);
    fn("agreement", t.agreement);
    fn("separation_overlap", t.separation_overlap);
    fn("weight_sum", t.weight_sum);
    fn("vprime_rel", t.vprime_rel);
    fn("well_symmetry", t.well_symmetry);
    fn("eigen_residual", t.eigen_residual);
    fn("edge_amplitude", t.edge_amplitude);
    fn("cn_norm_drift", t.cn_norm_drift);
}

}  // namespace

double& Tolerances::by_name(const std::string& key) {
    double* found = nullptr;
    for_each_field(*this, [&](const char* name, double& value) {
        if (key == name) found = &value;
    });
    if (!found) throw std::out_of_range("unknown tolerance key: " + key);
    return *found;
}

std::map<std::string, double> Tolerances::as_map() const {
    std::map<std::string, double> out;
    for_each_field(*this, [&](const char* name, const double& value) {
        out.emplace(name, value);
    });
    return out;
}

const Tolerances& default_tolerances() {
    static const Tolerances t{};
    return t;
}

}  // namespace qsr
