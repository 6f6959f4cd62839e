#include "odest/fit.hpp"

namespace odest {

TargetDensity ib_target(const IBModel& model) {
    TargetDensity t;
    t.dim = model.layout.dim_unconstrained();
    t.logp_grad = [&model](const std::vector<double>& u, std::vector<double>& g) {
        return ib_log_posterior_grad(model, u, g);
    };
    return t;
}

TargetDensity ad_target(const ADModel& model) {
    TargetDensity t;
    t.dim = model.layout.dim_unconstrained();
    t.logp_grad = [&model](const std::vector<double>& u, std::vector<double>& g) {
        return ad_log_posterior_grad(model, u, g);
    };
    return t;
}

ConstrainMap od_constrain_map(const OdParamLayout& layout) {
    ConstrainMap map;
    map.names = layout.param_names();
    map.constrain = [&layout](const std::vector<double>& u) { return layout.constrain(u); };
    return map;
}

PosteriorDraws fit_ib(const IBModel& model, const SamplerConfig& cfg) {
    return nuts_sample(ib_target(model), od_constrain_map(model.layout), cfg);
}

PosteriorDraws fit_ad(const ADModel& model, const SamplerConfig& cfg) {
    return nuts_sample(ad_target(model), od_constrain_map(model.layout), cfg);
}

}  // namespace odest
