#pragma once

#include "odest/ad_model.hpp"
#include "odest/ib_model.hpp"
#include "odest/nuts.hpp"

namespace odest {

/// Wires a model's log posterior and layout into the sampler.
TargetDensity ib_target(const IBModel& model);
TargetDensity ad_target(const ADModel& model);
ConstrainMap od_constrain_map(const OdParamLayout& layout);

PosteriorDraws fit_ib(const IBModel& model, const SamplerConfig& cfg);
PosteriorDraws fit_ad(const ADModel& model, const SamplerConfig& cfg);

}  // namespace odest
