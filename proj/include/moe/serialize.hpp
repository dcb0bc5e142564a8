#ifndef MOE_SERIALIZE_HPP
#define MOE_SERIALIZE_HPP

#include <string>

#include "moe/smc2.hpp"

namespace moe {

// Mid-run engine state, enough to continue the tempering loop after a crash.
// Data subsets are rebuilt from the allocations on load.
struct Smc2Checkpoint {
    int t = 0;
    std::uint64_t seed = 0;
    std::vector<double> kappa_history;
    std::vector<OuterParticle> particles;
    std::vector<SlotCounters> counters;
    std::vector<TemperRecord> steps;
    std::vector<std::string> warnings;
};

void save_checkpoint(const std::string& path, const Smc2Checkpoint& cp);
Smc2Checkpoint load_checkpoint(const std::string& path);

// Full posterior sample as JSON; the method tag distinguishes the nested-SMC
// run from the importance-sampling baseline, downstream consumers treat both
// uniformly.
void save_posterior(const std::string& path, const PosteriorSample& sample);
PosteriorSample load_posterior(const std::string& path);

}  // namespace moe

#endif
