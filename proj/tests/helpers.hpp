#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "ranklab/construction.hpp"

namespace testing_support {

using ranklab::BigInt;

inline ranklab::ConstructionSpec explicit_spec(BigInt h1, std::vector<std::vector<std::uint64_t>> stages) {
    ranklab::ConstructionSpec spec;
    spec.family = "explicit";
    spec.h1 = std::move(h1);
    ranklab::ExplicitStages ex;
    for (auto& s : stages) {
        ranklab::StageParams p;
        p.r = s.size();
        for (auto v : s) p.spacers.push_back(BigInt(v));
        ex.stages.push_back(std::move(p));
    }
    spec.source = std::move(ex);
    return spec;
}

inline ranklab::ConstructionSpec odometer(std::uint64_t r = 2, std::uint64_t h1 = 1) {
    ranklab::ConstructionSpec spec;
    spec.family = "odometer";
    spec.h1 = h1;
    spec.source = ranklab::OdometerFamily{r};
    return spec;
}

}  // namespace testing_support
