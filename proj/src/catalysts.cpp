#include "cbrw/catalysts.hpp"

#include <cmath>

#include "cbrw/errors.hpp"

namespace cbrw {

CatalystSet::CatalystSet(std::vector<Catalyst> entries) : entries_(std::move(entries)) {
    if (entries_.empty()) throw ConfigError("at least one catalyst is required");
    bool all_unit = true;
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        const Catalyst& c = entries_[i];
        if (i > 0 && entries_[i - 1].position >= c.position)
            throw ConfigError("catalyst positions must be strictly increasing");
        if (!(c.alpha >= 0.0 && c.alpha < 1.0)) throw ConfigError("alpha must lie in [0,1)");
        if (!(c.beta > 0.0) || !std::isfinite(c.beta)) throw ConfigError("beta must be positive");
        all_unit = all_unit && c.offspring.is_deterministic_unit();
    }
    if (all_unit)
        throw ConfigError("deterministic offspring (one child with probability 1) at every catalyst is excluded");
}

std::vector<long> CatalystSet::positions() const {
    std::vector<long> w;
    w.reserve(entries_.size());
    for (const auto& c : entries_) w.push_back(c.position);
    return w;
}

long CatalystSet::index_of(long pos) const {
    for (std::size_t i = 0; i < entries_.size(); ++i)
        if (entries_[i].position == pos) return static_cast<long>(i);
    return -1;
}

}  // namespace cbrw
