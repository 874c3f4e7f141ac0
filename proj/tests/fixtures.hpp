#ifndef CLERAY_TESTS_FIXTURES_HPP_
#define CLERAY_TESTS_FIXTURES_HPP_

#include <map>
#include <string>

#include "cleray/chart.hpp"

namespace cleray::testing {

// Atlases are expensive to build; one per (domain, radius) per test binary.
inline const ChartAtlas& atlas_for(const Domain& d, double radius = 0.5) {
  static std::map<std::string, ChartAtlas> cache;
  const std::string key = d.name() + "/" + std::to_string(radius);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, build_charts(d, radius)).first;
  return it->second;
}

}  // namespace cleray::testing

#endif  // CLERAY_TESTS_FIXTURES_HPP_
