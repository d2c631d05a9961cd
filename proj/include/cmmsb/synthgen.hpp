#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cmmsb/copula.hpp"
#include "cmmsb/grid.hpp"
#include "cmmsb/relmodel.hpp"

namespace cmmsb {

enum class SubgroupRule { full, first_block, none };

std::string to_string(SubgroupRule r);
SubgroupRule subgroup_rule_from_string(const std::string& s);

// Parameterized generator of block-structured directed networks: each node
// takes its group's membership row, indicator pairs are drawn through the
// mapped copula, edges through the compatibility matrix.
struct SynthSpec {
  int n = 0;
  std::vector<int> group_sizes;
  Grid<double> group_membership;  // G x K, rows sum to 1
  Grid<double> compat;            // K x K in [0,1]
  SubgroupRule rule = SubgroupRule::full;
  std::vector<CopulaSpec> copulas;  // subgroup d uses copulas[d-1]
  std::uint64_t seed = 0;

  void validate() const;
};

struct GroundTruth {
  std::vector<int> group_of;          // node -> generating group
  std::vector<double> theta;          // per subgroup d >= 1
  Grid<int> s, r;                     // indicators (off-diagonal)
};

struct SynthResult {
  InteractionMatrix data;
  SubgroupMap subgroups;
  GroundTruth truth;
};

SynthResult generate(const SynthSpec& spec);

// The synthetic design used throughout the experiments: 50 nodes in four
// groups of 20/13/9/8, fixed membership rows and compatibility matrix,
// Gumbel(3.5) coupling. partial = true puts a second copula on all pairs
// outside the first 20-node block instead of one copula everywhere.
SynthSpec paper_synthetic_spec(bool partial, std::uint64_t seed);

}  // namespace cmmsb
