#pragma once

#include <vector>

#include "routelogit/network.hpp"

namespace routelogit {

/// Observed trajectory (k_i, t_i, EV_i), i = 0..I, ending at the destination.
struct StateSequence {
  std::vector<State> states;

  bool operator==(const StateSequence&) const = default;
  auto operator<=>(const StateSequence&) const = default;
};

/// Throws InvalidSequenceError naming the first bad step.
void validate_sequence(const StdNetwork& net, const SupportPointSet& spp,
                       const StateSequence& seq);

/// The link path the sequence projects onto, starting with the initial link.
std::vector<LinkId> link_path(const StateSequence& seq);

struct SequenceProbability {
  StateSequence sequence;
  double probability = 0.0;
};

struct PathProbability {
  std::vector<LinkId> path;
  double probability = 0.0;
};

/// Aggregates sequence probabilities by projected link path, ordered by path.
std::vector<PathProbability> aggregate_paths(
    const std::vector<SequenceProbability>& seqs);

std::string to_string(const StateSequence& seq);
std::string path_string(const std::vector<LinkId>& path);

}  // namespace routelogit
