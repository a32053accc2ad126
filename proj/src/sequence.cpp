#include "routelogit/sequence.hpp"

#include <algorithm>
#include <map>

#include "routelogit/error.hpp"

namespace routelogit {

void validate_sequence(const StdNetwork& net, const SupportPointSet& spp,
                       const StateSequence& seq) {
  if (seq.states.empty()) throw InvalidSequenceError("empty state sequence");
  for (std::size_t i = 0; i < seq.states.size(); ++i) {
    try {
      validate_state(net, spp, seq.states[i]);
    } catch (const ValidationError& e) {
      throw InvalidSequenceError("state " + std::to_string(i) + ": " +
                                 e.what());
    }
  }
  for (std::size_t i = 0; i + 1 < seq.states.size(); ++i) {
    const State& cur = seq.states[i];
    const State& nxt = seq.states[i + 1];
    const std::string where = "step " + std::to_string(i) + " " +
                              to_string(cur) + " -> " + to_string(nxt);
    if (net.is_destination(cur.link))
      throw InvalidSequenceError(where + ": continues past the destination");
    if (!net.is_outgoing(cur.link, nxt.link))
      throw InvalidSequenceError(where + ": link not in A(k)");
    Time tt = 0;
    try {
      tt = travel_time(net, spp, nxt.link, cur);
    } catch (const PoiConsistencyError& e) {
      throw InvalidSequenceError(where + ": " + e.what());
    }
    if (nxt.time != cur.time + tt)
      throw InvalidSequenceError(where + ": arrival time should be " +
                                 std::to_string(cur.time + tt));
    for (int r : nxt.ev.members())
      if (!cur.ev.contains(r))
        throw InvalidSequenceError(where +
                                   ": event collection is not a refinement");
  }
  if (!net.is_destination(seq.states.back().link))
    throw InvalidSequenceError("sequence does not end at the destination");
}

std::vector<LinkId> link_path(const StateSequence& seq) {
  std::vector<LinkId> path;
  path.reserve(seq.states.size());
  for (const auto& s : seq.states) path.push_back(s.link);
  return path;
}

std::vector<PathProbability> aggregate_paths(
    const std::vector<SequenceProbability>& seqs) {
  std::map<std::vector<LinkId>, double> acc;
  for (const auto& sp : seqs) acc[link_path(sp.sequence)] += sp.probability;
  std::vector<PathProbability> out;
  out.reserve(acc.size());
  for (auto& [path, p] : acc) out.push_back({path, p});
  return out;
}

std::string to_string(const StateSequence& seq) {
  std::string s;
  for (std::size_t i = 0; i < seq.states.size(); ++i) {
    if (i) s += ">";
    s += to_string(seq.states[i]);
  }
  return s;
}

std::string path_string(const std::vector<LinkId>& path) {
  std::string s;
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (i) s += "-";
    s += std::to_string(path[i]);
  }
  return s;
}

}  // namespace routelogit
