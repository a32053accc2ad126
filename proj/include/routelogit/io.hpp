/**
 * @file io.hpp
 * @brief JSON network / policy / observation documents and CSV helpers.
 *
 * Network document:
 *   {
 *     "nodes": ["a", "b", "c"],
 *     "links": [{"id": 0, "to": "a"}, {"id": 1, "from": "a", "to": "b"}, ...],
 *     "origin_link": 0,
 *     "destination_link": 3,          // or "destination_node": "c"
 *     "horizon": 2,
 *     "support_points": [
 *       {"probability": 0.5, "travel_times": {"1": [1, 1], "2": [2, 3]}}, ...
 *     ]
 *   }
 * Every link except the origin link needs K travel times per support point.
 * Support points are labelled 1..R in documents and 0..R-1 in memory.
 */
#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "routelogit/network.hpp"
#include "routelogit/policy.hpp"
#include "routelogit/sequence.hpp"

namespace routelogit {

struct NetworkModel {
  StdNetwork network;
  SupportPointSet support_points;
};

/// Throws ParseError (with line/column) or ValidationError.
NetworkModel load_network(std::string_view text);
NetworkModel load_network_file(const std::filesystem::path& path);
nlohmann::json network_to_json(const StdNetwork& net, const SupportPointSet& spp);

nlohmann::json state_to_json(const State& s);
/// Reads {"link", "time", "ev"} with 1-based members.
State state_from_json(const nlohmann::json& j, const SupportPointSet& spp);

/// [{"policy": 1, "decisions": [{"state": {...}, "next_link": a}, ...]}, ...]
nlohmann::json policies_to_json(const PolicyChoiceSet& cs);

using ObservationSet = std::vector<StateSequence>;

/// [{"traveler_id": n, "states": [{"link", "time", "ev_members"?}, ...]}].
/// Missing ev_members are reconstructed from the observed arrival times;
/// throws InvalidSequenceError when that is ambiguous.
ObservationSet observations_from_json(const nlohmann::json& j,
                                      const StdNetwork& net,
                                      const SupportPointSet& spp);
ObservationSet load_observations(std::string_view text, const StdNetwork& net,
                                 const SupportPointSet& spp);
nlohmann::json observations_to_json(const ObservationSet& obs);

/// Rebuilds event collections from links and arrival times: a support point
/// is kept if it reproduces every observed link traversal time, and EV_i is
/// the class at t_i holding the kept points. Throws InvalidSequenceError if
/// they span several classes.
StateSequence reconstruct_event_collections(const StdNetwork& net,
                                            const SupportPointSet& spp,
                                            std::vector<std::pair<LinkId, Time>> steps);

/// 10 significant digits, "%.10g".
std::string format_number(double v);
/// Quotes a CSV field when it contains a comma or quote.
std::string csv_field(const std::string& s);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace routelogit
