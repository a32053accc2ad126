#include "routelogit/io.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "routelogit/error.hpp"

namespace routelogit {

using nlohmann::json;

namespace {

std::string line_context(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

json parse_json(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError("JSON syntax error at " + line_context(text, e.byte) +
                     ": " + e.what());
  }
}

const json& require(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key))
    throw ParseError(where + ": missing key '" + key + "'");
  return j.at(key);
}

template <class T>
T get_as(const json& j, const std::string& where) {
  try {
    return j.get<T>();
  } catch (const json::exception& e) {
    throw ParseError(where + ": " + e.what());
  }
}

}  // namespace

NetworkModel load_network(std::string_view text) {
  const json doc = parse_json(text);
  if (!doc.is_object()) throw ParseError("network document must be an object");

  auto nodes = get_as<std::vector<std::string>>(require(doc, "nodes", "network"),
                                                "nodes");
  std::vector<Link> links;
  const json& jl = require(doc, "links", "network");
  if (!jl.is_array()) throw ParseError("links: expected a list");
  for (std::size_t i = 0; i < jl.size(); ++i) {
    const std::string where = "links[" + std::to_string(i) + "]";
    Link l;
    l.id = get_as<LinkId>(require(jl[i], "id", where), where + ".id");
    if (jl[i].contains("from") && !jl[i]["from"].is_null())
      l.from = get_as<std::string>(jl[i]["from"], where + ".from");
    l.to = get_as<std::string>(require(jl[i], "to", where), where + ".to");
    links.push_back(std::move(l));
  }

  const LinkId origin =
      get_as<LinkId>(require(doc, "origin_link", "network"), "origin_link");
  Destination dest;
  if (doc.contains("destination_link"))
    dest.link = get_as<LinkId>(doc["destination_link"], "destination_link");
  if (doc.contains("destination_node"))
    dest.node = get_as<std::string>(doc["destination_node"], "destination_node");
  if (!dest.link && !dest.node)
    throw ParseError("network: missing key 'destination_link' (or "
                     "'destination_node')");
  const int horizon = get_as<int>(require(doc, "horizon", "network"), "horizon");

  StdNetwork net(std::move(nodes), std::move(links), origin, std::move(dest),
                 horizon);

  const json& jsp = require(doc, "support_points", "network");
  if (!jsp.is_array()) throw ParseError("support_points: expected a list");
  const std::size_t m = net.link_count();
  const std::size_t K = static_cast<std::size_t>(horizon);
  std::vector<double> probs;
  std::vector<int> times(jsp.size() * K * m, 0);
  for (std::size_t r = 0; r < jsp.size(); ++r) {
    const std::string where = "support_points[" + std::to_string(r) + "]";
    probs.push_back(get_as<double>(require(jsp[r], "probability", where),
                                   where + ".probability"));
    auto tt = get_as<std::map<std::string, std::vector<int>>>(
        require(jsp[r], "travel_times", where), where + ".travel_times");
    for (const auto& [key, values] : tt) {
      LinkId id = 0;
      try {
        std::size_t pos = 0;
        id = std::stoi(key, &pos);
        if (pos != key.size()) throw std::invalid_argument(key);
      } catch (const std::exception&) {
        throw ParseError(where + ".travel_times: key '" + key +
                         "' is not a link id");
      }
      if (!net.has_link(id))
        throw ValidationError(where + ".travel_times: unknown link " + key);
      if (values.size() != K)
        throw ValidationError(where + ".travel_times[" + key + "]: expected " +
                              std::to_string(K) + " values (one per period)");
      const std::size_t li = net.index_of(id);
      for (std::size_t p = 0; p < K; ++p) times[(r * K + p) * m + li] = values[p];
    }
    for (const auto& l : net.links())
      if (l.id != net.origin_link() && !tt.count(std::to_string(l.id)))
        throw ValidationError(where + ": missing travel times for link " +
                              std::to_string(l.id));
  }
  SupportPointSet spp(net, std::move(probs), std::move(times));
  return {std::move(net), std::move(spp)};
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

NetworkModel load_network_file(const std::filesystem::path& path) {
  return load_network(read_text_file(path));
}

json network_to_json(const StdNetwork& net, const SupportPointSet& spp) {
  json doc;
  doc["nodes"] = std::vector<std::string>(net.nodes().begin(), net.nodes().end());
  json links = json::array();
  for (const auto& l : net.links()) {
    json jl{{"id", l.id}, {"to", l.to}};
    if (!l.from.empty()) jl["from"] = l.from;
    links.push_back(jl);
  }
  doc["links"] = links;
  doc["origin_link"] = net.origin_link();
  if (net.destination().link) doc["destination_link"] = *net.destination().link;
  if (net.destination().node) doc["destination_node"] = *net.destination().node;
  doc["horizon"] = net.horizon();
  json sps = json::array();
  for (std::size_t r = 0; r < spp.size(); ++r) {
    json tt = json::object();
    for (std::size_t i = 0; i < net.link_count(); ++i) {
      if (net.links()[i].id == net.origin_link()) continue;
      std::vector<int> v;
      for (int p = 0; p < net.horizon(); ++p)
        v.push_back(spp.travel_time(static_cast<int>(r), p, i));
      tt[std::to_string(net.links()[i].id)] = v;
    }
    sps.push_back({{"probability", spp.probability(static_cast<int>(r))},
                   {"travel_times", tt}});
  }
  doc["support_points"] = sps;
  return doc;
}

json state_to_json(const State& s) {
  std::vector<int> ev;
  for (int r : s.ev.members()) ev.push_back(r + 1);
  return {{"link", s.link}, {"time", s.time}, {"ev", ev}};
}

State state_from_json(const json& j, const SupportPointSet& spp) {
  State s;
  s.link = get_as<LinkId>(require(j, "link", "state"), "state.link");
  s.time = get_as<Time>(require(j, "time", "state"), "state.time");
  auto members = get_as<std::vector<int>>(require(j, "ev", "state"), "state.ev");
  for (int& r : members) {
    if (r < 1 || static_cast<std::size_t>(r) > spp.size())
      throw ValidationError("support point index " + std::to_string(r) +
                            " out of range 1.." + std::to_string(spp.size()));
    --r;
  }
  s.ev = EventCollection(std::move(members));
  return s;
}

json policies_to_json(const PolicyChoiceSet& cs) {
  json out = json::array();
  for (std::size_t i = 0; i < cs.policies.size(); ++i) {
    json decisions = json::array();
    for (const auto& [state, link] : cs.policies[i].decisions())
      decisions.push_back({{"state", state_to_json(state)}, {"next_link", link}});
    out.push_back({{"policy", i + 1}, {"decisions", decisions}});
  }
  return out;
}

StateSequence reconstruct_event_collections(
    const StdNetwork& net, const SupportPointSet& spp,
    std::vector<std::pair<LinkId, Time>> steps) {
  if (steps.empty()) throw InvalidSequenceError("empty state sequence");
  std::vector<int> kept;
  for (std::size_t r = 0; r < spp.size(); ++r) {
    bool ok = true;
    for (std::size_t i = 0; ok && i + 1 < steps.size(); ++i) {
      const LinkId a = steps[i + 1].first;
      if (!net.has_link(a)) throw InvalidSequenceError("unknown link " + std::to_string(a));
      ok = spp.travel_time(static_cast<int>(r), steps[i].second, net.index_of(a)) ==
           steps[i + 1].second - steps[i].second;
    }
    if (ok) kept.push_back(static_cast<int>(r));
  }
  if (kept.empty())
    throw InvalidSequenceError(
        "no support point reproduces the observed arrival times");
  StateSequence seq;
  for (const auto& [link, time] : steps) {
    const auto& part = spp.partition(time);
    const int cls = part.class_of[kept.front()];
    for (int r : kept)
      if (part.class_of[r] != cls)
        throw InvalidSequenceError(
            "event collection at link " + std::to_string(link) + ", time " +
            std::to_string(time) +
            " cannot be reconstructed from arrival times; supply ev_members");
    seq.states.push_back({link, time, part.classes[cls]});
  }
  return seq;
}

ObservationSet observations_from_json(const json& j, const StdNetwork& net,
                                      const SupportPointSet& spp) {
  const json& list = j.is_object() && j.contains("observations") ? j["observations"] : j;
  if (!list.is_array()) throw ParseError("observations: expected a list");
  ObservationSet obs;
  for (std::size_t n = 0; n < list.size(); ++n) {
    const std::string where = "observations[" + std::to_string(n) + "]";
    const json& states = require(list[n], "states", where);
    if (!states.is_array() || states.empty())
      throw ParseError(where + ".states: expected a non-empty list");
    bool has_ev = true;
    for (const auto& s : states) has_ev = has_ev && s.contains("ev_members");
    StateSequence seq;
    if (has_ev) {
      for (const auto& s : states) {
        json js{{"link", require(s, "link", where)},
                {"time", require(s, "time", where)},
                {"ev", s["ev_members"]}};
        seq.states.push_back(state_from_json(js, spp));
      }
    } else {
      std::vector<std::pair<LinkId, Time>> steps;
      for (const auto& s : states)
        steps.emplace_back(get_as<LinkId>(require(s, "link", where), where),
                           get_as<Time>(require(s, "time", where), where));
      seq = reconstruct_event_collections(net, spp, std::move(steps));
    }
    try {
      validate_sequence(net, spp, seq);
    } catch (const InvalidSequenceError& e) {
      throw InvalidSequenceError(where + ": " + e.what());
    }
    obs.push_back(std::move(seq));
  }
  return obs;
}

ObservationSet load_observations(std::string_view text, const StdNetwork& net,
                                 const SupportPointSet& spp) {
  return observations_from_json(parse_json(text), net, spp);
}

json observations_to_json(const ObservationSet& obs) {
  json out = json::array();
  for (std::size_t n = 0; n < obs.size(); ++n) {
    json states = json::array();
    for (const auto& s : obs[n].states) {
      std::vector<int> ev;
      for (int r : s.ev.members()) ev.push_back(r + 1);
      states.push_back({{"link", s.link}, {"time", s.time}, {"ev_members", ev}});
    }
    out.push_back({{"traveler_id", n + 1}, {"states", states}});
  }
  return out;
}

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace routelogit
