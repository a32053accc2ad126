#include "routelogit/network.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "routelogit/error.hpp"

namespace routelogit {

StdNetwork::StdNetwork(std::vector<std::string> nodes, std::vector<Link> links,
                       LinkId origin_link, Destination destination,
                       int horizon)
    : nodes_(std::move(nodes)),
      links_(std::move(links)),
      origin_link_(origin_link),
      destination_(std::move(destination)),
      horizon_(horizon) {
  if (horizon_ < 1) throw ValidationError("horizon K must be >= 1");
  if (links_.empty()) throw ValidationError("network has no links");

  std::set<std::string> node_set(nodes_.begin(), nodes_.end());
  if (node_set.size() != nodes_.size())
    throw ValidationError("node identifiers must be unique");

  std::sort(links_.begin(), links_.end(),
            [](const Link& a, const Link& b) { return a.id < b.id; });
  for (std::size_t i = 1; i < links_.size(); ++i)
    if (links_[i].id == links_[i - 1].id)
      throw ValidationError("duplicate link identifier " +
                            std::to_string(links_[i].id));

  if (!has_link(origin_link_))
    throw ValidationError("origin_link " + std::to_string(origin_link_) +
                          " is not a link");
  for (const auto& l : links_) {
    if (!node_set.count(l.to))
      throw ValidationError("link " + std::to_string(l.id) +
                            " has unknown head node '" + l.to + "'");
    if (l.from.empty() && l.id != origin_link_)
      throw ValidationError("link " + std::to_string(l.id) +
                            " has no tail node");
    if (!l.from.empty() && !node_set.count(l.from))
      throw ValidationError("link " + std::to_string(l.id) +
                            " has unknown tail node '" + l.from + "'");
  }

  if (destination_.link.has_value() == destination_.node.has_value())
    throw ValidationError(
        "exactly one of destination_link / destination_node is required");
  if (destination_.link && !has_link(*destination_.link))
    throw ValidationError("destination_link " +
                          std::to_string(*destination_.link) +
                          " is not a link");
  if (destination_.link && *destination_.link == origin_link_)
    throw ValidationError("destination_link equals origin_link");
  if (destination_.node && !node_set.count(*destination_.node))
    throw ValidationError("destination_node '" + *destination_.node +
                          "' is not a node");

  terminal_.resize(links_.size());
  for (std::size_t i = 0; i < links_.size(); ++i) {
    terminal_[i] = destination_.link ? links_[i].id == *destination_.link
                                     : links_[i].to == *destination_.node;
  }

  outgoing_.resize(links_.size());
  for (std::size_t i = 0; i < links_.size(); ++i) {
    if (terminal_[i]) continue;
    for (const auto& l : links_) {
      if (l.id != origin_link_ && l.from == links_[i].to)
        outgoing_[i].push_back(l.id);
    }
  }
}

bool StdNetwork::has_link(LinkId id) const {
  auto it = std::lower_bound(
      links_.begin(), links_.end(), id,
      [](const Link& l, LinkId v) { return l.id < v; });
  return it != links_.end() && it->id == id;
}

std::size_t StdNetwork::index_of(LinkId id) const {
  auto it = std::lower_bound(
      links_.begin(), links_.end(), id,
      [](const Link& l, LinkId v) { return l.id < v; });
  if (it == links_.end() || it->id != id)
    throw ValidationError("unknown link " + std::to_string(id));
  return static_cast<std::size_t>(it - links_.begin());
}

std::span<const LinkId> StdNetwork::outgoing(LinkId k) const {
  return outgoing_[index_of(k)];
}

bool StdNetwork::is_outgoing(LinkId k, LinkId a) const {
  auto out = outgoing(k);
  return std::binary_search(out.begin(), out.end(), a);
}

bool StdNetwork::is_destination(LinkId k) const {
  return terminal_[index_of(k)];
}

EventCollection::EventCollection(std::vector<int> members)
    : members_(std::move(members)) {
  std::sort(members_.begin(), members_.end());
  members_.erase(std::unique(members_.begin(), members_.end()),
                 members_.end());
  if (members_.empty())
    throw ValidationError("event collection must be non-empty");
}

bool EventCollection::contains(int r) const {
  return std::binary_search(members_.begin(), members_.end(), r);
}

SupportPointSet::SupportPointSet(const StdNetwork& net,
                                 std::vector<double> probabilities,
                                 std::vector<int> travel_times)
    : probabilities_(std::move(probabilities)),
      times_(std::move(travel_times)),
      periods_(net.horizon()),
      links_(net.link_count()) {
  const std::size_t R = probabilities_.size();
  if (R == 0) throw ValidationError("at least one support point is required");
  if (times_.size() != R * static_cast<std::size_t>(periods_) * links_)
    throw ValidationError("travel time table has wrong size");

  double total = 0.0;
  for (std::size_t r = 0; r < R; ++r) {
    if (!(probabilities_[r] > 0.0) || !std::isfinite(probabilities_[r]))
      throw ValidationError("support point " + std::to_string(r + 1) +
                            " probability must be > 0");
    total += probabilities_[r];
  }
  if (std::abs(total - 1.0) > 1e-12) {
    std::ostringstream os;
    os.precision(17);
    os << "probabilities sum != 1 (sum = " << total << ")";
    throw ValidationError(os.str());
  }

  const std::size_t origin = net.index_of(net.origin_link());
  for (std::size_t r = 0; r < R; ++r)
    for (int p = 0; p < periods_; ++p)
      for (std::size_t i = 0; i < links_; ++i) {
        int v = times_[(r * periods_ + p) * links_ + i];
        if (i == origin) {
          if (v < 0)
            throw ValidationError("origin link travel time must be >= 0");
          continue;
        }
        if (v < 1)
          throw ValidationError(
              "travel time must be >= 1 (link " +
              std::to_string(net.links()[i].id) + ", period " +
              std::to_string(p) + ", support point " +
              std::to_string(r + 1) + ")");
        max_travel_time_ = std::max(max_travel_time_, v);
      }

  // Refine period by period: classes at p split classes at p-1 by the
  // period-p travel-time vector.
  std::vector<int> label(R, 0);
  partitions_.reserve(periods_);
  for (int p = 0; p < periods_; ++p) {
    std::map<std::pair<int, std::vector<int>>, int> ids;
    std::vector<int> next(R);
    for (std::size_t r = 0; r < R; ++r) {
      auto first = times_.begin() + static_cast<std::ptrdiff_t>(
                                        (r * periods_ + p) * links_);
      std::vector<int> row(first, first + static_cast<std::ptrdiff_t>(links_));
      auto [it, inserted] =
          ids.try_emplace({label[r], std::move(row)}, -1);
      if (inserted) it->second = static_cast<int>(r);  // smallest member
      next[r] = it->second;
    }
    label = next;

    Partition part;
    part.class_of.assign(R, -1);
    std::map<int, int> class_index;
    std::vector<std::vector<int>> members;
    for (std::size_t r = 0; r < R; ++r) {
      auto [it, inserted] =
          class_index.try_emplace(label[r], static_cast<int>(members.size()));
      if (inserted) members.emplace_back();
      members[it->second].push_back(static_cast<int>(r));
      part.class_of[r] = it->second;
    }
    for (auto& m : members) part.classes.emplace_back(std::move(m));
    partitions_.push_back(std::move(part));
  }
}

int SupportPointSet::travel_time(int r, Time t, std::size_t link_index) const {
  const int p = std::min<Time>(t, periods_ - 1);
  return times_[(static_cast<std::size_t>(r) * periods_ + p) * links_ +
                link_index];
}

const Partition& SupportPointSet::partition(Time t) const {
  return partitions_[std::clamp<Time>(t, 0, periods_ - 1)];
}

const Partition& event_collections_at(const SupportPointSet& spp, Time t) {
  return spp.partition(t);
}

double transition_prob(const SupportPointSet& spp, const EventCollection& next,
                       const EventCollection& ev) {
  double num = 0.0;
  double den = 0.0;
  for (int r : ev.members()) {
    den += spp.probability(r);
    if (next.contains(r)) num += spp.probability(r);
  }
  if (den <= 0.0) return 0.0;
  return num / den;
}

Time travel_time(const StdNetwork& net, const SupportPointSet& spp, LinkId a,
                 const State& state) {
  if (!net.is_outgoing(state.link, a))
    throw ValidationError("link " + std::to_string(a) + " is not in A(" +
                          std::to_string(state.link) + ")");
  if (state.ev.empty()) throw ValidationError("state has empty event collection");
  const std::size_t idx = net.index_of(a);
  const auto members = state.ev.members();
  const int tt = spp.travel_time(members.front(), state.time, idx);
  for (int r : members)
    if (spp.travel_time(r, state.time, idx) != tt)
      throw PoiConsistencyError("support points of " + to_string(state) +
                                " disagree on the travel time of link " +
                                std::to_string(a));
  return tt;
}

std::vector<Successor> successor_states(const StdNetwork& net,
                                        const SupportPointSet& spp,
                                        const State& state, LinkId a) {
  const Time next_time = state.time + travel_time(net, spp, a, state);
  std::vector<Successor> out;
  for (const auto& cls : spp.partition(next_time).classes) {
    const double p = transition_prob(spp, cls, state.ev);
    if (p > 0.0) out.push_back({State{a, next_time, cls}, p});
  }
  return out;
}

StateKey state_key(const SupportPointSet& spp, const State& state) {
  if (state.ev.empty())
    throw ValidationError("state has empty event collection");
  const auto& part = spp.partition(state.time);
  const int first = state.ev.members().front();
  if (first < 0 || static_cast<std::size_t>(first) >= spp.size())
    throw ValidationError("support point index out of range in " +
                          to_string(state));
  const int cls = part.class_of[first];
  if (part.classes[cls] != state.ev)
    throw ValidationError(
        "event collection of " + to_string(state) +
        " is not a class of the partition at its time");
  return {state.link, state.time, cls};
}

State state_from_key(const SupportPointSet& spp, const StateKey& key) {
  return {key.link, key.time, spp.partition(key.time).classes.at(key.ev_class)};
}

void validate_state(const StdNetwork& net, const SupportPointSet& spp,
                    const State& state) {
  if (!net.has_link(state.link))
    throw ValidationError("unknown link in state " + to_string(state));
  if (state.time < 0) throw ValidationError("negative time in state");
  state_key(spp, state);
}

State origin_state(const StdNetwork& net, const SupportPointSet& spp) {
  const auto& part = spp.partition(0);
  if (part.classes.size() != 1)
    throw ValidationError(
        "period-0 travel times differ across support points; the initial "
        "event collection must be given explicitly");
  return {net.origin_link(), 0, part.classes.front()};
}

Time max_trip_time(const StdNetwork& net, const SupportPointSet& spp, Time t0) {
  return t0 + net.horizon() +
         static_cast<Time>(net.link_count()) * spp.max_travel_time();
}

std::string to_string(const EventCollection& ev) {
  std::string s = "{";
  bool first = true;
  for (int r : ev.members()) {
    if (!first) s += ",";
    s += std::to_string(r + 1);
    first = false;
  }
  return s + "}";
}

std::string to_string(const State& s) {
  return "(" + std::to_string(s.link) + "," + std::to_string(s.time) + "," +
         to_string(s.ev) + ")";
}

}  // namespace routelogit
