/**
 * @file network.hpp
 * @brief Stochastic time-dependent network, support-point distribution,
 *        event collections and state transitions.
 *
 * Travel times are a joint discrete distribution over R support points, each
 * a K x m table of integer link travel times. Period K-1 is reused for every
 * later time. Under perfect online information the traveler arriving at time
 * t has seen all link travel times of periods 0..min(t, K-1); the support
 * points compatible with what was seen form the event collection.
 */
#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace routelogit {

using LinkId = int;
using Time = int;

struct Link {
  LinkId id = 0;
  std::string from;  // may be empty for the origin dummy link
  std::string to;
};

/// Either a single absorbing link or a node; with a node every link entering
/// it is absorbing.
struct Destination {
  std::optional<LinkId> link;
  std::optional<std::string> node;
};

class StdNetwork {
 public:
  StdNetwork(std::vector<std::string> nodes, std::vector<Link> links,
             LinkId origin_link, Destination destination, int horizon);

  std::span<const std::string> nodes() const { return nodes_; }
  /// Links in ascending identifier order.
  std::span<const Link> links() const { return links_; }
  std::size_t link_count() const { return links_.size(); }
  bool has_link(LinkId id) const;
  /// Dense position of a link in links(); throws ValidationError if unknown.
  std::size_t index_of(LinkId id) const;
  const Link& link(LinkId id) const { return links_[index_of(id)]; }

  /// A(k): links leaving the head node of k, ascending. Empty for
  /// destination links.
  std::span<const LinkId> outgoing(LinkId k) const;
  bool is_outgoing(LinkId k, LinkId a) const;
  bool is_destination(LinkId k) const;

  LinkId origin_link() const { return origin_link_; }
  const Destination& destination() const { return destination_; }
  /// Number of stochastic periods K.
  int horizon() const { return horizon_; }

 private:
  std::vector<std::string> nodes_;
  std::vector<Link> links_;
  std::vector<std::vector<LinkId>> outgoing_;
  std::vector<bool> terminal_;
  LinkId origin_link_;
  Destination destination_;
  int horizon_;
};

/// Non-empty, sorted set of 0-based support-point indices.
class EventCollection {
 public:
  EventCollection() = default;
  explicit EventCollection(std::vector<int> members);

  std::span<const int> members() const { return members_; }
  std::size_t size() const { return members_.size(); }
  bool empty() const { return members_.empty(); }
  bool singleton() const { return members_.size() == 1; }
  bool contains(int r) const;

  auto operator<=>(const EventCollection&) const = default;
  bool operator==(const EventCollection&) const = default;

 private:
  std::vector<int> members_;
};

/// Equivalence classes of support points at one period; classes are ordered
/// by their smallest member.
struct Partition {
  std::vector<EventCollection> classes;
  std::vector<int> class_of;  // support point -> class index
};

class SupportPointSet {
 public:
  /// travel_times is R x K x m row-major (support point, period, dense link
  /// index). Validates probabilities and travel times against the network.
  SupportPointSet(const StdNetwork& net, std::vector<double> probabilities,
                  std::vector<int> travel_times);

  std::size_t size() const { return probabilities_.size(); }
  int periods() const { return periods_; }
  std::size_t link_count() const { return links_; }
  double probability(int r) const { return probabilities_[r]; }
  std::span<const double> probabilities() const { return probabilities_; }

  /// Period index clamped to K-1.
  int travel_time(int r, Time t, std::size_t link_index) const;
  int max_travel_time() const { return max_travel_time_; }

  /// Partition EV(min(t, K-1)).
  const Partition& partition(Time t) const;

 private:
  std::vector<double> probabilities_;
  std::vector<int> times_;
  int periods_;
  std::size_t links_;
  int max_travel_time_ = 0;
  std::vector<Partition> partitions_;
};

struct State {
  LinkId link = 0;
  Time time = 0;
  EventCollection ev;

  auto operator<=>(const State&) const = default;
  bool operator==(const State&) const = default;
};

/// Canonical compact form of a State: the event collection is replaced by its
/// class index in the partition of period min(time, K-1).
struct StateKey {
  LinkId link = 0;
  Time time = 0;
  int ev_class = 0;

  auto operator<=>(const StateKey&) const = default;
  bool operator==(const StateKey&) const = default;
};

struct StateKeyHash {
  std::size_t operator()(const StateKey& k) const noexcept {
    std::uint64_t h = static_cast<std::uint32_t>(k.link);
    h = h * 0x9E3779B97F4A7C15ULL ^ static_cast<std::uint32_t>(k.time);
    h = h * 0x9E3779B97F4A7C15ULL ^ static_cast<std::uint32_t>(k.ev_class);
    return static_cast<std::size_t>(h ^ (h >> 29));
  }
};

struct Successor {
  State state;
  double probability = 0.0;
};

const Partition& event_collections_at(const SupportPointSet& spp, Time t);

/// Pr(next | ev) = sum of p_r over next ∩ ev divided by sum of p_r over ev.
double transition_prob(const SupportPointSet& spp, const EventCollection& next,
                       const EventCollection& ev);

/// Travel time of a ∈ A(state.link) entered at state.time; all members of
/// state.ev must agree on it.
Time travel_time(const StdNetwork& net, const SupportPointSet& spp, LinkId a,
                 const State& state);

std::vector<Successor> successor_states(const StdNetwork& net,
                                        const SupportPointSet& spp,
                                        const State& state, LinkId a);

/// Throws ValidationError unless state.ev is a class of its period's partition.
StateKey state_key(const SupportPointSet& spp, const State& state);
State state_from_key(const SupportPointSet& spp, const StateKey& key);
void validate_state(const StdNetwork& net, const SupportPointSet& spp,
                    const State& state);

/// (origin_link, 0, EV) where EV is the single class at period 0.
State origin_state(const StdNetwork& net, const SupportPointSet& spp);

/// Latest arrival time a simple path started at t0 can reach.
Time max_trip_time(const StdNetwork& net, const SupportPointSet& spp,
                   Time t0 = 0);

/// "(k,t,{r...})" with 1-based support-point labels.
std::string to_string(const State& s);
std::string to_string(const EventCollection& ev);

}  // namespace routelogit
