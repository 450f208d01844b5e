#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "cyclicsim/time.hpp"

namespace cyclicsim {

using NodeId = std::int32_t;

enum class NodeKind { EndStation, Switch };

struct Node {
    NodeId id = 0;
    NodeKind kind = NodeKind::Switch;
    std::string name;
};

struct Link {
    NodeId a = 0;
    NodeId b = 0;
    RateBps rate_bps = 1'000'000'000;  // 1 Gbit/s default
    TimeNs prop_delay = 100;           // 0.1 µs default
};

struct LinkParams {
    RateBps rate_bps = 1'000'000'000;
    TimeNs prop_delay = 100;
};

// Undirected ES/SW graph. Immutable once built; validation happens in
// build_graph and every generator routes through it.
class NetworkGraph {
public:
    NetworkGraph() = default;

    const std::vector<Node>& nodes() const { return nodes_; }
    const std::vector<Link>& links() const { return links_; }

    bool has_node(NodeId id) const;
    const Node& node(NodeId id) const;
    // Neighbor ids in ascending order (fixed expansion order for routing).
    const std::vector<NodeId>& neighbors(NodeId id) const;
    const Link& link_between(NodeId a, NodeId b) const;

    std::size_t switch_count() const;
    std::size_t end_station_count() const;
    std::vector<NodeId> end_station_ids() const;

    friend NetworkGraph build_graph(std::vector<Node> nodes, std::vector<Link> links);

private:
    std::vector<Node> nodes_;
    std::vector<Link> links_;
    std::vector<std::vector<NodeId>> adjacency_;   // indexed by dense position
    std::vector<std::int32_t> index_of_;           // node id -> dense position (-1 if absent)
    std::vector<std::vector<std::int32_t>> link_index_;  // dense a -> dense b -> link position
};

struct Route {
    std::vector<NodeId> path;  // src ES ... dst ES
    int sw_count = 0;
};

NetworkGraph build_graph(std::vector<Node> nodes, std::vector<Link> links);

NetworkGraph generate_one_switch(int n_es, const LinkParams& lp = {});
NetworkGraph generate_ring(int n_sw, int es_per_sw, const LinkParams& lp = {});
NetworkGraph generate_erdos_renyi(int n_sw, double p, int es_per_sw, std::uint64_t seed,
                                  const LinkParams& lp = {});
NetworkGraph generate_random_regular(int n_sw, int degree, int es_per_sw, std::uint64_t seed,
                                     const LinkParams& lp = {});
NetworkGraph generate_barabasi_albert(int n_sw, int m_attach, int es_per_sw, std::uint64_t seed,
                                      const LinkParams& lp = {});

// Minimum-hop BFS path; ties broken by expanding neighbors in ascending id order.
Route shortest_path(const NetworkGraph& g, NodeId src, NodeId dst);

namespace rng {
// Deterministic draw helpers shared by the generators. The draw conventions
// are part of the public contract (tests replay them independently):
//   next_double: top 53 bits of mt19937_64 mapped to [0, 1)
//   next_below:  rejection-free scaled draw in [0, n)
double next_double(std::mt19937_64& g);
std::uint64_t next_below(std::mt19937_64& g, std::uint64_t n);
}  // namespace rng

}  // namespace cyclicsim
