#include "cyclicsim/topology.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <set>

#include "cyclicsim/error.hpp"

namespace cyclicsim {

namespace rng {

double next_double(std::mt19937_64& g) {
    return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

std::uint64_t next_below(std::mt19937_64& g, std::uint64_t n) {
    return static_cast<std::uint64_t>(next_double(g) * static_cast<double>(n));
}

}  // namespace rng

bool NetworkGraph::has_node(NodeId id) const {
    return id >= 0 && id < static_cast<NodeId>(index_of_.size()) && index_of_[id] >= 0;
}

const Node& NetworkGraph::node(NodeId id) const {
    if (!has_node(id)) fail(Errc::DanglingLinkEndpoint, "unknown node id " + std::to_string(id));
    return nodes_[index_of_[id]];
}

const std::vector<NodeId>& NetworkGraph::neighbors(NodeId id) const {
    node(id);
    return adjacency_[index_of_[id]];
}

const Link& NetworkGraph::link_between(NodeId a, NodeId b) const {
    node(a);
    node(b);
    const auto& row = link_index_[index_of_[a]];
    const std::int32_t pos = row[index_of_[b]];
    if (pos < 0) fail(Errc::DanglingLinkEndpoint,
                      "no link " + std::to_string(a) + "-" + std::to_string(b));
    return links_[pos];
}

std::size_t NetworkGraph::switch_count() const {
    return static_cast<std::size_t>(std::count_if(
        nodes_.begin(), nodes_.end(), [](const Node& n) { return n.kind == NodeKind::Switch; }));
}

std::size_t NetworkGraph::end_station_count() const {
    return nodes_.size() - switch_count();
}

std::vector<NodeId> NetworkGraph::end_station_ids() const {
    std::vector<NodeId> ids;
    for (const Node& n : nodes_)
        if (n.kind == NodeKind::EndStation) ids.push_back(n.id);
    std::sort(ids.begin(), ids.end());
    return ids;
}

NetworkGraph build_graph(std::vector<Node> nodes, std::vector<Link> links) {
    NetworkGraph g;
    g.nodes_ = std::move(nodes);
    g.links_ = std::move(links);
    std::sort(g.nodes_.begin(), g.nodes_.end(),
              [](const Node& a, const Node& b) { return a.id < b.id; });

    NodeId max_id = -1;
    for (const Node& n : g.nodes_) {
        if (n.id < 0) fail(Errc::InvalidParameter, "negative node id");
        max_id = std::max(max_id, n.id);
    }
    g.index_of_.assign(static_cast<std::size_t>(max_id) + 1, -1);
    for (std::size_t i = 0; i < g.nodes_.size(); ++i) {
        NodeId id = g.nodes_[i].id;
        if (g.index_of_[id] >= 0)
            fail(Errc::DuplicateNodeId, "node id " + std::to_string(id) + " appears twice");
        g.index_of_[id] = static_cast<std::int32_t>(i);
    }

    const std::size_t n = g.nodes_.size();
    g.adjacency_.assign(n, {});
    g.link_index_.assign(n, std::vector<std::int32_t>(n, -1));
    for (std::size_t li = 0; li < g.links_.size(); ++li) {
        const Link& l = g.links_[li];
        if (!g.has_node(l.a) || !g.has_node(l.b))
            fail(Errc::DanglingLinkEndpoint, "link references absent node id " +
                                                 std::to_string(g.has_node(l.a) ? l.b : l.a));
        if (l.a == l.b) fail(Errc::InvalidParameter, "self-link at node " + std::to_string(l.a));
        if (l.rate_bps <= 0) fail(Errc::InvalidParameter, "link rate must be > 0");
        if (l.prop_delay < 0) fail(Errc::InvalidParameter, "negative propagation delay");
        const auto ia = g.index_of_[l.a], ib = g.index_of_[l.b];
        if (g.link_index_[ia][ib] >= 0)
            fail(Errc::InvalidParameter, "duplicate link " + std::to_string(l.a) + "-" +
                                             std::to_string(l.b));
        g.link_index_[ia][ib] = static_cast<std::int32_t>(li);
        g.link_index_[ib][ia] = static_cast<std::int32_t>(li);
        g.adjacency_[ia].push_back(l.b);
        g.adjacency_[ib].push_back(l.a);
    }
    for (auto& adj : g.adjacency_) std::sort(adj.begin(), adj.end());

    for (const Node& nd : g.nodes_) {
        if (nd.kind == NodeKind::EndStation) {
            const auto& adj = g.adjacency_[g.index_of_[nd.id]];
            if (adj.size() != 1 || g.node(adj.empty() ? nd.id : adj[0]).kind != NodeKind::Switch)
                fail(Errc::EndStationDegreeViolation,
                     "end station " + std::to_string(nd.id) +
                         " must attach to exactly one switch");
        }
    }
    if (g.switch_count() < 1 || g.end_station_count() < 2)
        fail(Errc::InvalidParameter, "graph needs >= 1 switch and >= 2 end stations");

    // Connectivity sweep from the first node.
    std::vector<char> seen(n, 0);
    std::deque<std::size_t> bfs{0};
    seen[0] = 1;
    std::size_t reached = 1;
    while (!bfs.empty()) {
        std::size_t cur = bfs.front();
        bfs.pop_front();
        for (NodeId nb : g.adjacency_[cur]) {
            auto idx = static_cast<std::size_t>(g.index_of_[nb]);
            if (!seen[idx]) {
                seen[idx] = 1;
                ++reached;
                bfs.push_back(idx);
            }
        }
    }
    if (reached != n) fail(Errc::DisconnectedGraph, "graph is not connected");
    return g;
}

namespace {

std::vector<Node> make_switches(int n_sw) {
    std::vector<Node> nodes;
    for (int i = 0; i < n_sw; ++i)
        nodes.push_back({i, NodeKind::Switch, "SW" + std::to_string(i)});
    return nodes;
}

// End stations attach after the backbone, round-robin over switch ids.
void attach_end_stations(std::vector<Node>& nodes, std::vector<Link>& links, int n_sw,
                         int es_per_sw, const LinkParams& lp) {
    NodeId next = n_sw;
    int es_idx = 0;
    for (int round = 0; round < es_per_sw; ++round) {
        for (int sw = 0; sw < n_sw; ++sw) {
            nodes.push_back({next, NodeKind::EndStation, "ES" + std::to_string(es_idx++)});
            links.push_back({next, sw, lp.rate_bps, lp.prop_delay});
            ++next;
        }
    }
}

bool backbone_connected(int n_sw, const std::set<std::pair<int, int>>& edges) {
    if (n_sw <= 1) return true;
    std::vector<std::vector<int>> adj(n_sw);
    for (auto [a, b] : edges) {
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    std::vector<char> seen(n_sw, 0);
    std::deque<int> q{0};
    seen[0] = 1;
    int reached = 1;
    while (!q.empty()) {
        int cur = q.front();
        q.pop_front();
        for (int nb : adj[cur])
            if (!seen[nb]) {
                seen[nb] = 1;
                ++reached;
                q.push_back(nb);
            }
    }
    return reached == n_sw;
}

NetworkGraph assemble(int n_sw, const std::set<std::pair<int, int>>& backbone, int es_per_sw,
                      const LinkParams& lp) {
    std::vector<Node> nodes = make_switches(n_sw);
    std::vector<Link> links;
    for (auto [a, b] : backbone) links.push_back({a, b, lp.rate_bps, lp.prop_delay});
    attach_end_stations(nodes, links, n_sw, es_per_sw, lp);
    return build_graph(std::move(nodes), std::move(links));
}

constexpr int kConnectivityRetries = 1000;

}  // namespace

NetworkGraph generate_one_switch(int n_es, const LinkParams& lp) {
    if (n_es < 2) fail(Errc::InvalidParameter, "one-switch topology needs n_es >= 2");
    std::vector<Node> nodes = make_switches(1);
    std::vector<Link> links;
    attach_end_stations(nodes, links, 1, n_es, lp);
    return build_graph(std::move(nodes), std::move(links));
}

NetworkGraph generate_ring(int n_sw, int es_per_sw, const LinkParams& lp) {
    if (n_sw < 3) fail(Errc::InvalidParameter, "ring needs n_sw >= 3");
    if (es_per_sw < 1) fail(Errc::InvalidParameter, "ring needs es_per_sw >= 1");
    std::set<std::pair<int, int>> edges;
    for (int i = 0; i < n_sw; ++i) edges.insert({std::min(i, (i + 1) % n_sw),
                                                 std::max(i, (i + 1) % n_sw)});
    return assemble(n_sw, edges, es_per_sw, lp);
}

NetworkGraph generate_erdos_renyi(int n_sw, double p, int es_per_sw, std::uint64_t seed,
                                  const LinkParams& lp) {
    if (n_sw < 1 || es_per_sw < 1 || !(p > 0.0) || p > 1.0)
        fail(Errc::InvalidParameter, "erdos-renyi needs n_sw >= 1, es_per_sw >= 1, 0 < p <= 1");
    std::mt19937_64 gen(seed);
    for (int attempt = 0; attempt < kConnectivityRetries; ++attempt) {
        std::set<std::pair<int, int>> edges;
        for (int i = 0; i < n_sw; ++i)
            for (int j = i + 1; j < n_sw; ++j)
                if (rng::next_double(gen) < p) edges.insert({i, j});
        if (backbone_connected(n_sw, edges)) return assemble(n_sw, edges, es_per_sw, lp);
    }
    fail(Errc::GenerationFailed, "no connected Erdos-Renyi draw within retry budget");
}

NetworkGraph generate_random_regular(int n_sw, int degree, int es_per_sw, std::uint64_t seed,
                                     const LinkParams& lp) {
    if (degree < 1 || degree >= n_sw || (static_cast<long long>(n_sw) * degree) % 2 != 0 ||
        es_per_sw < 1)
        fail(Errc::InvalidParameter, "random-regular needs degree < n_sw and n_sw*degree even");
    std::mt19937_64 gen(seed);
    for (int attempt = 0; attempt < kConnectivityRetries; ++attempt) {
        // Configuration model: shuffle the stub list, pair consecutive stubs,
        // reject draws with self-loops or parallel edges.
        std::vector<int> stubs;
        stubs.reserve(static_cast<std::size_t>(n_sw) * degree);
        for (int v = 0; v < n_sw; ++v)
            for (int k = 0; k < degree; ++k) stubs.push_back(v);
        for (std::size_t i = stubs.size() - 1; i > 0; --i)
            std::swap(stubs[i], stubs[rng::next_below(gen, i + 1)]);
        std::set<std::pair<int, int>> edges;
        bool ok = true;
        for (std::size_t i = 0; i + 1 < stubs.size(); i += 2) {
            int a = stubs[i], b = stubs[i + 1];
            if (a == b || !edges.insert({std::min(a, b), std::max(a, b)}).second) {
                ok = false;
                break;
            }
        }
        if (ok && backbone_connected(n_sw, edges)) return assemble(n_sw, edges, es_per_sw, lp);
    }
    fail(Errc::GenerationFailed, "no connected regular pairing within retry budget");
}

NetworkGraph generate_barabasi_albert(int n_sw, int m_attach, int es_per_sw, std::uint64_t seed,
                                      const LinkParams& lp) {
    if (m_attach < 1 || m_attach >= n_sw || es_per_sw < 1)
        fail(Errc::InvalidParameter, "barabasi-albert needs 1 <= m_attach < n_sw");
    std::mt19937_64 gen(seed);
    std::set<std::pair<int, int>> edges;
    std::vector<int> attachment_pool;  // node id repeated once per incident edge
    for (int i = 0; i < m_attach; ++i)
        for (int j = i + 1; j < m_attach; ++j) {
            edges.insert({i, j});
            attachment_pool.push_back(i);
            attachment_pool.push_back(j);
        }
    for (int v = m_attach; v < n_sw; ++v) {
        std::set<int> targets;
        while (static_cast<int>(targets.size()) < m_attach) {
            int t;
            if (attachment_pool.empty())
                t = static_cast<int>(rng::next_below(gen, static_cast<std::uint64_t>(v)));
            else
                t = attachment_pool[rng::next_below(gen, attachment_pool.size())];
            targets.insert(t);
        }
        for (int t : targets) {
            edges.insert({std::min(v, t), std::max(v, t)});
            attachment_pool.push_back(v);
            attachment_pool.push_back(t);
        }
    }
    return assemble(n_sw, edges, es_per_sw, lp);
}

Route shortest_path(const NetworkGraph& g, NodeId src, NodeId dst) {
    if (src == dst) fail(Errc::InvalidParameter, "src and dst must differ");
    if (g.node(src).kind != NodeKind::EndStation || g.node(dst).kind != NodeKind::EndStation)
        fail(Errc::InvalidParameter, "src and dst must be end stations");

    NodeId max_id = 0;
    for (const Node& n : g.nodes()) max_id = std::max(max_id, n.id);
    std::vector<NodeId> parent(static_cast<std::size_t>(max_id) + 1, -1);
    auto parent_of = [&](NodeId id) -> NodeId& { return parent[static_cast<std::size_t>(id)]; };
    std::deque<NodeId> q{src};
    parent_of(src) = src;
    bool found = false;
    while (!q.empty() && !found) {
        NodeId cur = q.front();
        q.pop_front();
        for (NodeId nb : g.neighbors(cur)) {  // ascending id: deterministic tie-break
            if (parent_of(nb) != -1) continue;
            parent_of(nb) = cur;
            if (nb == dst) {
                found = true;
                break;
            }
            // Interior hops must be switches; a foreign ES is a dead end.
            if (g.node(nb).kind == NodeKind::Switch) q.push_back(nb);
        }
    }
    if (!found) fail(Errc::NoPath, "no route from " + std::to_string(src) + " to " +
                                       std::to_string(dst));

    Route r;
    for (NodeId cur = dst;; cur = parent_of(cur)) {
        r.path.push_back(cur);
        if (cur == src) break;
    }
    std::reverse(r.path.begin(), r.path.end());
    for (NodeId id : r.path)
        if (g.node(id).kind == NodeKind::Switch) ++r.sw_count;
    return r;
}

}  // namespace cyclicsim
