#include "consensus_lab/markov_graph.hpp"

#include <algorithm>
#include <deque>
#include <numeric>

#include "consensus_lab/error.hpp"

namespace consensus_lab {

namespace {

std::vector<std::vector<std::size_t>> adjacency(const Matrix& q) {
    const auto n = static_cast<std::size_t>(q.rows());
    std::vector<std::vector<std::size_t>> adj(n);
    for (std::size_t u = 0; u < n; ++u)
        for (std::size_t v = 0; v < n; ++v)
            if (q(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(v)) != 0.0) adj[u].push_back(v);
    return adj;
}

void require_square(const Matrix& q) {
    if (q.rows() != q.cols()) throw PreconditionError("matrix must be square");
}

}  // namespace

std::vector<std::vector<std::size_t>> ComponentStructure::terminal_components() const {
    std::vector<std::vector<std::size_t>> out;
    for (std::size_t c = 0; c < components.size(); ++c)
        if (terminal[c]) out.push_back(components[c]);
    return out;
}

ComponentStructure strongly_connected_components(const Matrix& q) {
    require_square(q);
    const auto n = static_cast<std::size_t>(q.rows());
    const auto adj = adjacency(q);

    // Iterative Tarjan.
    constexpr std::size_t kUnvisited = static_cast<std::size_t>(-1);
    std::vector<std::size_t> index(n, kUnvisited), low(n, 0), raw_comp(n, kUnvisited);
    std::vector<bool> on_stack(n, false);
    std::vector<std::size_t> stack;
    std::size_t next_index = 0, next_comp = 0;

    struct Frame {
        std::size_t node;
        std::size_t edge;
    };
    for (std::size_t root = 0; root < n; ++root) {
        if (index[root] != kUnvisited) continue;
        std::vector<Frame> call{{root, 0}};
        index[root] = low[root] = next_index++;
        stack.push_back(root);
        on_stack[root] = true;
        while (!call.empty()) {
            Frame& f = call.back();
            if (f.edge < adj[f.node].size()) {
                const std::size_t w = adj[f.node][f.edge++];
                if (index[w] == kUnvisited) {
                    index[w] = low[w] = next_index++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    call.push_back({w, 0});
                } else if (on_stack[w]) {
                    low[f.node] = std::min(low[f.node], index[w]);
                }
                continue;
            }
            const std::size_t v = f.node;
            call.pop_back();
            if (!call.empty()) low[call.back().node] = std::min(low[call.back().node], low[v]);
            if (low[v] == index[v]) {
                std::size_t w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = false;
                    raw_comp[w] = next_comp;
                } while (w != v);
                ++next_comp;
            }
        }
    }

    // Renumber by smallest member so ids follow index order.
    std::vector<std::size_t> remap(next_comp, kUnvisited);
    ComponentStructure out;
    out.component_of.assign(n, 0);
    for (std::size_t v = 0; v < n; ++v) {
        std::size_t& id = remap[raw_comp[v]];
        if (id == kUnvisited) {
            id = out.components.size();
            out.components.emplace_back();
        }
        out.component_of[v] = id;
        out.components[id].push_back(v);
    }
    out.terminal.assign(out.components.size(), true);
    for (std::size_t u = 0; u < n; ++u)
        for (std::size_t v : adj[u])
            if (out.component_of[u] != out.component_of[v]) out.terminal[out.component_of[u]] = false;
    return out;
}

bool is_irreducible(const Matrix& q) {
    if (q.rows() == 0) return false;
    return strongly_connected_components(q).count() == 1;
}

std::size_t component_period(const Matrix& q, const std::vector<std::size_t>& nodes) {
    if (nodes.empty()) return 0;
    const auto n = static_cast<std::size_t>(q.rows());
    std::vector<bool> member(n, false);
    for (auto v : nodes) member[v] = true;
    constexpr long kUnseen = -1;
    std::vector<long> level(n, kUnseen);
    std::deque<std::size_t> queue{nodes.front()};
    level[nodes.front()] = 0;
    std::size_t g = 0;
    while (!queue.empty()) {
        const std::size_t u = queue.front();
        queue.pop_front();
        for (std::size_t v = 0; v < n; ++v) {
            if (!member[v] || q(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(v)) == 0.0) continue;
            if (level[v] == kUnseen) {
                level[v] = level[u] + 1;
                queue.push_back(v);
            } else {
                const long diff = level[u] + 1 - level[v];
                g = std::gcd(g, static_cast<std::size_t>(diff < 0 ? -diff : diff));
            }
        }
    }
    return g;
}

std::vector<bool> reachable_from(const Matrix& q, std::size_t start) {
    require_square(q);
    const auto n = static_cast<std::size_t>(q.rows());
    std::vector<bool> seen(n, false);
    std::vector<std::size_t> todo{start};
    seen[start] = true;
    while (!todo.empty()) {
        const std::size_t u = todo.back();
        todo.pop_back();
        for (std::size_t v = 0; v < n; ++v) {
            if (!seen[v] && q(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(v)) != 0.0) {
                seen[v] = true;
                todo.push_back(v);
            }
        }
    }
    return seen;
}

long max_shortest_path(const Matrix& q) {
    require_square(q);
    const auto n = static_cast<std::size_t>(q.rows());
    const auto adj = adjacency(q);
    long worst = 0;
    for (std::size_t s = 0; s < n; ++s) {
        std::vector<long> dist(n, -1);
        std::deque<std::size_t> queue{s};
        dist[s] = 0;
        while (!queue.empty()) {
            const std::size_t u = queue.front();
            queue.pop_front();
            for (std::size_t v : adj[u]) {
                if (dist[v] < 0) {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        for (std::size_t v = 0; v < n; ++v) {
            if (dist[v] < 0) return -1;
            worst = std::max(worst, dist[v]);
        }
    }
    return worst;
}

Matrix restrict_to(const Matrix& q, const std::vector<std::size_t>& nodes) {
    const auto k = static_cast<Eigen::Index>(nodes.size());
    Matrix out(k, k);
    for (Eigen::Index a = 0; a < k; ++a)
        for (Eigen::Index b = 0; b < k; ++b)
            out(a, b) = q(static_cast<Eigen::Index>(nodes[static_cast<std::size_t>(a)]),
                          static_cast<Eigen::Index>(nodes[static_cast<std::size_t>(b)]));
    return out;
}

}  // namespace consensus_lab
