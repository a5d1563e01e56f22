#pragma once

// Word Mover's Distance between nBOW vectors: the exact transportation
// problem and its relaxation with the target-marginal constraint dropped.

#include <algorithm>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "etm/corpus.hpp"
#include "etm/embeddings.hpp"

namespace etm {

class DistanceUndefinedError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

struct FlowEntry {
    TokenId source;
    TokenId target;
    double amount;

    bool operator==(const FlowEntry&) const = default;
};

struct FlowMatrix {
    std::vector<FlowEntry> entries;  // sorted by (source, target), zero entries omitted
    double total_cost = 0.0;

    double row_sum(TokenId source) const {
        double s = 0.0;
        for (const auto& e : entries) s += e.source == source ? e.amount : 0.0;
        return s;
    }
    double column_sum(TokenId target) const {
        double s = 0.0;
        for (const auto& e : entries) s += e.target == target ? e.amount : 0.0;
        return s;
    }
};

struct WmdResult {
    double cost = 0.0;
    FlowMatrix flow;
};

namespace detail {

struct EmbeddedBow {
    std::vector<TokenId> tokens;
    std::vector<double> weights;
};

/// Keeps the tokens that have vectors and renormalizes their mass to one.
inline EmbeddedBow embedded_part(const NBowVector& bow, const TokenEmbeddings& space) {
    EmbeddedBow out;
    double total = 0.0;
    for (const auto& [t, w] : bow.entries) {
        if (!space.embedded(t)) continue;
        out.tokens.push_back(t);
        out.weights.push_back(w);
        total += w;
    }
    if (out.tokens.empty() || !(total > 0.0)) {
        throw DistanceUndefinedError("text has no embedded tokens; WMD is undefined");
    }
    for (double& w : out.weights) w /= total;
    return out;
}

inline std::vector<double> cost_matrix(const EmbeddedBow& a, const EmbeddedBow& b, const TokenEmbeddings& space) {
    std::vector<double> cost(a.tokens.size() * b.tokens.size());
    for (std::size_t u = 0; u < a.tokens.size(); ++u) {
        for (std::size_t v = 0; v < b.tokens.size(); ++v) {
            cost[u * b.tokens.size() + v] = space.distance(a.tokens[u], b.tokens[v]);
        }
    }
    return cost;
}

/// Balanced transportation problem by successive shortest augmenting paths
/// (Bellman-Ford on the residual graph). `cost` is row-major m x n. Returns
/// the m x n flow. Relaxations run in ascending (source, target) order and
/// only strict improvements are taken, so ties resolve to the lowest pair.
inline std::vector<double> solve_transport(const std::vector<double>& supply, const std::vector<double>& demand,
                                           const std::vector<double>& cost) {
    constexpr double kEps = 1e-14;
    const std::size_t m = supply.size();
    const std::size_t n = demand.size();
    std::vector<double> flow(m * n, 0.0);
    std::vector<double> out_left(supply);
    std::vector<double> in_left(demand);

    // node layout: 0 = super source, 1..m sources, m+1..m+n sinks, m+n+1 super sink
    const std::size_t nodes = m + n + 2;
    const std::size_t src = 0;
    const std::size_t sink = m + n + 1;
    constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
    std::vector<double> dist(nodes);
    std::vector<std::size_t> pred(nodes);

    double shipped = 0.0;
    double total = 0.0;
    for (double s : supply) total += s;

    for (std::size_t round = 0; round < 4 * (m + 1) * (n + 1) + 16; ++round) {
        std::fill(dist.begin(), dist.end(), std::numeric_limits<double>::infinity());
        std::fill(pred.begin(), pred.end(), kNone);
        dist[src] = 0.0;
        for (std::size_t pass = 0; pass < nodes; ++pass) {
            bool changed = false;
            for (std::size_t u = 0; u < m; ++u) {
                const std::size_t un = 1 + u;
                if (out_left[u] > kEps && dist[src] < dist[un]) {
                    dist[un] = dist[src];
                    pred[un] = src;
                    changed = true;
                }
            }
            for (std::size_t u = 0; u < m; ++u) {
                const std::size_t un = 1 + u;
                for (std::size_t v = 0; v < n; ++v) {
                    const std::size_t vn = 1 + m + v;
                    const double c = cost[u * n + v];
                    if (dist[un] + c < dist[vn] - 1e-15) {
                        dist[vn] = dist[un] + c;
                        pred[vn] = un;
                        changed = true;
                    }
                    if (flow[u * n + v] > kEps && dist[vn] - c < dist[un] - 1e-15) {
                        dist[un] = dist[vn] - c;
                        pred[un] = vn;
                        changed = true;
                    }
                }
            }
            for (std::size_t v = 0; v < n; ++v) {
                const std::size_t vn = 1 + m + v;
                if (in_left[v] > kEps && dist[vn] < dist[sink]) {
                    dist[sink] = dist[vn];
                    pred[sink] = vn;
                    changed = true;
                }
            }
            if (!changed) break;
        }
        if (pred[sink] == kNone) break;

        double push = std::numeric_limits<double>::infinity();
        for (std::size_t x = sink; x != src; x = pred[x]) {
            const std::size_t p = pred[x];
            if (p == src) {
                push = std::min(push, out_left[x - 1]);
            } else if (x == sink) {
                push = std::min(push, in_left[p - 1 - m]);
            } else if (p >= 1 + m) {  // backward edge sink-side -> source-side
                push = std::min(push, flow[(x - 1) * n + (p - 1 - m)]);
            }
        }
        for (std::size_t x = sink; x != src; x = pred[x]) {
            const std::size_t p = pred[x];
            if (p == src) {
                out_left[x - 1] -= push;
            } else if (x == sink) {
                in_left[p - 1 - m] -= push;
            } else if (p >= 1 + m) {
                flow[(x - 1) * n + (p - 1 - m)] -= push;
            } else {
                flow[(p - 1) * n + (x - 1 - m)] += push;
            }
        }
        shipped += push;
        if (shipped >= total - kEps) break;
    }
    if (shipped < total - 1e-9) throw std::logic_error("transport solver failed to ship all mass");
    for (double& f : flow) f = std::max(f, 0.0);
    return flow;
}

}  // namespace detail

inline WmdResult wmd_exact(const NBowVector& a, const NBowVector& b, const TokenEmbeddings& space) {
    const auto ea = detail::embedded_part(a, space);
    const auto eb = detail::embedded_part(b, space);
    const auto cost = detail::cost_matrix(ea, eb, space);
    const auto flow = detail::solve_transport(ea.weights, eb.weights, cost);

    WmdResult result;
    const std::size_t n = eb.tokens.size();
    for (std::size_t u = 0; u < ea.tokens.size(); ++u) {
        for (std::size_t v = 0; v < n; ++v) {
            const double f = flow[u * n + v];
            if (f <= 0.0) continue;
            result.flow.entries.push_back({ea.tokens[u], eb.tokens[v], f});
            result.cost += f * cost[u * n + v];
        }
    }
    result.cost = std::max(result.cost, 0.0);
    result.flow.total_cost = result.cost;
    return result;
}

/// Relaxed WMD with the flow matrix of its closed-form optimum: each source
/// word ships all of its mass to its nearest target word (lowest id on ties).
inline WmdResult wmd_relaxed_flow(const NBowVector& a, const NBowVector& b, const TokenEmbeddings& space) {
    const auto ea = detail::embedded_part(a, space);
    const auto eb = detail::embedded_part(b, space);
    WmdResult result;
    for (std::size_t u = 0; u < ea.tokens.size(); ++u) {
        std::size_t best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t v = 0; v < eb.tokens.size(); ++v) {
            const double d = space.distance(ea.tokens[u], eb.tokens[v]);
            if (d < best_d) {
                best_d = d;
                best = v;
            }
        }
        result.flow.entries.push_back({ea.tokens[u], eb.tokens[best], ea.weights[u]});
        result.cost += ea.weights[u] * best_d;
    }
    result.flow.total_cost = result.cost;
    return result;
}

inline double wmd_relaxed(const NBowVector& a, const NBowVector& b, const TokenEmbeddings& space) {
    return wmd_relaxed_flow(a, b, space).cost;
}

inline double symmetric_relaxed(const NBowVector& a, const NBowVector& b, const TokenEmbeddings& space) {
    return std::max(wmd_relaxed(a, b, space), wmd_relaxed(b, a, space));
}

enum class DistanceBackend { SymmetricRelaxed, Relaxed, Exact };

inline DistanceBackend parse_backend(const std::string& name) {
    if (name == "relaxed-symmetric" || name == "symmetric") return DistanceBackend::SymmetricRelaxed;
    if (name == "relaxed") return DistanceBackend::Relaxed;
    if (name == "exact") return DistanceBackend::Exact;
    throw std::invalid_argument("unknown distance backend '" + name + "'");
}

/// Text distance used by clustering. Pairs where either side has no embedded
/// token get `undefined_distance` instead of an error.
inline double text_distance(const NBowVector& a, const NBowVector& b, const TokenEmbeddings& space,
                            DistanceBackend backend, double undefined_distance = 2.0) {
    auto has_embedded = [&](const NBowVector& v) {
        return std::any_of(v.entries.begin(), v.entries.end(), [&](const auto& e) { return space.embedded(e.first); });
    };
    if (!has_embedded(a) || !has_embedded(b)) return undefined_distance;
    switch (backend) {
        case DistanceBackend::Exact:
            return wmd_exact(a, b, space).cost;
        case DistanceBackend::Relaxed:
            return wmd_relaxed(a, b, space);
        case DistanceBackend::SymmetricRelaxed:
        default:
            return symmetric_relaxed(a, b, space);
    }
}

}  // namespace etm
