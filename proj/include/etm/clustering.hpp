#pragma once

// Aggregation of short texts into pseudo-texts by average-distance
// reassignment over a precomputed text distance matrix.

#include <cmath>
#include <cstddef>
#include <fstream>
#include <functional>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "etm/corpus.hpp"
#include "etm/distance.hpp"
#include "etm/random.hpp"

namespace etm {

class ClusteringError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Symmetric matrix with a zero diagonal, stored as the strict lower triangle.
class DistanceMatrix {
public:
    DistanceMatrix() = default;
    explicit DistanceMatrix(std::size_t n) : n_(n), values_(n * (n ? n - 1 : 0) / 2, 0.0) {}

    std::size_t size() const noexcept { return n_; }

    double operator()(std::size_t i, std::size_t j) const {
        if (i == j) return 0.0;
        return values_[slot(i, j)];
    }
    void set(std::size_t i, std::size_t j, double d) {
        if (i == j) return;
        values_[slot(i, j)] = d;
    }

private:
    static std::size_t slot(std::size_t i, std::size_t j) {
        if (i < j) std::swap(i, j);
        return i * (i - 1) / 2 + j;
    }

    std::size_t n_ = 0;
    std::vector<double> values_;
};

/// Pairwise text distances. For the one-sided relaxed backend the lower
/// text id is the source side.
inline DistanceMatrix text_distances(const Corpus& corpus, const TokenEmbeddings& space,
                                     DistanceBackend backend = DistanceBackend::SymmetricRelaxed,
                                     double undefined_distance = 2.0) {
    const std::size_t n = corpus.doc_count();
    std::vector<NBowVector> bows;
    bows.reserve(n);
    for (std::size_t i = 0; i < n; ++i) bows.push_back(nbow(corpus, i));
    DistanceMatrix dm(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            dm.set(i, j, text_distance(bows[j], bows[i], space, backend, undefined_distance));
        }
    }
    return dm;
}

class PseudoTextSet {
public:
    PseudoTextSet() = default;

    PseudoTextSet(std::size_t num_pseudo, std::vector<std::size_t> assignment)
        : assignment_(std::move(assignment)), members_(num_pseudo) {
        if (num_pseudo == 0) throw ClusteringError("number of pseudo-texts must be positive");
        for (std::size_t t = 0; t < assignment_.size(); ++t) {
            if (assignment_[t] >= num_pseudo) {
                throw ClusteringError("text " + std::to_string(t) + " assigned to pseudo-text " +
                                      std::to_string(assignment_[t]) + " >= L");
            }
            members_[assignment_[t]].insert(t);
        }
    }

    std::size_t num_pseudo() const noexcept { return members_.size(); }
    std::size_t num_texts() const noexcept { return assignment_.size(); }
    std::size_t pseudo_of(std::size_t text) const { return assignment_.at(text); }
    const std::vector<std::size_t>& assignment() const noexcept { return assignment_; }
    const std::set<std::size_t>& members(std::size_t pseudo) const { return members_.at(pseudo); }
    const std::vector<std::set<std::size_t>>& all_members() const noexcept { return members_; }

    bool operator==(const PseudoTextSet&) const = default;

private:
    std::vector<std::size_t> assignment_;
    std::vector<std::set<std::size_t>> members_;
};

/// Average distance from `text` to the members of a pseudo-text, leaving
/// `text` itself out. Infinity when nothing remains to average over.
inline double score(std::size_t text, const std::set<std::size_t>& members, const DistanceMatrix& distances) {
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t u : members) {
        if (u == text) continue;
        sum += distances(text, u);
        ++count;
    }
    if (count == 0) return std::numeric_limits<double>::infinity();
    return sum / static_cast<double>(count);
}

inline double score(std::size_t text, std::size_t pseudo, const DistanceMatrix& distances,
                    const PseudoTextSet& set) {
    return score(text, set.members(pseudo), distances);
}

/// max(1, floor(n / 50)).
inline std::size_t default_L(std::size_t n) {
    if (n == 0) throw ClusteringError("default_L: need at least one text");
    return std::max<std::size_t>(1, n / 50);
}

/// Sum over texts of the score of their assigned pseudo-text, evaluated
/// against the memberships in `frozen`.
inline double clustering_objective(const std::vector<std::size_t>& assignment, const PseudoTextSet& frozen,
                                   const DistanceMatrix& distances) {
    double total = 0.0;
    for (std::size_t t = 0; t < assignment.size(); ++t) total += score(t, assignment[t], distances, frozen);
    return total;
}

struct ClusterOptions {
    std::size_t num_pseudo = 1;
    std::size_t max_iters = 100;
    std::uint64_t seed = 1;
};

/// Observer invoked after each sweep with (iteration, memberships before the
/// sweep, assignment after the sweep, reassignment count).
using ClusterObserver =
    std::function<void(std::size_t, const PseudoTextSet&, const std::vector<std::size_t>&, std::size_t)>;

inline PseudoTextSet initial_partition(std::size_t n, std::size_t num_pseudo, Rng& rng) {
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    shuffle(order, rng);
    std::vector<std::size_t> assignment(n);
    for (std::size_t pos = 0; pos < n; ++pos) assignment[order[pos]] = pos % num_pseudo;
    return {num_pseudo, std::move(assignment)};
}

/// Iterative reassignment. Every sweep scores all texts against the
/// memberships frozen at the start of the sweep and commits the new
/// assignment at the end. Simultaneous moves can cycle (two mirrored
/// partitions swapping forever), so a sweep that would revisit an earlier
/// partition commits only its single largest improvement instead.
/// Stops after a sweep with no moves or `max_iters`.
inline PseudoTextSet cluster(const DistanceMatrix& distances, const ClusterOptions& opts,
                             const ClusterObserver& observer = {}) {
    const std::size_t n = distances.size();
    const std::size_t L = opts.num_pseudo;
    if (L < 1 || L > n) {
        throw ClusteringError("number of pseudo-texts must be in [1, " + std::to_string(n) + "], got " +
                              std::to_string(L));
    }
    Rng rng(opts.seed);
    PseudoTextSet current = initial_partition(n, L, rng);
    std::vector<std::size_t> visit(n);
    for (std::size_t i = 0; i < n; ++i) visit[i] = i;
    shuffle(visit, rng);

    std::vector<std::size_t> next(n);
    std::vector<double> sums(L);
    std::vector<std::size_t> counts(L);
    std::vector<double> gain(n);
    std::set<std::vector<std::size_t>> seen{current.assignment()};
    for (std::size_t iter = 0; iter < opts.max_iters; ++iter) {
        std::size_t moves = 0;
        next = current.assignment();
        for (std::size_t t : visit) {
            std::fill(sums.begin(), sums.end(), 0.0);
            std::fill(counts.begin(), counts.end(), 0);
            for (std::size_t u = 0; u < n; ++u) {
                if (u == t) continue;
                const std::size_t p = current.pseudo_of(u);
                sums[p] += distances(t, u);
                ++counts[p];
            }
            auto score_of = [&](std::size_t p) {
                return counts[p] ? sums[p] / static_cast<double>(counts[p]) : std::numeric_limits<double>::infinity();
            };
            std::size_t best = current.pseudo_of(t);
            double best_score = std::numeric_limits<double>::infinity();
            for (std::size_t p = 0; p < L; ++p) {
                const double s = score_of(p);
                if (s < best_score) {
                    best_score = s;
                    best = p;
                }
            }
            gain[t] = 0.0;
            if (best != next[t]) {
                ++moves;
                const double stay = score_of(next[t]);
                gain[t] = std::isinf(stay) ? std::numeric_limits<double>::infinity() : stay - best_score;
            }
            next[t] = best;
        }
        if (moves > 0 && seen.count(next)) {
            std::size_t pick = 0;
            for (std::size_t t = 1; t < n; ++t) {
                if (gain[t] > gain[pick]) pick = t;
            }
            const std::size_t target = next[pick];
            next = current.assignment();
            next[pick] = target;
            moves = 1;
        }
        if (observer) observer(iter, current, next, moves);
        if (moves == 0) break;
        current = PseudoTextSet(L, next);
        seen.insert(next);
    }
    return current;
}

inline PseudoTextSet cluster(const Corpus& corpus, const TokenEmbeddings& space, const ClusterOptions& opts,
                             DistanceBackend backend = DistanceBackend::SymmetricRelaxed,
                             double undefined_distance = 2.0) {
    if (opts.num_pseudo < 1 || opts.num_pseudo > corpus.doc_count()) {
        throw ClusteringError("number of pseudo-texts must be in [1, " + std::to_string(corpus.doc_count()) +
                              "], got " + std::to_string(opts.num_pseudo));
    }
    return cluster(text_distances(corpus, space, backend, undefined_distance), opts);
}

/// Assignment file: one "text_id<TAB>pseudo_id" line per text.
inline void save_assignment(const PseudoTextSet& set, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    for (std::size_t t = 0; t < set.num_texts(); ++t) out << t << '\t' << set.pseudo_of(t) << '\n';
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

/// Loads an assignment file; L is taken as max pseudo id + 1 unless given.
inline PseudoTextSet load_assignment(const std::string& path, std::size_t num_pseudo = 0) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::vector<std::size_t> assignment;
    std::string line;
    std::size_t line_no = 0;
    std::size_t max_id = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream fields(line);
        std::size_t text = 0;
        std::size_t pseudo = 0;
        if (!(fields >> text >> pseudo) || text != assignment.size()) {
            throw ClusteringError(path + " line " + std::to_string(line_no) + ": expected '" +
                                  std::to_string(assignment.size()) + "<TAB>pseudo_id'");
        }
        assignment.push_back(pseudo);
        max_id = std::max(max_id, pseudo);
    }
    if (assignment.empty()) throw ClusteringError("assignment file '" + path + "' is empty");
    return {num_pseudo ? num_pseudo : max_id + 1, std::move(assignment)};
}

}  // namespace etm
