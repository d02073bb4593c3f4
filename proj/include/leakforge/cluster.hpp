#pragma once

#include <algorithm>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "leakforge/common.hpp"
#include "leakforge/tfidf.hpp"

namespace leakforge {

/// Result of cutting the agglomerative dendrogram at n_clusters. Cluster
/// indices are assigned by the smallest contained row index, so the labeling
/// is deterministic for a given input order.
struct ClusterAssignment {
    std::map<std::string, int> labels;  // doc_id -> cluster index, 0..n_clusters-1
    int n_clusters = 0;
    struct Merge {
        int a = 0;  // merged cluster ids; initial rows are 0..n-1, merges create n, n+1, ...
        int b = 0;
        double distance = 0.0;
    };
    std::vector<Merge> linkage_trace;
};

/// Agglomerative clustering with cosine distance and average linkage over the
/// TF-IDF rows. Ties on the minimum distance are broken by the smallest
/// (a, b) cluster-id pair, which makes the merge sequence deterministic.
inline ClusterAssignment hierarchical_cluster(const DocTermMatrix& matrix, int n_clusters) {
    const int n = static_cast<int>(matrix.rows.size());
    if (n_clusters < 1 || n_clusters > n)
        throw config_error("n_clusters must be in [1, n_docs]; got " + std::to_string(n_clusters) +
                           " for " + std::to_string(n) + " docs");

    // Rows are L2-normalized, so cosine distance = 1 - dot. All-zero rows get
    // distance 1 to everything.
    auto cosine_distance = [&](int i, int j) {
        double dot = 0.0;
        const std::vector<double>& a = matrix.rows[static_cast<std::size_t>(i)];
        const std::vector<double>& b = matrix.rows[static_cast<std::size_t>(j)];
        for (std::size_t c = 0; c < a.size(); ++c) dot += a[c] * b[c];
        return 1.0 - dot;
    };

    struct Active {
        int id;             // cluster id in the linkage numbering
        long size;
        std::vector<int> members;  // row indices
    };
    std::vector<Active> active(static_cast<std::size_t>(n));
    // dist[i][j] between active slots; slots die when merged (swap-erase)
    std::vector<std::vector<double>> dist(static_cast<std::size_t>(n),
                                          std::vector<double>(static_cast<std::size_t>(n), 0.0));
    for (int i = 0; i < n; ++i) {
        active[static_cast<std::size_t>(i)] = Active{i, 1, {i}};
        for (int j = i + 1; j < n; ++j) {
            double d = cosine_distance(i, j);
            dist[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = d;
            dist[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = d;
        }
    }

    ClusterAssignment result;
    result.n_clusters = n_clusters;
    int next_id = n;
    int n_active = n;

    while (n_active > n_clusters) {
        // global minimum, tie-broken by smallest (id_lo, id_hi)
        int best_i = -1, best_j = -1;
        double best = std::numeric_limits<double>::infinity();
        for (int i = 0; i < n_active; ++i) {
            for (int j = i + 1; j < n_active; ++j) {
                double d = dist[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
                int lo = std::min(active[static_cast<std::size_t>(i)].id, active[static_cast<std::size_t>(j)].id);
                int hi = std::max(active[static_cast<std::size_t>(i)].id, active[static_cast<std::size_t>(j)].id);
                if (d < best) {
                    best = d;
                    best_i = i;
                    best_j = j;
                } else if (d == best && best_i >= 0) {
                    int cur_lo = std::min(active[static_cast<std::size_t>(best_i)].id,
                                          active[static_cast<std::size_t>(best_j)].id);
                    int cur_hi = std::max(active[static_cast<std::size_t>(best_i)].id,
                                          active[static_cast<std::size_t>(best_j)].id);
                    if (lo < cur_lo || (lo == cur_lo && hi < cur_hi)) {
                        best_i = i;
                        best_j = j;
                    }
                }
            }
        }

        Active& ci = active[static_cast<std::size_t>(best_i)];
        Active& cj = active[static_cast<std::size_t>(best_j)];
        result.linkage_trace.push_back({std::min(ci.id, cj.id), std::max(ci.id, cj.id), best});

        // Lance-Williams update for average linkage:
        // d(k, i∪j) = (|i| d(k,i) + |j| d(k,j)) / (|i| + |j|)
        double wi = static_cast<double>(ci.size), wj = static_cast<double>(cj.size);
        for (int k = 0; k < n_active; ++k) {
            if (k == best_i || k == best_j) continue;
            double d = (wi * dist[static_cast<std::size_t>(k)][static_cast<std::size_t>(best_i)] +
                        wj * dist[static_cast<std::size_t>(k)][static_cast<std::size_t>(best_j)]) /
                       (wi + wj);
            dist[static_cast<std::size_t>(k)][static_cast<std::size_t>(best_i)] = d;
            dist[static_cast<std::size_t>(best_i)][static_cast<std::size_t>(k)] = d;
        }
        ci.id = next_id++;
        ci.size += cj.size;
        ci.members.insert(ci.members.end(), cj.members.begin(), cj.members.end());

        // swap-erase slot best_j
        int last = n_active - 1;
        if (best_j != last) {
            std::swap(active[static_cast<std::size_t>(best_j)], active[static_cast<std::size_t>(last)]);
            for (int k = 0; k < n_active; ++k) {
                dist[static_cast<std::size_t>(k)][static_cast<std::size_t>(best_j)] =
                    dist[static_cast<std::size_t>(k)][static_cast<std::size_t>(last)];
                dist[static_cast<std::size_t>(best_j)][static_cast<std::size_t>(k)] =
                    dist[static_cast<std::size_t>(last)][static_cast<std::size_t>(k)];
            }
        }
        --n_active;
    }

    // label clusters by smallest member row index
    std::vector<const Active*> finals;
    for (int i = 0; i < n_active; ++i) finals.push_back(&active[static_cast<std::size_t>(i)]);
    std::sort(finals.begin(), finals.end(), [](const Active* a, const Active* b) {
        return *std::min_element(a->members.begin(), a->members.end()) <
               *std::min_element(b->members.begin(), b->members.end());
    });
    for (std::size_t c = 0; c < finals.size(); ++c)
        for (int row : finals[c]->members)
            result.labels[matrix.doc_ids[static_cast<std::size_t>(row)]] = static_cast<int>(c);
    return result;
}

/// cluster index -> member row indices (ascending), derived from labels.
inline std::vector<std::vector<int>> cluster_members(const ClusterAssignment& assignment,
                                                     const DocTermMatrix& matrix) {
    std::vector<std::vector<int>> members(static_cast<std::size_t>(assignment.n_clusters));
    for (std::size_t row = 0; row < matrix.doc_ids.size(); ++row) {
        int label = assignment.labels.at(matrix.doc_ids[row]);
        members[static_cast<std::size_t>(label)].push_back(static_cast<int>(row));
    }
    return members;
}

}  // namespace leakforge
