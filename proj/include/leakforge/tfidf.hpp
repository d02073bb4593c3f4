#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "leakforge/common.hpp"
#include "leakforge/keywords.hpp"

namespace leakforge {

struct DocTermMatrix {
    std::vector<std::string> doc_ids;
    std::vector<std::string> vocab;
    std::vector<std::vector<double>> rows;  // L2-normalized
};

/// TF-IDF document-term matrix over stem sets. Vocabulary is truncated to the
/// vocab_cap most document-frequent stems (ties lexicographic); since inputs
/// are stem sets, tf is binary and a present stem's weight is its idf,
/// idf = ln(N / df) + 1. Rows are L2-normalized.
inline DocTermMatrix vectorize(const std::vector<KeywordDoc>& docs, std::size_t vocab_cap = 3000) {
    if (docs.empty()) throw config_error("vectorize requires at least one document");

    std::map<std::string, long> df;
    for (const KeywordDoc& d : docs)
        for (const std::string& s : d.stems) ++df[s];
    if (df.empty()) throw config_error("vectorize: all documents have empty stem sets");

    std::vector<std::pair<std::string, long>> by_df(df.begin(), df.end());
    std::sort(by_df.begin(), by_df.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    if (by_df.size() > vocab_cap) by_df.resize(vocab_cap);

    DocTermMatrix matrix;
    std::map<std::string, std::size_t> col;
    std::vector<double> idf(by_df.size());
    const double n = static_cast<double>(docs.size());
    matrix.vocab.reserve(by_df.size());
    for (std::size_t j = 0; j < by_df.size(); ++j) {
        matrix.vocab.push_back(by_df[j].first);
        col[by_df[j].first] = j;
        idf[j] = std::log(n / static_cast<double>(by_df[j].second)) + 1.0;
    }

    matrix.doc_ids.reserve(docs.size());
    matrix.rows.reserve(docs.size());
    for (const KeywordDoc& d : docs) {
        std::vector<double> row(matrix.vocab.size(), 0.0);
        double norm2 = 0.0;
        for (const std::string& s : d.stems) {
            auto it = col.find(s);
            if (it == col.end()) continue;
            row[it->second] = idf[it->second];
            norm2 += idf[it->second] * idf[it->second];
        }
        if (norm2 > 0.0) {
            double inv = 1.0 / std::sqrt(norm2);
            for (double& v : row) v *= inv;
        }
        matrix.doc_ids.push_back(d.doc_id);
        matrix.rows.push_back(std::move(row));
    }
    return matrix;
}

}  // namespace leakforge
