#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "leakforge/common.hpp"
#include "leakforge/io.hpp"
#include "leakforge/keywords.hpp"

namespace leakforge {

/// The volume-leakage observable: for each keyword stem, how many documents
/// of the collection contain it. This is all the simulated server reveals.
struct VolumeProfile {
    std::map<std::string, long> counts;
    long n_docs = 0;
};

inline VolumeProfile volume_profile(const std::vector<KeywordDoc>& docs) {
    VolumeProfile profile;
    profile.n_docs = static_cast<long>(docs.size());
    for (const KeywordDoc& d : docs)
        for (const std::string& s : d.stems) ++profile.counts[s];
    return profile;
}

/// (stem, count) sorted by count descending, ties broken lexicographically
/// ascending so runs are byte-reproducible.
using RankedVocabulary = std::vector<std::pair<std::string, long>>;

inline RankedVocabulary rank_vocabulary(const VolumeProfile& profile) {
    RankedVocabulary ranked(profile.counts.begin(), profile.counts.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    return ranked;
}

/// |a ∩ b| / |a ∪ b|, with J(∅,∅) defined as 1 (identical sets).
inline double jaccard(const std::set<std::string>& a, const std::set<std::string>& b) {
    if (a.empty() && b.empty()) return 1.0;
    std::size_t common = 0;
    for (const std::string& x : a) common += b.count(x);
    std::size_t uni = a.size() + b.size() - common;
    return static_cast<double>(common) / static_cast<double>(uni);
}

struct RecoveryResult {
    std::vector<std::pair<long, std::string>> matching;  // client rank (1-based) -> attacker stem
    double jaccard_at_k = 0.0;
    long k = 0;
    double accuracy = 0.0;        // diagnostic: fraction of rank-aligned exact hits
    bool empty_profile = false;   // warning flag: one of the profiles had no keywords
};

/// Volume-rank matching: the i-th most frequent attacker stem is guessed for
/// the i-th most frequent client stem. Scored as Jaccard over the two top-k
/// stem sets; rank-accuracy is reported as a diagnostic only.
inline RecoveryResult rank_match_attack(const VolumeProfile& client_profile,
                                        const VolumeProfile& attacker_profile, long k) {
    if (k < 1) throw config_error("rank_match_attack requires k >= 1");
    RecoveryResult result;
    result.k = k;
    if (client_profile.counts.empty() || attacker_profile.counts.empty()) {
        result.empty_profile = true;
        return result;
    }
    RankedVocabulary client = rank_vocabulary(client_profile);
    RankedVocabulary attacker = rank_vocabulary(attacker_profile);

    std::set<std::string> top_client, top_attacker;
    for (std::size_t i = 0; i < client.size() && i < static_cast<std::size_t>(k); ++i)
        top_client.insert(client[i].first);
    for (std::size_t i = 0; i < attacker.size() && i < static_cast<std::size_t>(k); ++i)
        top_attacker.insert(attacker[i].first);

    std::size_t n_ranks = std::min({client.size(), attacker.size(), static_cast<std::size_t>(k)});
    std::size_t hits = 0;
    for (std::size_t i = 0; i < n_ranks; ++i) {
        result.matching.emplace_back(static_cast<long>(i) + 1, attacker[i].first);
        if (attacker[i].first == client[i].first) ++hits;
    }
    result.jaccard_at_k = jaccard(top_client, top_attacker);
    result.accuracy = n_ranks == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(n_ranks);
    return result;
}

struct ZipfRow {
    long rank = 0;
    std::string stem;
    long client_count = 0;
    double client_relfreq = 0.0;
    long attacker_count = 0;
    double attacker_relfreq = 0.0;
};

/// Fig.-1-style overlay: client ranking with the attacker's count for the
/// same stem in the same position.
inline std::vector<ZipfRow> export_zipf_overlay(const VolumeProfile& client,
                                                const VolumeProfile& attacker, long top_n) {
    if (top_n < 1) throw config_error("zipf overlay requires top_n >= 1");
    RankedVocabulary ranked = rank_vocabulary(client);
    std::vector<ZipfRow> rows;
    for (std::size_t i = 0; i < ranked.size() && i < static_cast<std::size_t>(top_n); ++i) {
        ZipfRow row;
        row.rank = static_cast<long>(i) + 1;
        row.stem = ranked[i].first;
        row.client_count = ranked[i].second;
        row.client_relfreq = client.n_docs > 0
                                 ? static_cast<double>(row.client_count) / static_cast<double>(client.n_docs)
                                 : 0.0;
        auto it = attacker.counts.find(row.stem);
        row.attacker_count = it == attacker.counts.end() ? 0 : it->second;
        row.attacker_relfreq = attacker.n_docs > 0 ? static_cast<double>(row.attacker_count) /
                                                         static_cast<double>(attacker.n_docs)
                                                   : 0.0;
        rows.push_back(std::move(row));
    }
    return rows;
}

inline std::string zipf_rows_to_csv(const std::vector<ZipfRow>& rows) {
    std::string out = "rank,stem,client_count,client_relfreq,attacker_count,attacker_relfreq\n";
    char buf[64];
    for (const ZipfRow& r : rows) {
        out += std::to_string(r.rank) + "," + r.stem + "," + std::to_string(r.client_count) + ",";
        std::snprintf(buf, sizeof(buf), "%.10g", r.client_relfreq);
        out += buf;
        out += "," + std::to_string(r.attacker_count) + ",";
        std::snprintf(buf, sizeof(buf), "%.10g", r.attacker_relfreq);
        out += buf;
        out += '\n';
    }
    return out;
}

inline json recovery_to_json(const RecoveryResult& r) {
    json j;
    j["k"] = r.k;
    j["jaccard_at_k"] = json_real(r.jaccard_at_k);
    j["accuracy"] = json_real(r.accuracy);
    j["empty_profile"] = r.empty_profile;
    json m = json::array();
    for (const auto& [rank, stem] : r.matching) m.push_back(json{{"rank", rank}, {"stem", stem}});
    j["matching"] = m;
    return j;
}

}  // namespace leakforge
