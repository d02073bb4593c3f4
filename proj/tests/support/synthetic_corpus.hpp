#pragma once

// Seeded synthetic corpus generator for tests and the acceptance suite.
//
// Documents are drawn from a topic-mixture language model whose base word
// weights follow a Zipf law: weight(rank r) = 1 / r^exponent. The top
// n_background ranks form a shared background vocabulary emitted by every
// document; the remaining words are assigned to one of n_topics topics
// uniformly at random. A document picks one topic, then samples tokens from
// the background (with probability background_share) or from its topic's
// Zipf-restricted conditional distribution. The realized corpus-wide
// rank-frequency profile stays Zipf-shaped while documents carry the topical
// structure that hierarchical clustering is meant to exploit.
//
// Vocabulary words are generated as random CV-syllable strings filtered to be
// Porter-stable non-stopwords, so the keyword pipeline maps each word to
// itself and the effective stem vocabulary size is exactly vocab_size.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <string>
#include <vector>

#include "leakforge/corpus.hpp"
#include "leakforge/porter.hpp"
#include "leakforge/rng.hpp"
#include "leakforge/stopwords.hpp"

namespace leakforge::testsupport {

struct ZipfCorpusParams {
    long n_docs = 2000;
    int vocab_size = 500;
    double exponent = 1.0;
    int n_background = 30;
    int n_topics = 66;
    double background_share = 0.2;
    int min_len = 15;
    int max_len = 30;
    std::uint64_t seed = 42;
};

inline std::vector<std::string> make_stem_vocabulary(int vocab_size, std::uint64_t seed) {
    static const std::string consonants = "bcdfgklmnprstvz";
    static const std::string vowels = "aeiou";
    RngStream stream(derive_seed(seed, "vocab"));
    const StopwordList& stop = bundled_stopwords();

    std::vector<std::string> words;
    std::set<std::string> seen;
    while (static_cast<int>(words.size()) < vocab_size) {
        int syllables = 2 + static_cast<int>(stream.below(2));  // 4 or 6 letters
        std::string w;
        for (int s = 0; s < syllables; ++s) {
            w += consonants[static_cast<std::size_t>(stream.below(consonants.size()))];
            w += vowels[static_cast<std::size_t>(stream.below(vowels.size()))];
        }
        if (stop.contains(w) || seen.count(w)) continue;
        if (porter_stem(w) != w) continue;  // keep the pipeline an identity map
        seen.insert(w);
        words.push_back(std::move(w));
    }
    return words;
}

class ZipfSampler {
public:
    ZipfSampler(const std::vector<int>& ranks, double exponent) {
        cumulative_.reserve(ranks.size());
        double acc = 0.0;
        for (int r : ranks) {
            acc += 1.0 / std::pow(static_cast<double>(r + 1), exponent);
            cumulative_.push_back(acc);
        }
        total_ = acc;
        ranks_ = ranks;
    }

    int draw(RngStream& stream) const {
        double u = stream.next_double() * total_;
        std::size_t lo = 0, hi = cumulative_.size() - 1;
        while (lo < hi) {
            std::size_t mid = (lo + hi) / 2;
            if (cumulative_[mid] < u)
                lo = mid + 1;
            else
                hi = mid;
        }
        return ranks_[lo];
    }

private:
    std::vector<double> cumulative_;
    std::vector<int> ranks_;
    double total_ = 0.0;
};

inline std::vector<Document> make_zipf_corpus(const ZipfCorpusParams& params) {
    std::vector<std::string> vocab = make_stem_vocabulary(params.vocab_size, params.seed);

    // background = top ranks; remaining words assigned to topics at random
    std::vector<int> background_ranks;
    for (int r = 0; r < params.n_background; ++r) background_ranks.push_back(r);
    std::vector<std::vector<int>> topic_ranks(static_cast<std::size_t>(params.n_topics));
    RngStream assign(derive_seed(params.seed, "topics"));
    for (int r = params.n_background; r < params.vocab_size; ++r)
        topic_ranks[static_cast<std::size_t>(assign.below(static_cast<std::uint64_t>(params.n_topics)))]
            .push_back(r);
    for (auto& ranks : topic_ranks) {  // keep every topic non-empty
        if (ranks.empty()) {
            auto largest = std::max_element(
                topic_ranks.begin(), topic_ranks.end(),
                [](const auto& a, const auto& b) { return a.size() < b.size(); });
            ranks.push_back(largest->back());
            largest->pop_back();
        }
    }

    ZipfSampler background(background_ranks, params.exponent);
    std::vector<ZipfSampler> topics;
    topics.reserve(topic_ranks.size());
    for (const auto& ranks : topic_ranks) topics.emplace_back(ranks, params.exponent);

    RngStream stream(derive_seed(params.seed, "docs"));
    std::vector<Document> docs;
    docs.reserve(static_cast<std::size_t>(params.n_docs));
    char idbuf[32];
    for (long i = 0; i < params.n_docs; ++i) {
        int topic = static_cast<int>(stream.below(static_cast<std::uint64_t>(params.n_topics)));
        int length = params.min_len +
                     static_cast<int>(stream.below(
                         static_cast<std::uint64_t>(params.max_len - params.min_len + 1)));
        std::string body;
        for (int t = 0; t < length; ++t) {
            bool from_background = stream.next_double() < params.background_share;
            int rank = from_background ? background.draw(stream)
                                       : topics[static_cast<std::size_t>(topic)].draw(stream);
            if (t) body += ' ';
            body += vocab[static_cast<std::size_t>(rank)];
        }
        std::snprintf(idbuf, sizeof(idbuf), "synth/%05ld", i);
        docs.push_back(Document{idbuf, std::move(body), Origin::real});
    }
    return docs;
}

}  // namespace leakforge::testsupport
