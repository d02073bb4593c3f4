#pragma once

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "leakforge/corpus.hpp"
#include "leakforge/io.hpp"
#include "leakforge/porter.hpp"
#include "leakforge/stopwords.hpp"

namespace leakforge {

/// A document reduced to its set of keyword stems: the unit every attack
/// and profile operation works on.
struct KeywordDoc {
    std::string doc_id;
    std::set<std::string> stems;
};

/// Split on maximal whitespace runs. Punctuation stays attached; words that
/// carry it are dropped later by the alphabetic filter.
inline std::vector<std::string> tokenize(std::string_view body) {
    std::vector<std::string> words;
    std::size_t i = 0;
    while (i < body.size()) {
        while (i < body.size() && std::isspace(static_cast<unsigned char>(body[i]))) ++i;
        std::size_t start = i;
        while (i < body.size() && !std::isspace(static_cast<unsigned char>(body[i]))) ++i;
        if (i > start) words.emplace_back(body.substr(start, i - start));
    }
    return words;
}

/// Pipeline steps 2-5: lowercase, keep ^[a-z]+$ only, drop stopwords,
/// keep source length in [3, 20]. Order preserved.
inline std::vector<std::string> filter_and_normalize(const std::vector<std::string>& words,
                                                     const StopwordList& stopwords) {
    std::vector<std::string> out;
    out.reserve(words.size());
    for (const std::string& w : words) {
        std::string lower;
        lower.reserve(w.size());
        bool alpha = true;
        for (char c : w) {
            unsigned char uc = static_cast<unsigned char>(c);
            char lc = static_cast<char>(std::tolower(uc));
            if (lc < 'a' || lc > 'z') {
                alpha = false;
                break;
            }
            lower.push_back(lc);
        }
        if (!alpha || lower.empty()) continue;
        if (stopwords.contains(lower)) continue;
        if (lower.size() < 3 || lower.size() > 20) continue;
        out.push_back(std::move(lower));
    }
    return out;
}

inline KeywordDoc to_keyword_doc(const Document& doc, const StopwordList& stopwords) {
    KeywordDoc kd;
    kd.doc_id = doc.doc_id;
    for (const std::string& w : filter_and_normalize(tokenize(doc.body), stopwords))
        kd.stems.insert(porter_stem(w));
    return kd;
}

inline void write_keyword_file(const std::filesystem::path& path, const std::vector<KeywordDoc>& docs) {
    std::string out;
    for (const KeywordDoc& kd : docs) {
        json rec;
        rec["doc_id"] = kd.doc_id;
        rec["stems"] = json::array();
        for (const std::string& s : kd.stems) rec["stems"].push_back(s);  // std::set: already sorted
        out += rec.dump();
        out += '\n';
    }
    atomic_write_text(path, out);
}

inline std::vector<KeywordDoc> read_keyword_file(const std::filesystem::path& path) {
    std::vector<KeywordDoc> docs;
    for_each_line(read_text_file(path), [&](std::string_view line) {
        json rec = json::parse(line);
        KeywordDoc kd;
        kd.doc_id = rec.at("doc_id").get<std::string>();
        for (const auto& s : rec.at("stems")) kd.stems.insert(s.get<std::string>());
        docs.push_back(std::move(kd));
    });
    return docs;
}

}  // namespace leakforge
