#pragma once

#include <algorithm>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "leakforge/common.hpp"
#include "leakforge/io.hpp"

namespace leakforge {

enum class Origin { real, synthetic };

inline const char* origin_name(Origin o) { return o == Origin::real ? "real" : "synthetic"; }

struct Document {
    std::string doc_id;
    std::string body;
    Origin origin = Origin::real;
};

struct RawEmail {
    std::filesystem::path source_path;
    std::string rel_path;   // relative to the ingest root, '/' separators
    std::string raw_bytes;  // filled by the reader step, not by discovery
};

struct IngestManifest {
    std::string source_root;
    std::string folder_filter;
    long n_discovered = 0;
    long n_skipped = 0;
    long n_deduped = 0;
    long n_documents = 0;
    std::vector<std::string> skipped_paths;
    std::vector<std::string> no_header_ids;

    json to_json() const {
        json j;
        j["source_root"] = source_root;
        j["folder_filter"] = folder_filter;
        j["n_discovered"] = n_discovered;
        j["n_skipped"] = n_skipped;
        j["n_deduped"] = n_deduped;
        j["n_documents"] = n_documents;
        j["skipped_paths"] = skipped_paths;
        j["no_header_ids"] = no_header_ids;
        return j;
    }
};

struct Corpus {
    std::vector<Document> documents;  // sorted by doc_id
    IngestManifest ingest_manifest;
};

/// fnmatch-style matching with '*' (any run, crossing '/') and '?'.
inline bool glob_match(std::string_view pattern, std::string_view text) {
    std::size_t p = 0, t = 0;
    std::size_t star = std::string_view::npos, mark = 0;
    while (t < text.size()) {
        if (p < pattern.size() && (pattern[p] == '?' || pattern[p] == text[t])) {
            ++p;
            ++t;
        } else if (p < pattern.size() && pattern[p] == '*') {
            star = p++;
            mark = t;
        } else if (star != std::string_view::npos) {
            p = star + 1;
            t = ++mark;
        } else {
            return false;
        }
    }
    while (p < pattern.size() && pattern[p] == '*') ++p;
    return p == pattern.size();
}

inline constexpr const char* kDefaultFolderFilter = "*/_sent_items/*";

/// Every regular file under root whose root-relative path matches the filter,
/// sorted lexicographically by that path. Never reads file contents.
inline std::vector<RawEmail> discover_emails(const std::filesystem::path& root,
                                             std::string_view folder_filter = kDefaultFolderFilter) {
    namespace fs = std::filesystem;
    if (!fs::exists(root) || !fs::is_directory(root))
        throw config_error("ingest root does not exist or is not a directory: " + root.string());
    std::vector<RawEmail> found;
    for (const auto& entry : fs::recursive_directory_iterator(root)) {
        if (!entry.is_regular_file()) continue;
        std::string rel = fs::relative(entry.path(), root).generic_string();
        if (!glob_match(folder_filter, rel)) continue;
        found.push_back(RawEmail{entry.path(), rel, {}});
    }
    std::sort(found.begin(), found.end(),
              [](const RawEmail& a, const RawEmail& b) { return a.rel_path < b.rel_path; });
    return found;
}

/// Replace invalid UTF-8 sequences with U+FFFD so downstream text handling
/// never sees malformed bytes.
inline std::string lossy_utf8(std::string_view in) {
    static const std::string replacement = "\xEF\xBF\xBD";
    std::string out;
    out.reserve(in.size());
    std::size_t i = 0;
    while (i < in.size()) {
        unsigned char c = static_cast<unsigned char>(in[i]);
        std::size_t len = 0;
        if (c < 0x80) len = 1;
        else if ((c & 0xE0) == 0xC0 && c >= 0xC2) len = 2;
        else if ((c & 0xF0) == 0xE0) len = 3;
        else if ((c & 0xF8) == 0xF0 && c <= 0xF4) len = 4;
        if (len == 0 || i + len > in.size()) {
            out += replacement;
            ++i;
            continue;
        }
        bool ok = true;
        for (std::size_t j = 1; j < len; ++j)
            if ((static_cast<unsigned char>(in[i + j]) & 0xC0) != 0x80) ok = false;
        if (!ok) {
            out += replacement;
            ++i;
            continue;
        }
        out.append(in.substr(i, len));
        i += len;
    }
    return out;
}

namespace detail {

inline std::vector<std::string> split_lines(std::string_view text) {
    std::vector<std::string> lines;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t nl = text.find('\n', pos);
        if (nl == std::string_view::npos) {
            lines.emplace_back(text.substr(pos));
            break;
        }
        std::string line(text.substr(pos, nl - pos));
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(std::move(line));
        pos = nl + 1;
    }
    return lines;
}

inline bool is_header_line(std::string_view line) {
    std::size_t i = 0;
    while (i < line.size() && ((line[i] >= 'A' && line[i] <= 'Z') ||
                               (line[i] >= 'a' && line[i] <= 'z') || line[i] == '-'))
        ++i;
    return i > 0 && i < line.size() && line[i] == ':';
}

inline bool is_quoted_block_marker(std::string_view line) {
    return line.find("-----Original Message-----") != std::string_view::npos ||
           line.find("---------------------- Forwarded") != std::string_view::npos;
}

inline std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

}  // namespace detail

struct SanitizeResult {
    Document doc;
    bool no_header = false;     // first line did not look like a header
    bool no_separator = false;  // header block present but never terminated
};

/// Strip the leading RFC-822-style header block (everything through the first
/// blank line, applied only when the first line looks like a header), then
/// drop embedded quoted-reply / forwarding header blocks: from a line carrying
/// "-----Original Message-----" or "---------------------- Forwarded" through
/// that block's own first blank line. The quoted body text after the embedded
/// block is kept.
inline SanitizeResult sanitize_email(const RawEmail& raw) {
    std::string text = lossy_utf8(raw.raw_bytes);
    std::vector<std::string> lines = detail::split_lines(text);

    SanitizeResult result;
    std::size_t body_start = 0;
    if (lines.empty() || !detail::is_header_line(lines[0])) {
        result.no_header = true;
    } else {
        result.no_separator = true;
        for (std::size_t i = 0; i < lines.size(); ++i) {
            if (detail::trim(lines[i]).empty()) {
                body_start = i + 1;
                result.no_separator = false;
                break;
            }
        }
        if (result.no_separator) body_start = 0;  // no blank line: keep everything
    }

    std::string body;
    bool skipping = false;
    for (std::size_t i = body_start; i < lines.size(); ++i) {
        const std::string& line = lines[i];
        if (skipping) {
            if (detail::trim(line).empty()) skipping = false;
            continue;
        }
        if (detail::is_quoted_block_marker(line)) {
            skipping = true;
            continue;
        }
        body += line;
        body += '\n';
    }

    result.doc.doc_id = raw.rel_path.empty() ? raw.source_path.generic_string() : raw.rel_path;
    result.doc.body = detail::trim(body);
    result.doc.origin = Origin::real;
    return result;
}

inline Document sanitize(const RawEmail& raw) { return sanitize_email(raw).doc; }

/// Deduplicate exact-identical bodies (keeping the first by doc_id), then
/// sort by doc_id. Duplicate doc_ids are a fatal inconsistency.
inline Corpus build_corpus(std::vector<Document> docs) {
    std::sort(docs.begin(), docs.end(),
              [](const Document& a, const Document& b) { return a.doc_id < b.doc_id; });
    for (std::size_t i = 1; i < docs.size(); ++i)
        if (docs[i].doc_id == docs[i - 1].doc_id)
            throw data_error("duplicate doc_id: " + docs[i].doc_id);

    Corpus corpus;
    std::map<std::string, const Document*> seen_bodies;
    long deduped = 0;
    for (Document& d : docs) {
        auto [it, inserted] = seen_bodies.emplace(d.body, &d);
        if (!inserted) {
            ++deduped;
            continue;
        }
        corpus.documents.push_back(std::move(d));
    }
    corpus.ingest_manifest.n_deduped = deduped;
    corpus.ingest_manifest.n_documents = static_cast<long>(corpus.documents.size());
    return corpus;
}

/// Full ingestion: discover, read (unreadable files become recorded skips),
/// sanitize, build. The result is independent of filesystem enumeration order.
inline Corpus ingest_corpus(const std::filesystem::path& root,
                            std::string_view folder_filter = kDefaultFolderFilter) {
    std::vector<RawEmail> raws = discover_emails(root, folder_filter);
    IngestManifest manifest;
    manifest.source_root = root.generic_string();
    manifest.folder_filter = std::string(folder_filter);
    manifest.n_discovered = static_cast<long>(raws.size());

    std::vector<Document> docs;
    docs.reserve(raws.size());
    for (RawEmail& raw : raws) {
        try {
            raw.raw_bytes = read_text_file(raw.source_path);
        } catch (const data_error&) {
            ++manifest.n_skipped;
            manifest.skipped_paths.push_back(raw.rel_path);
            continue;
        }
        SanitizeResult res = sanitize_email(raw);
        if (res.no_header || res.no_separator) manifest.no_header_ids.push_back(res.doc.doc_id);
        docs.push_back(std::move(res.doc));
    }

    Corpus corpus = build_corpus(std::move(docs));
    manifest.n_deduped = corpus.ingest_manifest.n_deduped;
    manifest.n_documents = corpus.ingest_manifest.n_documents;
    corpus.ingest_manifest = std::move(manifest);
    return corpus;
}

inline void write_corpus_file(const std::filesystem::path& path, const std::vector<Document>& docs) {
    std::string out;
    for (const Document& d : docs) {
        json rec;
        rec["doc_id"] = d.doc_id;
        rec["body"] = d.body;
        rec["origin"] = origin_name(d.origin);
        out += rec.dump();
        out += '\n';
    }
    atomic_write_text(path, out);
}

inline std::vector<Document> read_corpus_file(const std::filesystem::path& path) {
    std::vector<Document> docs;
    for_each_line(read_text_file(path), [&](std::string_view line) {
        json rec = json::parse(line);
        Document d;
        d.doc_id = rec.at("doc_id").get<std::string>();
        d.body = rec.at("body").get<std::string>();
        d.origin = rec.value("origin", "real") == std::string("synthetic") ? Origin::synthetic : Origin::real;
        docs.push_back(std::move(d));
    });
    return docs;
}

}  // namespace leakforge
