#pragma once

#include <optional>
#include <string>
#include <vector>

#include "leakforge/common.hpp"
#include "leakforge/corpus.hpp"

namespace leakforge {

struct PromptBatch {
    std::string prompt_text;
    std::vector<std::string> example_doc_ids;
    std::vector<std::string> example_bodies;
    int requested_count = 0;
    std::optional<int> cluster_index;
    int batch_index = 0;
};

/// Fill the generation prompt template: the requested count goes into the
/// header line and each example body is embedded verbatim on its own
/// numbered line. More than three examples extend the numbered list.
inline PromptBatch build_prompt(const std::vector<Document>& examples, int count) {
    if (examples.empty()) throw config_error("build_prompt requires at least one example");
    if (count < 1) throw config_error("build_prompt requires count >= 1");

    PromptBatch batch;
    batch.requested_count = count;
    std::string text =
        "Generate " + std::to_string(count) + " new texts similar to the following examples:\n";
    for (std::size_t i = 0; i < examples.size(); ++i) {
        text += "Example " + std::to_string(i + 1) + ": " + examples[i].body + "\n";
        batch.example_doc_ids.push_back(examples[i].doc_id);
        batch.example_bodies.push_back(examples[i].body);
    }
    text +=
        "Return only the response as a separate entry and put exactly '###' between them so I can "
        "parse them.\n"
        "Do not generate any extra messages.";
    batch.prompt_text = std::move(text);
    return batch;
}

struct ParsedGeneration {
    std::vector<Document> docs;  // origin = synthetic, ids syn/<batch>/<index>
    int shortfall = 0;
    bool failed = false;  // zero parseable segments
};

/// Split a raw model response on '###', trimming each segment and dropping
/// empties. Fewer segments than expected is a recorded shortfall; extra
/// segments are truncated.
inline ParsedGeneration parse_generation(const std::string& raw_response, int expected,
                                         int batch_index) {
    ParsedGeneration out;
    std::vector<std::string> segments;
    std::size_t pos = 0;
    while (pos <= raw_response.size()) {
        std::size_t sep = raw_response.find("###", pos);
        std::size_t end = sep == std::string::npos ? raw_response.size() : sep;
        std::string segment = detail::trim(std::string_view(raw_response).substr(pos, end - pos));
        if (!segment.empty()) segments.push_back(std::move(segment));
        if (sep == std::string::npos) break;
        pos = sep + 3;
    }
    if (segments.size() > static_cast<std::size_t>(expected) && expected >= 0)
        segments.resize(static_cast<std::size_t>(expected));

    for (std::size_t i = 0; i < segments.size(); ++i) {
        Document d;
        d.doc_id = "syn/" + std::to_string(batch_index) + "/" + std::to_string(i);
        d.body = std::move(segments[i]);
        d.origin = Origin::synthetic;
        out.docs.push_back(std::move(d));
    }
    out.shortfall = expected - static_cast<int>(out.docs.size());
    if (out.shortfall < 0) out.shortfall = 0;
    out.failed = out.docs.empty();
    return out;
}

}  // namespace leakforge
