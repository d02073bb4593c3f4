#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "leakforge/cluster.hpp"
#include "leakforge/common.hpp"
#include "leakforge/corpus.hpp"
#include "leakforge/generator.hpp"
#include "leakforge/keywords.hpp"
#include "leakforge/prompt.hpp"
#include "leakforge/rng.hpp"
#include "leakforge/stopwords.hpp"
#include "leakforge/tfidf.hpp"

namespace leakforge {

enum class Strategy { none, random, clustered };

inline const char* strategy_name(Strategy s) {
    switch (s) {
        case Strategy::none: return "none";
        case Strategy::random: return "random";
        case Strategy::clustered: return "clustered";
    }
    return "?";
}

inline Strategy strategy_from_name(const std::string& name) {
    if (name == "none") return Strategy::none;
    if (name == "random") return Strategy::random;
    if (name == "clustered") return Strategy::clustered;
    throw config_error("unknown strategy: " + name);
}

struct AugmentationPlan {
    Strategy strategy = Strategy::none;
    int target_synthetic_count = 0;
    int examples_per_prompt = 3;     // 3..5
    int generations_per_prompt = 8;  // 5..10
    std::uint64_t rng_seed = 0;
    std::size_t vocab_cap = 3000;    // TF-IDF vocabulary cap for clustering
    int max_retries = 3;             // attempts per failed batch
};

inline void validate_plan(const AugmentationPlan& plan) {
    if (plan.strategy == Strategy::none) {
        if (plan.target_synthetic_count != 0)
            throw config_error("strategy none implies target_synthetic_count = 0");
        return;
    }
    if (plan.target_synthetic_count < 0) throw config_error("target_synthetic_count must be >= 0");
    if (plan.examples_per_prompt < 3 || plan.examples_per_prompt > 5)
        throw config_error("examples_per_prompt must be in [3, 5]");
    if (plan.generations_per_prompt < 5 || plan.generations_per_prompt > 10)
        throw config_error("generations_per_prompt must be in [5, 10]");
    if (plan.max_retries < 1) throw config_error("max_retries must be >= 1");
}

/// Number of prompt clusters: enough prompts at generations_per_prompt to
/// reach the target, clamped so every cluster can still supply
/// examples_per_prompt seed documents. When the clamp bites, the per-prompt
/// generation count is raised instead (recorded in the augmentation result).
inline int plan_clusters(int n_seed, const AugmentationPlan& plan) {
    if (plan.target_synthetic_count == 0) return 0;
    if (n_seed < plan.examples_per_prompt)
        throw config_error("need at least examples_per_prompt (" +
                           std::to_string(plan.examples_per_prompt) + ") seed docs, have " +
                           std::to_string(n_seed));
    int ideal = (plan.target_synthetic_count + plan.generations_per_prompt - 1) /
                plan.generations_per_prompt;
    int cap = n_seed / plan.examples_per_prompt;
    return std::clamp(ideal, 1, cap);
}

struct BatchManifest {
    int batch_index = 0;
    std::optional<int> cluster_index;
    std::vector<std::string> example_doc_ids;
    int requested = 0;
    int parsed = 0;
    int shortfall = 0;
    int retries = 0;
    bool failed = false;
};

struct AugmentResult {
    std::vector<Document> docs;  // seeds (sorted by doc_id) then synthetics in batch order
    std::vector<BatchManifest> batches;
    long n_synthetic = 0;
    bool aborted = false;
    int n_clusters = 0;
    int effective_generations_per_prompt = 0;
};

namespace detail {

struct BatchOutcome {
    ParsedGeneration parsed;
    int retries = 0;
    bool failed = false;
};

inline BatchOutcome run_batch(TextGenerator& generator, const PromptBatch& batch,
                              int max_retries) {
    BatchOutcome outcome;
    for (int attempt = 0; attempt < max_retries; ++attempt) {
        outcome.retries = attempt;
        try {
            GenerationRecord record = generator.complete(batch);
            outcome.parsed = parse_generation(record.raw_response, batch.requested_count,
                                              batch.batch_index);
            if (!outcome.parsed.failed) return outcome;
        } catch (const generation_error& e) {
            if (!e.retryable) {
                std::fprintf(stderr, "leakforge: batch %d failed (non-retryable): %s\n",
                             batch.batch_index, e.what());
                break;
            }
            std::fprintf(stderr, "leakforge: batch %d attempt %d failed: %s\n", batch.batch_index,
                         attempt + 1, e.what());
        }
    }
    outcome.failed = true;
    return outcome;
}

}  // namespace detail

/// Expand the seed documents per the plan. `none` passes the seeds through;
/// `random` prompts from uniformly sampled seed examples until the synthetic
/// target is met; `clustered` groups the seeds by TF-IDF cosine/average
/// hierarchical clustering and prompts once per cluster, splitting the target
/// evenly across clusters. Shortfalls are recorded, never silently padded; a
/// batch that stays unparseable after the retry budget aborts the run with a
/// partial-progress manifest.
inline AugmentResult augment(const std::vector<Document>& seed_docs, const AugmentationPlan& plan,
                             TextGenerator& generator,
                             const StopwordList& stopwords = bundled_stopwords()) {
    validate_plan(plan);

    AugmentResult result;
    result.docs = seed_docs;
    std::sort(result.docs.begin(), result.docs.end(),
              [](const Document& a, const Document& b) { return a.doc_id < b.doc_id; });
    if (plan.strategy == Strategy::none || plan.target_synthetic_count == 0) return result;

    const std::vector<Document> seeds = result.docs;  // sorted working copy
    const int n_seed = static_cast<int>(seeds.size());
    if (n_seed < plan.examples_per_prompt)
        throw config_error("need at least examples_per_prompt seed docs");

    auto emit_batch = [&](const PromptBatch& batch, std::optional<int> cluster_index) -> bool {
        detail::BatchOutcome outcome = detail::run_batch(generator, batch, plan.max_retries);
        BatchManifest manifest;
        manifest.batch_index = batch.batch_index;
        manifest.cluster_index = cluster_index;
        manifest.example_doc_ids = batch.example_doc_ids;
        manifest.requested = batch.requested_count;
        manifest.parsed = static_cast<int>(outcome.parsed.docs.size());
        manifest.shortfall = outcome.parsed.shortfall;
        manifest.retries = outcome.retries;
        manifest.failed = outcome.failed;
        result.batches.push_back(std::move(manifest));
        if (outcome.failed) {
            result.aborted = true;
            return false;
        }
        for (Document& d : outcome.parsed.docs) {
            result.docs.push_back(std::move(d));
            ++result.n_synthetic;
        }
        return true;
    };

    if (plan.strategy == Strategy::random) {
        RngStream stream(derive_seed(plan.rng_seed, "random"));
        std::vector<int> indices(static_cast<std::size_t>(n_seed));
        for (int i = 0; i < n_seed; ++i) indices[static_cast<std::size_t>(i)] = i;
        int remaining = plan.target_synthetic_count;
        int batch_index = 0;
        result.effective_generations_per_prompt = plan.generations_per_prompt;
        while (remaining > 0) {
            std::vector<int> pick =
                stream.sample(indices, static_cast<std::size_t>(plan.examples_per_prompt));
            std::vector<Document> examples;
            for (int i : pick) examples.push_back(seeds[static_cast<std::size_t>(i)]);
            PromptBatch batch =
                build_prompt(examples, std::min(plan.generations_per_prompt, remaining));
            batch.batch_index = batch_index++;
            if (!emit_batch(batch, std::nullopt)) return result;
            remaining = plan.target_synthetic_count - static_cast<int>(result.n_synthetic);
        }
        return result;
    }

    // clustered
    std::vector<KeywordDoc> kdocs;
    kdocs.reserve(seeds.size());
    for (const Document& d : seeds) kdocs.push_back(to_keyword_doc(d, stopwords));
    DocTermMatrix matrix = vectorize(kdocs, plan.vocab_cap);
    int n_clusters = plan_clusters(n_seed, plan);
    result.n_clusters = n_clusters;
    ClusterAssignment assignment = hierarchical_cluster(matrix, n_clusters);
    std::vector<std::vector<int>> members = cluster_members(assignment, matrix);

    result.effective_generations_per_prompt =
        (plan.target_synthetic_count + n_clusters - 1) / n_clusters;
    int base = plan.target_synthetic_count / n_clusters;
    int rem = plan.target_synthetic_count % n_clusters;

    RngStream stream(derive_seed(plan.rng_seed, "clustered"));
    for (int ci = 0; ci < n_clusters; ++ci) {
        int requested = base + (ci < rem ? 1 : 0);
        if (requested == 0) continue;
        const std::vector<int>& rows = members[static_cast<std::size_t>(ci)];
        std::vector<int> pick = stream.sample(
            rows, std::min<std::size_t>(rows.size(), static_cast<std::size_t>(plan.examples_per_prompt)));
        std::sort(pick.begin(), pick.end());
        std::vector<Document> examples;
        for (int row : pick) examples.push_back(seeds[static_cast<std::size_t>(row)]);
        PromptBatch batch = build_prompt(examples, requested);
        batch.batch_index = ci;
        batch.cluster_index = ci;
        if (!emit_batch(batch, ci)) return result;
    }
    return result;
}

inline json batches_to_json(const std::vector<BatchManifest>& batches) {
    json arr = json::array();
    for (const BatchManifest& b : batches) {
        json j;
        j["batch_index"] = b.batch_index;
        if (b.cluster_index)
            j["cluster_index"] = *b.cluster_index;
        else
            j["cluster_index"] = nullptr;
        j["example_doc_ids"] = b.example_doc_ids;
        j["requested"] = b.requested;
        j["parsed"] = b.parsed;
        j["shortfall"] = b.shortfall;
        j["retries"] = b.retries;
        j["failed"] = b.failed;
        arr.push_back(std::move(j));
    }
    return arr;
}

}  // namespace leakforge
