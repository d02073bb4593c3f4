#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "leakforge/augment.hpp"
#include "leakforge/common.hpp"
#include "leakforge/corpus.hpp"
#include "leakforge/generator.hpp"
#include "leakforge/hash.hpp"
#include "leakforge/io.hpp"
#include "leakforge/keywords.hpp"
#include "leakforge/partition.hpp"
#include "leakforge/rng.hpp"
#include "leakforge/stats.hpp"
#include "leakforge/stopwords.hpp"
#include "leakforge/volume.hpp"

namespace leakforge {

struct ExperimentConfig {
    std::string corpus_path;
    double seed_fraction = 0.2;
    std::optional<long> client_size;         // subsample of the client half
    std::optional<long> attacker_real_size;  // pins the seed count; pool size is implied
    std::string synthetic_ratio = "1:4";     // real:synthetic
    std::vector<Strategy> arms = {Strategy::none, Strategy::random, Strategy::clustered};
    GeneratorConfig generator;
    int repeats = 5;
    std::uint64_t rng_seed = 0;
    long k = 100;
    bool resample_split = true;  // fresh split per repeat (vs. generation-only variation)
    int examples_per_prompt = 3;
    int generations_per_prompt = 8;
    std::size_t vocab_cap = 3000;
    double alpha = 0.05;
};

/// Parse "R:S" into the synthetic/real multiplier pair.
inline std::pair<long, long> parse_ratio(const std::string& ratio) {
    std::size_t colon = ratio.find(':');
    if (colon == std::string::npos) throw config_error("synthetic_ratio must look like '1:4'");
    try {
        long real = std::stol(ratio.substr(0, colon));
        long synth = std::stol(ratio.substr(colon + 1));
        if (real <= 0 || synth < 0) throw config_error("synthetic_ratio parts must be positive");
        return {real, synth};
    } catch (const std::exception&) {
        throw config_error("cannot parse synthetic_ratio: " + ratio);
    }
}

// --- flat key-value config file (TOML subset: scalars, dotted keys, string arrays) ---

namespace detail {

inline std::string strip_comment(std::string_view line) {
    bool in_string = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') in_string = !in_string;
        if (line[i] == '#' && !in_string) return std::string(line.substr(0, i));
    }
    return std::string(line);
}

inline std::string unquote(const std::string& s) {
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return s.substr(1, s.size() - 2);
    return s;
}

inline std::vector<std::string> parse_string_array(const std::string& s) {
    std::vector<std::string> out;
    std::string inner = s.substr(1, s.size() - 2);  // strip [ ]
    std::size_t pos = 0;
    while (pos < inner.size()) {
        std::size_t comma = inner.find(',', pos);
        if (comma == std::string::npos) comma = inner.size();
        std::string item = trim(std::string_view(inner).substr(pos, comma - pos));
        if (!item.empty()) out.push_back(unquote(item));
        pos = comma + 1;
    }
    return out;
}

}  // namespace detail

inline ExperimentConfig parse_config(const std::string& text, const std::string& origin = "<config>") {
    std::map<std::string, std::string> kv;
    for_each_line(text, [&](std::string_view raw_line) {
        std::string line = detail::trim(detail::strip_comment(raw_line));
        if (line.empty()) return;
        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw config_error(origin + ": expected 'key = value', got: " + line);
        std::string key = detail::trim(std::string_view(line).substr(0, eq));
        std::string value = detail::trim(std::string_view(line).substr(eq + 1));
        if (key.empty() || value.empty())
            throw config_error(origin + ": malformed line: " + line);
        kv[key] = value;
    });

    ExperimentConfig cfg;
    auto take = [&](const char* key) -> std::optional<std::string> {
        auto it = kv.find(key);
        if (it == kv.end()) return std::nullopt;
        std::string v = it->second;
        kv.erase(it);
        return v;
    };
    auto as_long = [&](const std::string& v, const char* key) {
        try {
            return std::stol(v);
        } catch (const std::exception&) {
            throw config_error(origin + ": key '" + std::string(key) + "' is not an integer: " + v);
        }
    };
    auto as_double = [&](const std::string& v, const char* key) {
        try {
            return std::stod(v);
        } catch (const std::exception&) {
            throw config_error(origin + ": key '" + std::string(key) + "' is not a number: " + v);
        }
    };
    auto as_bool = [&](const std::string& v, const char* key) {
        if (v == "true") return true;
        if (v == "false") return false;
        throw config_error(origin + ": key '" + std::string(key) + "' is not true/false: " + v);
    };

    if (auto v = take("corpus_path")) cfg.corpus_path = detail::unquote(*v);
    if (auto v = take("seed_fraction")) cfg.seed_fraction = as_double(*v, "seed_fraction");
    if (auto v = take("client_size")) cfg.client_size = as_long(*v, "client_size");
    if (auto v = take("attacker_real_size"))
        cfg.attacker_real_size = as_long(*v, "attacker_real_size");
    if (auto v = take("synthetic_ratio")) cfg.synthetic_ratio = detail::unquote(*v);
    if (auto v = take("arms")) {
        cfg.arms.clear();
        for (const std::string& name : detail::parse_string_array(*v))
            cfg.arms.push_back(strategy_from_name(name));
    }
    if (auto v = take("repeats")) cfg.repeats = static_cast<int>(as_long(*v, "repeats"));
    if (auto v = take("rng_seed")) cfg.rng_seed = static_cast<std::uint64_t>(as_long(*v, "rng_seed"));
    if (auto v = take("k")) cfg.k = as_long(*v, "k");
    if (auto v = take("resample_split")) cfg.resample_split = as_bool(*v, "resample_split");
    if (auto v = take("examples_per_prompt"))
        cfg.examples_per_prompt = static_cast<int>(as_long(*v, "examples_per_prompt"));
    if (auto v = take("generations_per_prompt"))
        cfg.generations_per_prompt = static_cast<int>(as_long(*v, "generations_per_prompt"));
    if (auto v = take("vocab_cap")) cfg.vocab_cap = static_cast<std::size_t>(as_long(*v, "vocab_cap"));
    if (auto v = take("alpha")) cfg.alpha = as_double(*v, "alpha");
    if (auto v = take("generator.backend")) cfg.generator.backend = backend_from_name(detail::unquote(*v));
    if (auto v = take("generator.model_name")) cfg.generator.model_name = detail::unquote(*v);
    if (auto v = take("generator.endpoint_url")) cfg.generator.endpoint_url = detail::unquote(*v);
    if (auto v = take("generator.api_key_env")) cfg.generator.api_key_env = detail::unquote(*v);
    if (auto v = take("generator.temperature"))
        cfg.generator.temperature = as_double(*v, "generator.temperature");
    if (auto v = take("generator.timeout_ms"))
        cfg.generator.timeout = std::chrono::milliseconds(as_long(*v, "generator.timeout_ms"));
    if (auto v = take("generator.max_parallel"))
        cfg.generator.max_parallel = static_cast<int>(as_long(*v, "generator.max_parallel"));
    if (auto v = take("generator.cache_dir")) cfg.generator.cache_dir = detail::unquote(*v);

    if (!kv.empty()) throw config_error(origin + ": unknown config key: " + kv.begin()->first);
    if (cfg.repeats < 1) throw config_error(origin + ": repeats must be >= 1");
    if (cfg.k < 1) throw config_error(origin + ": k must be >= 1");
    return cfg;
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
    return parse_config(read_text_file(path), path.string());
}

inline json config_to_json(const ExperimentConfig& c) {
    json j;
    j["corpus_path"] = c.corpus_path;
    j["seed_fraction"] = json_real(c.seed_fraction);
    j["client_size"] = c.client_size ? json(*c.client_size) : json(nullptr);
    j["attacker_real_size"] = c.attacker_real_size ? json(*c.attacker_real_size) : json(nullptr);
    j["synthetic_ratio"] = c.synthetic_ratio;
    json arms = json::array();
    for (Strategy s : c.arms) arms.push_back(strategy_name(s));
    j["arms"] = arms;
    j["repeats"] = c.repeats;
    j["rng_seed"] = c.rng_seed;
    j["k"] = c.k;
    j["resample_split"] = c.resample_split;
    j["examples_per_prompt"] = c.examples_per_prompt;
    j["generations_per_prompt"] = c.generations_per_prompt;
    j["vocab_cap"] = c.vocab_cap;
    j["alpha"] = json_real(c.alpha);
    j["generator"] = json{{"backend", backend_name(c.generator.backend)},
                          {"model_name", c.generator.model_name},
                          {"endpoint_url", c.generator.endpoint_url},
                          {"api_key_env", c.generator.api_key_env},
                          {"temperature", json_real(c.generator.temperature)},
                          {"timeout_ms", c.generator.timeout.count()},
                          {"max_parallel", c.generator.max_parallel},
                          {"cache_dir", c.generator.cache_dir}};
    return j;
}

struct ArmRepeatOutcome {
    double jaccard = 0.0;
    double accuracy = 0.0;
    std::string client_hash;
    long n_synthetic = 0;
    long attacker_docs = 0;
    bool failed = false;
    std::vector<BatchManifest> batches;
};

struct RepeatOutcome {
    int repeat = 0;
    long n_client = 0;
    long n_pool = 0;
    long n_seed = 0;
    std::map<std::string, ArmRepeatOutcome> arms;
};

struct ExperimentReport {
    ExperimentConfig config;
    std::vector<RepeatOutcome> repeats;
    std::map<std::string, std::vector<double>> arm_scores;  // successful repeats, in order
    long synthetic_target = 0;
    long realized_seed_size = 0;
    long realized_client_size = 0;
    bool ratio_rounded = false;
    bool partial = false;
    std::vector<ArmComparison> stats;
    GeneratorStats generator_stats;
};

namespace detail {

/// Order-independent fingerprint of a keyword-doc collection.
inline std::string collection_hash(const std::vector<KeywordDoc>& docs) {
    std::vector<std::string> lines;
    lines.reserve(docs.size());
    for (const KeywordDoc& d : docs) {
        std::string line = d.doc_id;
        for (const std::string& s : d.stems) {
            line += ' ';
            line += s;
        }
        lines.push_back(std::move(line));
    }
    std::sort(lines.begin(), lines.end());
    std::string all;
    for (const std::string& l : lines) {
        all += l;
        all += '\n';
    }
    return digest128(all);
}

}  // namespace detail

/// Run the full pipeline for one configuration: per repeat, split the corpus,
/// select the leaked seed subset, run every arm against the identical
/// client collection (the pairing the downstream paired tests require), and
/// score each arm with Jaccard@k of the top-k stem sets.
inline ExperimentReport run_experiment(const ExperimentConfig& config, TextGenerator& generator) {
    ExperimentReport report;
    report.config = config;

    std::vector<Document> corpus_docs = read_corpus_file(config.corpus_path);
    if (corpus_docs.size() < 2) throw config_error("corpus has fewer than 2 documents");
    std::sort(corpus_docs.begin(), corpus_docs.end(),
              [](const Document& a, const Document& b) { return a.doc_id < b.doc_id; });

    const StopwordList& stopwords = bundled_stopwords();
    std::map<std::string, const Document*> by_id;
    std::map<std::string, KeywordDoc> stems_by_id;
    std::vector<std::string> all_ids;
    for (const Document& d : corpus_docs) {
        by_id[d.doc_id] = &d;
        stems_by_id[d.doc_id] = to_keyword_doc(d, stopwords);
        all_ids.push_back(d.doc_id);
    }

    const auto [ratio_real, ratio_synth] = parse_ratio(config.synthetic_ratio);

    for (int r = 0; r < config.repeats; ++r) {
        const std::uint64_t repeat_seed =
            derive_seed(config.rng_seed, config.resample_split ? static_cast<std::uint64_t>(r) : 0);
        Partition partition = split_ids(all_ids, repeat_seed);

        // client half, optionally subsampled
        std::vector<std::string> client_ids = partition.client_ids;
        if (config.client_size && *config.client_size < static_cast<long>(client_ids.size())) {
            RngStream stream(derive_seed(repeat_seed, "client"));
            client_ids = stream.sample(client_ids, static_cast<std::size_t>(*config.client_size));
            std::sort(client_ids.begin(), client_ids.end());
        }

        // leaked seed subset: fraction of the pool, or a pinned seed count
        std::vector<std::string> seed_ids;
        if (config.attacker_real_size) {
            if (*config.attacker_real_size > static_cast<long>(partition.attacker_pool_ids.size()))
                throw config_error("attacker_real_size exceeds the attacker pool");
            RngStream stream(derive_seed(repeat_seed, "seed"));
            seed_ids = stream.sample(partition.attacker_pool_ids,
                                     static_cast<std::size_t>(*config.attacker_real_size));
            std::sort(seed_ids.begin(), seed_ids.end());
        } else {
            partition = select_seed(std::move(partition), config.seed_fraction, repeat_seed);
            seed_ids = partition.seed_ids;
        }

        const long synth_target_exact = static_cast<long>(seed_ids.size()) * ratio_synth;
        long synth_target = synth_target_exact / ratio_real;
        if (synth_target * ratio_real != synth_target_exact) {
            synth_target = round_half_up(static_cast<double>(synth_target_exact) /
                                         static_cast<double>(ratio_real));
            report.ratio_rounded = true;
        }
        if (r == 0) {
            report.synthetic_target = synth_target;
            report.realized_seed_size = static_cast<long>(seed_ids.size());
            report.realized_client_size = static_cast<long>(client_ids.size());
        }

        std::vector<KeywordDoc> client_kdocs;
        client_kdocs.reserve(client_ids.size());
        for (const std::string& id : client_ids) client_kdocs.push_back(stems_by_id.at(id));
        VolumeProfile client_profile = volume_profile(client_kdocs);
        const std::string client_hash = detail::collection_hash(client_kdocs);

        std::vector<Document> seed_docs;
        seed_docs.reserve(seed_ids.size());
        for (const std::string& id : seed_ids) seed_docs.push_back(*by_id.at(id));

        RepeatOutcome outcome;
        outcome.repeat = r;
        outcome.n_client = static_cast<long>(client_ids.size());
        outcome.n_pool = static_cast<long>(partition.attacker_pool_ids.size());
        outcome.n_seed = static_cast<long>(seed_ids.size());

        for (Strategy arm : config.arms) {
            AugmentationPlan plan;
            plan.strategy = arm;
            plan.target_synthetic_count = arm == Strategy::none ? 0 : static_cast<int>(synth_target);
            plan.examples_per_prompt = config.examples_per_prompt;
            plan.generations_per_prompt = config.generations_per_prompt;
            plan.vocab_cap = config.vocab_cap;
            plan.rng_seed = derive_seed(repeat_seed, std::string("augment:") + strategy_name(arm));

            ArmRepeatOutcome arm_outcome;
            arm_outcome.client_hash = client_hash;
            AugmentResult augmented = augment(seed_docs, plan, generator, stopwords);
            arm_outcome.batches = augmented.batches;
            arm_outcome.n_synthetic = augmented.n_synthetic;
            arm_outcome.attacker_docs = static_cast<long>(augmented.docs.size());
            if (augmented.aborted) {
                arm_outcome.failed = true;
                report.partial = true;
                outcome.arms[strategy_name(arm)] = std::move(arm_outcome);
                continue;
            }

            std::vector<KeywordDoc> attacker_kdocs;
            attacker_kdocs.reserve(augmented.docs.size());
            for (const Document& d : augmented.docs) {
                if (d.origin == Origin::real) {
                    attacker_kdocs.push_back(stems_by_id.at(d.doc_id));
                } else {
                    attacker_kdocs.push_back(to_keyword_doc(d, stopwords));
                }
            }
            VolumeProfile attacker_profile = volume_profile(attacker_kdocs);
            RecoveryResult recovery = rank_match_attack(client_profile, attacker_profile, config.k);
            arm_outcome.jaccard = recovery.jaccard_at_k;
            arm_outcome.accuracy = recovery.accuracy;
            outcome.arms[strategy_name(arm)] = std::move(arm_outcome);
        }
        report.repeats.push_back(std::move(outcome));
    }

    for (Strategy arm : config.arms) {
        std::vector<double> scores;
        for (const RepeatOutcome& rep : report.repeats) {
            const ArmRepeatOutcome& a = rep.arms.at(strategy_name(arm));
            if (!a.failed) scores.push_back(a.jaccard);
        }
        report.arm_scores[strategy_name(arm)] = std::move(scores);
    }

    // paired stats over repeats where every arm succeeded
    if (config.arms.size() >= 2 && config.repeats >= 3) {
        std::map<std::string, std::vector<double>> paired;
        for (const RepeatOutcome& rep : report.repeats) {
            bool all_ok = true;
            for (const auto& [name, a] : rep.arms) all_ok = all_ok && !a.failed;
            if (!all_ok) continue;
            for (const auto& [name, a] : rep.arms) paired[name].push_back(a.jaccard);
        }
        if (!paired.empty() && paired.begin()->second.size() >= 3)
            report.stats = compare_arms(paired, config.alpha);
    }
    report.generator_stats = generator.stats();
    return report;
}

/// Convenience overload constructing the generator from the config.
inline ExperimentReport run_experiment(const ExperimentConfig& config) {
    Generator generator(config.generator);
    return run_experiment(config, generator);
}

inline json report_to_json(const ExperimentReport& report) {
    json j;
    j["config"] = config_to_json(report.config);
    j["synthetic_target"] = report.synthetic_target;
    j["realized_seed_size"] = report.realized_seed_size;
    j["realized_client_size"] = report.realized_client_size;
    j["ratio_rounded"] = report.ratio_rounded;
    j["partial"] = report.partial;

    json arms = json::object();
    for (const auto& [name, scores] : report.arm_scores) {
        double mean = 0.0, sd = 0.0;
        for (double s : scores) mean += s;
        if (!scores.empty()) mean /= static_cast<double>(scores.size());
        if (scores.size() > 1) {
            for (double s : scores) sd += (s - mean) * (s - mean);
            sd = std::sqrt(sd / static_cast<double>(scores.size() - 1));
        }
        json scores_json = json::array();
        for (double s : scores) scores_json.push_back(json_real(s));
        arms[name] = json{{"scores", scores_json},
                          {"mean", json_real(mean)},
                          {"sd", json_real(sd)},
                          {"n", scores.size()}};
    }
    j["arms"] = arms;

    json repeats = json::array();
    for (const RepeatOutcome& rep : report.repeats) {
        json rj;
        rj["repeat"] = rep.repeat;
        rj["n_client"] = rep.n_client;
        rj["n_pool"] = rep.n_pool;
        rj["n_seed"] = rep.n_seed;
        json arms_json = json::object();
        for (const auto& [name, a] : rep.arms) {
            arms_json[name] = json{{"jaccard", json_real(a.jaccard)},
                                   {"accuracy", json_real(a.accuracy)},
                                   {"client_hash", a.client_hash},
                                   {"n_synthetic", a.n_synthetic},
                                   {"attacker_docs", a.attacker_docs},
                                   {"failed", a.failed},
                                   {"batches", batches_to_json(a.batches)}};
        }
        rj["arms"] = arms_json;
        repeats.push_back(std::move(rj));
    }
    j["repeats"] = repeats;
    j["stats"] = comparisons_to_json(report.stats);
    j["provenance"] = json{{"tool_version", kToolVersion},
                           {"stopwords_version", bundled_stopwords().version_tag},
                           {"model_name", report.config.generator.model_name},
                           {"backend", backend_name(report.config.generator.backend)},
                           {"backend_calls", report.generator_stats.backend_calls},
                           {"network_calls", report.generator_stats.network_calls},
                           {"cache_hits", report.generator_stats.cache_hits},
                           {"cache_misses", report.generator_stats.cache_misses}};
    return j;
}

/// Table-shaped CSV over a set of reports, one row per configuration,
/// sorted by (attacker_real, model).
inline std::string sweep_csv(const std::vector<ExperimentReport>& reports) {
    std::string csv =
        "model,attacker_real,attacker_synthetic,client,none,random_enhanced,clustered_enhanced\n";
    std::vector<const ExperimentReport*> order;
    for (const ExperimentReport& r : reports) order.push_back(&r);
    std::sort(order.begin(), order.end(), [](const ExperimentReport* a, const ExperimentReport* b) {
        if (a->realized_seed_size != b->realized_seed_size)
            return a->realized_seed_size < b->realized_seed_size;
        return a->config.generator.model_name < b->config.generator.model_name;
    });
    char buf[32];
    for (const ExperimentReport* r : order) {
        csv += r->config.generator.model_name;
        csv += ',' + std::to_string(r->realized_seed_size);
        csv += ',' + std::to_string(r->synthetic_target);
        csv += ',' + std::to_string(r->realized_client_size);
        for (const char* arm : {"none", "random", "clustered"}) {
            csv += ',';
            auto it = r->arm_scores.find(arm);
            if (it == r->arm_scores.end() || it->second.empty()) continue;
            double mean = 0.0;
            for (double s : it->second) mean += s;
            mean /= static_cast<double>(it->second.size());
            std::snprintf(buf, sizeof(buf), "%.4f", mean);
            csv += buf;
        }
        csv += '\n';
    }
    return csv;
}

}  // namespace leakforge
