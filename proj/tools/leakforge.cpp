// leakforge: volume-leakage query-recovery experiments over email-style
// corpora, with LLM-backed or deterministic-mock synthetic augmentation.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "leakforge/augment.hpp"
#include "leakforge/common.hpp"
#include "leakforge/corpus.hpp"
#include "leakforge/experiment.hpp"
#include "leakforge/generator.hpp"
#include "leakforge/keywords.hpp"
#include "leakforge/partition.hpp"
#include "leakforge/stats.hpp"
#include "leakforge/stopwords.hpp"
#include "leakforge/volume.hpp"

namespace lf = leakforge;
namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFatal = 1;
constexpr int kExitPartial = 2;

std::string env_or(const char* name, const std::string& fallback) {
    const char* v = std::getenv(name);
    return v && *v ? std::string(v) : fallback;
}

/// A "seed" input for augment may be a corpus file (doc_id/body) or a
/// keyword file (doc_id/stems). Keyword-only inputs get pseudo-bodies from
/// their sorted stems so the mock generators still have text to work with.
std::vector<lf::Document> read_docs_flexible(const fs::path& path) {
    std::vector<lf::Document> docs;
    lf::for_each_line(lf::read_text_file(path), [&](std::string_view line) {
        lf::json rec = lf::json::parse(line);
        lf::Document d;
        d.doc_id = rec.at("doc_id").get<std::string>();
        if (rec.contains("body")) {
            d.body = rec.at("body").get<std::string>();
            d.origin = rec.value("origin", "real") == std::string("synthetic") ? lf::Origin::synthetic
                                                                               : lf::Origin::real;
        } else if (rec.contains("stems")) {
            std::string body;
            for (const auto& s : rec.at("stems")) {
                if (!body.empty()) body += ' ';
                body += s.get<std::string>();
            }
            d.body = std::move(body);
        } else {
            throw lf::data_error("record has neither 'body' nor 'stems': " + std::string(line));
        }
        docs.push_back(std::move(d));
    });
    return docs;
}

std::vector<std::string> read_ids(const fs::path& path) {
    std::vector<std::string> ids;
    lf::for_each_line(lf::read_text_file(path), [&](std::string_view line) {
        ids.push_back(lf::json::parse(line).at("doc_id").get<std::string>());
    });
    return ids;
}

int cmd_ingest(const std::string& root, const std::string& filter, const std::string& out,
               std::string manifest_path) {
    lf::Corpus corpus = lf::ingest_corpus(root, filter);
    lf::write_corpus_file(out, corpus.documents);
    if (manifest_path.empty()) manifest_path = out + ".manifest.json";
    lf::atomic_write_text(manifest_path, corpus.ingest_manifest.to_json().dump(2) + "\n");
    std::cout << "ingested " << corpus.ingest_manifest.n_documents << " documents ("
              << corpus.ingest_manifest.n_discovered << " discovered, "
              << corpus.ingest_manifest.n_skipped << " skipped, "
              << corpus.ingest_manifest.n_deduped << " deduped) -> " << out << "\n";
    return kExitOk;
}

int cmd_stem(const std::string& corpus_path, const std::string& out) {
    std::vector<lf::Document> docs = lf::read_corpus_file(corpus_path);
    std::vector<lf::KeywordDoc> kdocs;
    kdocs.reserve(docs.size());
    for (const lf::Document& d : docs) kdocs.push_back(lf::to_keyword_doc(d, lf::bundled_stopwords()));
    lf::write_keyword_file(out, kdocs);
    std::cout << "stemmed " << kdocs.size() << " documents -> " << out << "\n";
    return kExitOk;
}

int cmd_split(const std::string& keywords_path, double seed_fraction, std::uint64_t rng_seed,
              std::optional<long> client_size, const std::string& out) {
    std::vector<std::string> ids = read_ids(keywords_path);
    lf::Partition partition = lf::split_ids(ids, rng_seed);
    partition = lf::select_seed(std::move(partition), seed_fraction, rng_seed);
    lf::json j = lf::partition_to_json(partition);
    if (client_size && *client_size < static_cast<long>(partition.client_ids.size())) {
        lf::RngStream stream(lf::derive_seed(rng_seed, "client"));
        std::vector<std::string> sample =
            stream.sample(partition.client_ids, static_cast<std::size_t>(*client_size));
        std::sort(sample.begin(), sample.end());
        j["client_sample_ids"] = sample;
    }
    lf::atomic_write_text(out, j.dump(2) + "\n");
    std::cout << "split " << ids.size() << " docs: client " << partition.client_ids.size()
              << ", attacker pool " << partition.attacker_pool_ids.size() << ", seed "
              << partition.seed_ids.size() << " -> " << out << "\n";
    return kExitOk;
}

int cmd_augment(const std::string& seed_path, const std::string& strategy, int target, int epp,
                int gpp, const std::string& backend, const std::string& model,
                const std::string& endpoint, std::uint64_t rng_seed, const std::string& cache_dir,
                const std::string& out, std::string manifest_path) {
    std::vector<lf::Document> seeds = read_docs_flexible(seed_path);

    lf::AugmentationPlan plan;
    plan.strategy = lf::strategy_from_name(strategy);
    plan.target_synthetic_count = plan.strategy == lf::Strategy::none ? 0 : target;
    plan.examples_per_prompt = epp;
    plan.generations_per_prompt = gpp;
    plan.rng_seed = rng_seed;

    lf::GeneratorConfig gcfg;
    gcfg.backend = lf::backend_from_name(backend);
    gcfg.model_name = model;
    gcfg.endpoint_url = endpoint;
    gcfg.cache_dir = cache_dir;
    lf::Generator generator(gcfg);

    lf::AugmentResult result = lf::augment(seeds, plan, generator);
    lf::write_corpus_file(out, result.docs);
    if (manifest_path.empty()) manifest_path = out + ".manifest.json";
    lf::json mj;
    mj["strategy"] = strategy;
    mj["target_synthetic"] = plan.target_synthetic_count;
    mj["n_synthetic"] = result.n_synthetic;
    mj["n_clusters"] = result.n_clusters;
    mj["effective_generations_per_prompt"] = result.effective_generations_per_prompt;
    mj["aborted"] = result.aborted;
    mj["batches"] = lf::batches_to_json(result.batches);
    lf::atomic_write_text(manifest_path, mj.dump(2) + "\n");
    std::cout << "augmented " << seeds.size() << " seeds with " << result.n_synthetic
              << " synthetic docs (" << strategy << ") -> " << out << "\n";
    if (result.aborted) {
        std::cerr << "leakforge: augmentation aborted after retry budget; partial manifest written\n";
        return kExitPartial;
    }
    return kExitOk;
}

int cmd_attack(const std::string& client_path, const std::string& attacker_path, long k,
               const std::string& out) {
    lf::VolumeProfile client = lf::volume_profile(lf::read_keyword_file(client_path));
    lf::VolumeProfile attacker = lf::volume_profile(lf::read_keyword_file(attacker_path));
    lf::RecoveryResult result = lf::rank_match_attack(client, attacker, k);
    lf::atomic_write_text(out, lf::recovery_to_json(result).dump(2) + "\n");
    std::cout << "jaccard@" << k << " = " << result.jaccard_at_k
              << " (rank accuracy " << result.accuracy << ") -> " << out << "\n";
    return kExitOk;
}

int cmd_zipf(const std::string& client_path, const std::string& attacker_path, long top,
             const std::string& out) {
    lf::VolumeProfile client = lf::volume_profile(lf::read_keyword_file(client_path));
    lf::VolumeProfile attacker = lf::volume_profile(lf::read_keyword_file(attacker_path));
    std::vector<lf::ZipfRow> rows = lf::export_zipf_overlay(client, attacker, top);
    lf::atomic_write_text(out, lf::zipf_rows_to_csv(rows));
    std::cout << "wrote " << rows.size() << " zipf rows -> " << out << "\n";
    return kExitOk;
}

int cmd_run(const std::string& config_path, const std::string& out, const std::string& cache_dir,
            std::optional<std::uint64_t> seed_override) {
    lf::ExperimentConfig config = lf::load_config(config_path);
    if (!cache_dir.empty() && config.generator.cache_dir.empty())
        config.generator.cache_dir = cache_dir;
    if (seed_override) config.rng_seed = *seed_override;
    lf::ExperimentReport report = lf::run_experiment(config);
    lf::atomic_write_text(out, lf::report_to_json(report).dump(2) + "\n");
    for (const auto& [arm, scores] : report.arm_scores) {
        double mean = 0.0;
        for (double s : scores) mean += s;
        if (!scores.empty()) mean /= static_cast<double>(scores.size());
        std::cout << arm << ": mean jaccard@" << report.config.k << " = " << mean << " over "
                  << scores.size() << " repeats\n";
    }
    std::cout << "report -> " << out << "\n";
    return report.partial ? kExitPartial : kExitOk;
}

int cmd_sweep(const std::string& configs_dir, const std::string& out, const std::string& cache_dir) {
    std::vector<fs::path> paths;
    for (const auto& entry : fs::directory_iterator(configs_dir))
        if (entry.is_regular_file() && entry.path().extension() == ".toml")
            paths.push_back(entry.path());
    std::sort(paths.begin(), paths.end());

    std::vector<lf::ExperimentReport> reports;
    bool any_failed = false;
    for (const fs::path& p : paths) {
        try {
            lf::ExperimentConfig config = lf::load_config(p);
            if (!cache_dir.empty() && config.generator.cache_dir.empty())
                config.generator.cache_dir = cache_dir;
            reports.push_back(lf::run_experiment(config));
            std::cout << "ran " << p.filename().string() << "\n";
        } catch (const std::exception& e) {
            std::cerr << "leakforge: config " << p.string() << " failed: " << e.what() << "\n";
            any_failed = true;
        }
    }
    lf::atomic_write_text(out, lf::sweep_csv(reports));
    std::cout << "wrote " << reports.size() << " rows -> " << out << "\n";
    return any_failed ? kExitPartial : kExitOk;
}

int cmd_stats(const std::string& report_path, double alpha, const std::string& out) {
    lf::json report = lf::json::parse(lf::read_text_file(report_path));
    std::map<std::string, std::vector<double>> arm_scores;
    for (const auto& [name, arm] : report.at("arms").items())
        arm_scores[name] = arm.at("scores").get<std::vector<double>>();
    std::vector<lf::ArmComparison> comparisons = lf::compare_arms(arm_scores, alpha);
    lf::json j;
    j["alpha"] = lf::json_real(alpha);
    j["comparisons"] = lf::comparisons_to_json(comparisons);
    lf::atomic_write_text(out, j.dump(2) + "\n");
    for (const lf::ArmComparison& c : comparisons) {
        std::cout << c.arm_a << " vs " << c.arm_b << ": ";
        if (c.degenerate || !c.test)
            std::cout << "degenerate sample, no significance claimed\n";
        else
            std::cout << lf::method_name(c.test->method) << " p = " << c.test->p_value
                      << " (higher mean: " << c.direction << ")\n";
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"leakforge: volume-leakage query-recovery experiments with synthetic augmentation"};
    app.require_subcommand(0, 1);

    int verbosity = 0;
    app.add_flag("-v,--verbose", verbosity, "increase log verbosity");
    std::string global_cache_dir = env_or("LEAKFORGE_CACHE_DIR", "");
    app.add_option("--cache-dir", global_cache_dir, "completion cache directory");
    std::optional<std::uint64_t> global_seed;
    app.add_option("--rng-seed-override", global_seed, "override the experiment rng seed");

    // ingest
    auto* ingest = app.add_subcommand("ingest", "walk a raw email tree into a sanitized corpus file");
    std::string in_root, in_filter = lf::kDefaultFolderFilter, in_out, in_manifest;
    ingest->add_option("--root", in_root, "email tree root")->required();
    ingest->add_option("--filter", in_filter, "path glob for folders to keep");
    ingest->add_option("--out", in_out, "corpus output (ndjson)")->required();
    ingest->add_option("--manifest", in_manifest, "manifest output (default: <out>.manifest.json)");

    // stem
    auto* stem = app.add_subcommand("stem", "reduce a corpus file to keyword stem sets");
    std::string st_corpus, st_out;
    stem->add_option("--corpus", st_corpus, "corpus file")->required();
    stem->add_option("--out", st_out, "keyword output (ndjson)")->required();

    // split
    auto* split = app.add_subcommand("split", "split into client/attacker halves plus seed subset");
    std::string sp_keywords, sp_out;
    double sp_fraction = 0.2;
    std::uint64_t sp_seed = 0;
    std::optional<long> sp_client_size;
    split->add_option("--keywords", sp_keywords, "keyword or corpus file")->required();
    split->add_option("--seed-fraction", sp_fraction, "leaked fraction of the attacker pool");
    split->add_option("--rng-seed", sp_seed, "master rng seed");
    split->add_option("--client-size", sp_client_size, "subsample the client half to this size");
    split->add_option("--out", sp_out, "partition output (json)")->required();

    // augment
    auto* augment = app.add_subcommand("augment", "expand seed docs with synthetic generations");
    std::string au_seed, au_strategy = "clustered", au_backend = "mock", au_model = "mock",
                au_endpoint = "https://api.openai.com/v1", au_out, au_manifest;
    int au_target = 0, au_epp = 3, au_gpp = 8;
    std::uint64_t au_seed_val = 0;
    augment->add_option("--seed", au_seed, "seed docs (corpus or keyword file)")->required();
    augment->add_option("--strategy", au_strategy, "none|random|clustered")
        ->check(CLI::IsMember({"none", "random", "clustered"}));
    augment->add_option("--target-synthetic", au_target, "synthetic doc count to generate");
    augment->add_option("--examples-per-prompt", au_epp, "seed examples embedded per prompt (3-5)");
    augment->add_option("--gens-per-prompt", au_gpp, "generations requested per prompt (5-10)");
    augment->add_option("--generator", au_backend, "openai|mock|mock-echo|mock-resample");
    augment->add_option("--model", au_model, "model name");
    augment->add_option("--endpoint", au_endpoint, "chat-completions base url");
    augment->add_option("--rng-seed", au_seed_val, "sampling seed");
    augment->add_option("--out", au_out, "augmented corpus output")->required();
    augment->add_option("--manifest", au_manifest, "batch manifest output");

    // attack
    auto* attack = app.add_subcommand("attack", "volume-rank query recovery, scored by jaccard@k");
    std::string at_client, at_attacker, at_out;
    long at_k = 100;
    attack->add_option("--client", at_client, "client keyword file")->required();
    attack->add_option("--attacker", at_attacker, "attacker keyword file")->required();
    attack->add_option("--k", at_k, "top-k cutoff");
    attack->add_option("--out", at_out, "result output (json)")->required();

    // zipf
    auto* zipf = app.add_subcommand("zipf", "export client/attacker rank-frequency overlay");
    std::string zf_client, zf_attacker, zf_out;
    long zf_top = 200;
    zipf->add_option("--client", zf_client, "client keyword file")->required();
    zipf->add_option("--attacker", zf_attacker, "attacker keyword file")->required();
    zipf->add_option("--top", zf_top, "rows to export");
    zipf->add_option("--out", zf_out, "csv output")->required();

    // run
    auto* run = app.add_subcommand("run", "run a full experiment from a config file");
    std::string rn_config, rn_out;
    run->add_option("--config", rn_config, "experiment config (flat toml)")->required();
    run->add_option("--out", rn_out, "report output (json)")->required();

    // sweep
    auto* sweep = app.add_subcommand("sweep", "run every config in a directory, emit a csv table");
    std::string sw_dir, sw_out;
    sweep->add_option("--configs", sw_dir, "directory of *.toml configs")->required();
    sweep->add_option("--out", sw_out, "csv output")->required();

    // stats
    auto* stats = app.add_subcommand("stats", "statistical comparison of arms from a report");
    std::string stt_report, stt_out;
    double stt_alpha = 0.05;
    stats->add_option("--report", stt_report, "experiment report (json)")->required();
    stats->add_option("--alpha", stt_alpha, "normality-selection threshold");
    stats->add_option("--out", stt_out, "stats output (json)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);  // prints usage, exit 0
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitFatal;
    }

    try {
        if (app.got_subcommand(ingest)) return cmd_ingest(in_root, in_filter, in_out, in_manifest);
        if (app.got_subcommand(stem)) return cmd_stem(st_corpus, st_out);
        if (app.got_subcommand(split))
            return cmd_split(sp_keywords, sp_fraction, sp_seed, sp_client_size, sp_out);
        if (app.got_subcommand(augment))
            return cmd_augment(au_seed, au_strategy, au_target, au_epp, au_gpp, au_backend, au_model,
                               au_endpoint, au_seed_val, global_cache_dir, au_out, au_manifest);
        if (app.got_subcommand(attack)) return cmd_attack(at_client, at_attacker, at_k, at_out);
        if (app.got_subcommand(zipf)) return cmd_zipf(zf_client, zf_attacker, zf_top, zf_out);
        if (app.got_subcommand(run)) return cmd_run(rn_config, rn_out, global_cache_dir, global_seed);
        if (app.got_subcommand(sweep)) return cmd_sweep(sw_dir, sw_out, global_cache_dir);
        if (app.got_subcommand(stats)) return cmd_stats(stt_report, stt_alpha, stt_out);
    } catch (const lf::config_error& e) {
        std::cerr << "leakforge: " << e.what() << "\n";
        return kExitFatal;
    } catch (const lf::data_error& e) {
        std::cerr << "leakforge: " << e.what() << "\n";
        return kExitFatal;
    } catch (const std::exception& e) {
        std::cerr << "leakforge: " << e.what() << "\n";
        return kExitFatal;
    }

    std::cout << app.help();
    return kExitOk;
}
