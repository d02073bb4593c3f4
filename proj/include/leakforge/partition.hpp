#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "leakforge/common.hpp"
#include "leakforge/corpus.hpp"
#include "leakforge/io.hpp"
#include "leakforge/rng.hpp"

namespace leakforge {

/// Client/attacker split plus the attacker's leaked seed subset. Id vectors
/// are kept sorted; one master rng_seed replays the whole partition via the
/// "split" and "seed" derived streams.
struct Partition {
    std::vector<std::string> client_ids;
    std::vector<std::string> attacker_pool_ids;
    std::vector<std::string> seed_ids;
    std::uint64_t rng_seed = 0;
    double seed_fraction = 0.0;
};

inline long round_half_up(double x) { return static_cast<long>(std::floor(x + 0.5)); }

/// Uniformly random disjoint halves, fully determined by rng_seed. The client
/// gets the extra document when the corpus size is odd.
inline Partition split_ids(std::vector<std::string> ids, std::uint64_t rng_seed) {
    if (ids.size() < 2) throw config_error("split requires a corpus of at least 2 documents");
    std::sort(ids.begin(), ids.end());
    RngStream stream(derive_seed(rng_seed, "split"));
    stream.shuffle(ids);

    Partition p;
    p.rng_seed = rng_seed;
    std::size_t n_client = (ids.size() + 1) / 2;
    p.client_ids.assign(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(n_client));
    p.attacker_pool_ids.assign(ids.begin() + static_cast<std::ptrdiff_t>(n_client), ids.end());
    std::sort(p.client_ids.begin(), p.client_ids.end());
    std::sort(p.attacker_pool_ids.begin(), p.attacker_pool_ids.end());
    return p;
}

inline Partition split_corpus(const Corpus& corpus, std::uint64_t rng_seed) {
    std::vector<std::string> ids;
    ids.reserve(corpus.documents.size());
    for (const Document& d : corpus.documents) ids.push_back(d.doc_id);
    return split_ids(std::move(ids), rng_seed);
}

/// Sample the leaked seed subset uniformly without replacement from the
/// attacker pool; |seed| = round-half-up(fraction * pool size).
inline Partition select_seed(Partition partition, double seed_fraction, std::uint64_t rng_seed) {
    if (!(seed_fraction > 0.0 && seed_fraction <= 1.0))
        throw config_error("seed_fraction must be in (0, 1]");
    long n = round_half_up(seed_fraction * static_cast<double>(partition.attacker_pool_ids.size()));
    if (n <= 0)
        throw config_error("seed selection is empty: fraction " + std::to_string(seed_fraction) +
                           " of pool " + std::to_string(partition.attacker_pool_ids.size()));
    RngStream stream(derive_seed(rng_seed, "seed"));
    std::vector<std::string> pool = partition.attacker_pool_ids;  // already sorted
    partition.seed_ids = stream.sample(pool, static_cast<std::size_t>(n));
    std::sort(partition.seed_ids.begin(), partition.seed_ids.end());
    partition.seed_fraction = seed_fraction;
    partition.rng_seed = rng_seed;
    return partition;
}

inline json partition_to_json(const Partition& p) {
    json j;
    j["rng_seed"] = p.rng_seed;
    j["seed_fraction"] = json_real(p.seed_fraction);
    j["client_ids"] = p.client_ids;
    j["attacker_pool_ids"] = p.attacker_pool_ids;
    j["seed_ids"] = p.seed_ids;
    return j;
}

inline Partition partition_from_json(const json& j) {
    Partition p;
    p.rng_seed = j.at("rng_seed").get<std::uint64_t>();
    p.seed_fraction = j.at("seed_fraction").get<double>();
    p.client_ids = j.at("client_ids").get<std::vector<std::string>>();
    p.attacker_pool_ids = j.at("attacker_pool_ids").get<std::vector<std::string>>();
    p.seed_ids = j.at("seed_ids").get<std::vector<std::string>>();
    return p;
}

}  // namespace leakforge
