#ifndef CANOPY_SPECIES_HPP
#define CANOPY_SPECIES_HPP

#include "canopy/metrics.hpp"

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace canopy::species {

/// Lookup key for the knowledge base: annual precipitation plus a canonical
/// soil label (lowercased, trimmed, diacritics preserved).
struct SoilClimateKey {
    double humidity_mm = 0.0;
    std::string soil_type;

    SoilClimateKey normalized() const;
    void validate() const;

    friend bool operator==(const SoilClimateKey&, const SoilClimateKey&) = default;
};

/// Species name with an optional transliteration alias, e.g. the display
/// form "Ərik" carrying alias "Apricot" when written "Ərik (Apricot)".
struct SpeciesName {
    std::string display;
    std::string alias;

    static SpeciesName parse(std::string_view raw);
    std::string full() const; // "display (alias)" or just display

    friend bool operator==(const SpeciesName&, const SpeciesName&) = default;
};

struct KnowledgeChunk {
    std::string id;
    SoilClimateKey key; // normalized
    std::string body;
    std::vector<SpeciesName> species;

    std::vector<std::string> species_names() const; // display forms, in order
};

/// Immutable once loaded; concurrent reads are safe.
class KnowledgeBase {
public:
    /// Load every regular file in `dir` (sorted by filename) as one chunk.
    static KnowledgeBase load_from_dir(const std::filesystem::path& dir);

    /// Build from (chunk id, document text) pairs; used by tests.
    static KnowledgeBase from_documents(
        const std::vector<std::pair<std::string, std::string>>& documents);

    bool empty() const { return chunks_.empty(); }
    std::size_t size() const { return chunks_.size(); }
    const std::vector<KnowledgeChunk>& chunks() const { return chunks_; }
    const KnowledgeChunk& chunk_by_id(std::string_view id) const;

private:
    std::vector<KnowledgeChunk> chunks_; // sorted by id, keys unique
};

/// Parse one KB document. Expected sections: `humidity_mm:` and `soil_type:`
/// heading lines, then a `Suitable Trees:` list with one species per line
/// (`Name: description` or a bare name, optional bullet).
KnowledgeChunk parse_kb_document(std::string_view id, std::string_view text);

struct ScoredChunk {
    const KnowledgeChunk* chunk = nullptr;
    double score = 0.0;
};

/// Soil-token Jaccard overlap plus the humidity proximity term
/// 1/(1 + |delta mm|/100); both weighted 1. An exact key attains the
/// maximum of both terms.
double retrieval_score(const SoilClimateKey& query, const SoilClimateKey& chunk_key);

/// Chunks ranked by descending score, ties by ascending chunk id.
std::vector<ScoredChunk> retrieve_chunks(const SoilClimateKey& key, const KnowledgeBase& kb,
                                         std::size_t top_k = 1);

struct Recommendation {
    SoilClimateKey key;
    std::vector<std::string> species_names;
    std::string source_chunk_id;
    std::string rendered_text;
};

/// Top-1 retrieval rendered through the fixed offline template. The text
/// contains each recommended species name exactly once.
Recommendation recommend_species(const SoilClimateKey& key, const KnowledgeBase& kb);

/// Species-level confusion metrics over a finite universe of candidates.
ClassificationMetrics recommendation_metrics(const std::set<std::string>& recommended,
                                             const std::set<std::string>& truth,
                                             const std::set<std::string>& universe);

// ---- generative gateway -------------------------------------------------

struct GatewayConfig {
    std::string url;     // e.g. https://host:port/generate
    std::string api_key; // sent as a bearer token when nonempty
    int timeout_seconds = 10;

    /// Reads GATEWAY_URL / GATEWAY_KEY; absent URL means no gateway.
    static std::optional<GatewayConfig> from_env();
};

struct GeneratedText {
    std::string text;
    bool generated = false; // false = deterministic template fallback
    std::vector<std::string> warnings;
};

/// POST {"prompt": ...} to the gateway and return its {"text": ...} reply.
/// Any failure (no config, network, non-200, bad payload) falls back to the
/// recommendation's rendered template with generated=false; gateway
/// problems are never fatal.
GeneratedText generate_via_gateway(const Recommendation& recommendation,
                                   const KnowledgeChunk& chunk,
                                   const std::optional<GatewayConfig>& gateway);

// ---- species profiles ----------------------------------------------------

enum class GrowthClass { fast, medium, slow };
enum class GrowthStage { young, mature, old };

std::string_view to_string(GrowthClass c);
std::string_view to_string(GrowthStage s);

/// Canonical age windows: young 5-10, mature 11-20, old 21+ (years since
/// planting, inclusive).
struct StageBounds {
    int start = 0;
    std::optional<int> end;
};
StageBounds canonical_bounds(GrowthStage stage);

struct StageRates {
    GrowthStage stage = GrowthStage::young;
    int start_offset_years = 0;
    std::optional<int> end_offset_years; // absent = open-ended
    double o2_kg_per_tree_year = 0.0;
    double co2_kg_per_tree_year = 0.0;
    double yield_kg_per_tree_year = 0.0;
};

struct SpeciesProfile {
    SpeciesName name;
    GrowthClass growth_class = GrowthClass::medium;
    double spacing_m2 = 0.0; // ground area per tree
    std::vector<StageRates> stages;

    void validate() const;
    /// Stage covering `age`, nullptr before the first stage starts. Throws
    /// ValidationError past the last stage when none is open-ended.
    const StageRates* stage_for_age(int age) const;
};

/// Profiles CSV: name,growing_type,age_stage,timeline_years,o2_kg,co2_kg,
/// yield_kg,spacing_m2 — one row per (species, stage).
std::vector<SpeciesProfile> parse_species_csv(std::string_view content);

} // namespace canopy::species

#endif
