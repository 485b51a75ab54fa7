#include "canopy/species.hpp"

#include "canopy/csv.hpp"
#include "canopy/errors.hpp"
#include "canopy/text.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace canopy::species {

namespace {

std::optional<double> parse_double(std::string_view s) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ArgumentError(fmt::format("cannot open '{}'", path.string()));
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string strip_bullet(std::string_view line) {
    std::string s = text::trim(line);
    while (!s.empty() && (s.front() == '-' || s.front() == '*' || s.front() == '+')) {
        s = text::trim(std::string_view(s).substr(1));
    }
    return s;
}

} // namespace

SoilClimateKey SoilClimateKey::normalized() const {
    return {humidity_mm, text::normalize_label(soil_type)};
}

void SoilClimateKey::validate() const {
    if (!(humidity_mm > 0.0) || !std::isfinite(humidity_mm)) {
        throw ValidationError(fmt::format("humidity_mm must be positive, got {}", humidity_mm));
    }
    if (text::normalize_label(soil_type).empty()) {
        throw ValidationError("soil_type is empty");
    }
}

SpeciesName SpeciesName::parse(std::string_view raw) {
    std::string s = text::trim(raw);
    SpeciesName name;
    const std::size_t open = s.rfind('(');
    if (open != std::string::npos && s.back() == ')') {
        name.display = text::trim(std::string_view(s).substr(0, open));
        name.alias = text::trim(std::string_view(s).substr(open + 1, s.size() - open - 2));
    }
    if (name.display.empty()) {
        name.display = s;
        name.alias.clear();
    }
    return name;
}

std::string SpeciesName::full() const {
    return alias.empty() ? display : fmt::format("{} ({})", display, alias);
}

std::vector<std::string> KnowledgeChunk::species_names() const {
    std::vector<std::string> out;
    out.reserve(species.size());
    for (const auto& name : species) out.push_back(name.display);
    return out;
}

KnowledgeChunk parse_kb_document(std::string_view id, std::string_view text_body) {
    KnowledgeChunk chunk;
    chunk.id = std::string(id);
    chunk.body = std::string(text_body);

    std::optional<double> humidity;
    std::optional<std::string> soil;
    bool in_species = false;
    std::set<std::string> seen;

    std::istringstream lines{chunk.body};
    for (std::string line; std::getline(lines, line);) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::string trimmed = text::trim(line);
        const std::string norm = text::normalize_label(trimmed);
        if (norm.rfind("humidity_mm:", 0) == 0) {
            auto v = parse_double(text::trim(std::string_view(trimmed).substr(
                trimmed.find(':') + 1)));
            if (!v) {
                throw ValidationError(fmt::format("chunk '{}': bad humidity_mm line", chunk.id));
            }
            humidity = v;
            in_species = false;
            continue;
        }
        if (norm.rfind("soil_type:", 0) == 0) {
            soil = text::trim(std::string_view(trimmed).substr(trimmed.find(':') + 1));
            in_species = false;
            continue;
        }
        if (norm == "suitable trees:") {
            in_species = true;
            continue;
        }
        if (!in_species || trimmed.empty()) continue;

        const std::string entry = strip_bullet(trimmed);
        if (entry.empty()) continue;
        const std::size_t colon = entry.find(':');
        const auto name = SpeciesName::parse(
            colon == std::string::npos ? entry : entry.substr(0, colon));
        if (name.display.empty()) {
            throw ValidationError(fmt::format("chunk '{}': empty species name", chunk.id));
        }
        if (!seen.insert(text::normalize_label(name.display)).second) {
            throw ValidationError(fmt::format("chunk '{}': duplicate species '{}'",
                                              chunk.id, name.display));
        }
        chunk.species.push_back(name);
    }

    if (!humidity) {
        throw ValidationError(fmt::format("chunk '{}': missing humidity_mm", chunk.id));
    }
    if (!soil) {
        throw ValidationError(fmt::format("chunk '{}': missing soil_type", chunk.id));
    }
    if (chunk.species.empty()) {
        throw ValidationError(fmt::format("chunk '{}': missing 'Suitable Trees:' species list",
                                          chunk.id));
    }
    chunk.key = SoilClimateKey{*humidity, *soil}.normalized();
    chunk.key.validate();
    return chunk;
}

KnowledgeBase KnowledgeBase::load_from_dir(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) {
        throw ArgumentError(fmt::format("knowledge base directory '{}' does not exist",
                                        dir.string()));
    }
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.is_regular_file()) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    std::vector<std::pair<std::string, std::string>> documents;
    for (const auto& path : files) {
        documents.emplace_back(path.stem().string(), read_file(path));
    }
    return from_documents(documents);
}

KnowledgeBase KnowledgeBase::from_documents(
    const std::vector<std::pair<std::string, std::string>>& documents) {
    KnowledgeBase kb;
    std::map<std::pair<double, std::string>, std::string> keys_seen;
    for (const auto& [id, body] : documents) {
        KnowledgeChunk chunk = parse_kb_document(id, body);
        auto key = std::make_pair(chunk.key.humidity_mm, chunk.key.soil_type);
        auto [it, inserted] = keys_seen.emplace(key, chunk.id);
        if (!inserted) {
            throw ValidationError(fmt::format(
                "ambiguous key: chunks '{}' and '{}' share humidity {} and soil '{}'",
                it->second, chunk.id, chunk.key.humidity_mm, chunk.key.soil_type));
        }
        kb.chunks_.push_back(std::move(chunk));
    }
    std::sort(kb.chunks_.begin(), kb.chunks_.end(),
              [](const KnowledgeChunk& a, const KnowledgeChunk& b) { return a.id < b.id; });
    return kb;
}

const KnowledgeChunk& KnowledgeBase::chunk_by_id(std::string_view id) const {
    for (const auto& chunk : chunks_) {
        if (chunk.id == id) return chunk;
    }
    throw ArgumentError(fmt::format("no chunk with id '{}'", id));
}

double retrieval_score(const SoilClimateKey& query, const SoilClimateKey& chunk_key) {
    const auto qt = text::tokens(query.soil_type);
    const auto ct = text::tokens(chunk_key.soil_type);
    const std::set<std::string> qs(qt.begin(), qt.end());
    const std::set<std::string> cs(ct.begin(), ct.end());
    std::size_t common = 0;
    for (const auto& tok : qs) common += cs.contains(tok) ? 1 : 0;
    const std::size_t uni = qs.size() + cs.size() - common;
    const double jaccard = uni == 0 ? 0.0
                                    : static_cast<double>(common) / static_cast<double>(uni);
    const double proximity =
        1.0 / (1.0 + std::abs(query.humidity_mm - chunk_key.humidity_mm) / 100.0);
    return jaccard + proximity;
}

std::vector<ScoredChunk> retrieve_chunks(const SoilClimateKey& key, const KnowledgeBase& kb,
                                         std::size_t top_k) {
    if (kb.empty()) {
        throw ArgumentError("retrieval over an empty knowledge base");
    }
    if (top_k < 1) {
        throw ArgumentError("top_k must be at least 1");
    }
    key.validate();
    const auto query = key.normalized();
    std::vector<ScoredChunk> scored;
    scored.reserve(kb.size());
    for (const auto& chunk : kb.chunks()) {
        scored.push_back({&chunk, retrieval_score(query, chunk.key)});
    }
    std::sort(scored.begin(), scored.end(), [](const ScoredChunk& a, const ScoredChunk& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.chunk->id < b.chunk->id;
    });
    if (scored.size() > top_k) scored.resize(top_k);
    return scored;
}

Recommendation recommend_species(const SoilClimateKey& key, const KnowledgeBase& kb) {
    const auto ranked = retrieve_chunks(key, kb, 1);
    const KnowledgeChunk& chunk = *ranked.front().chunk;

    Recommendation rec;
    rec.key = key;
    rec.species_names = chunk.species_names();
    rec.source_chunk_id = chunk.id;

    std::string text;
    text += fmt::format("Soil Type: {}, Humidity Level: {}\n", key.soil_type,
                        csv::format_number(key.humidity_mm));
    text += "Recommended Tree Species:\n";
    text += fmt::format(
        "The following tree species are suitable for humidity {} mm with {}:\n",
        csv::format_number(key.humidity_mm), key.soil_type);
    for (const auto& name : rec.species_names) {
        text += fmt::format("* {}\n", name);
    }
    rec.rendered_text = std::move(text);
    return rec;
}

ClassificationMetrics recommendation_metrics(const std::set<std::string>& recommended,
                                             const std::set<std::string>& truth,
                                             const std::set<std::string>& universe) {
    if (universe.empty()) {
        throw ArgumentError("universe must be nonempty");
    }
    for (const auto& s : recommended) {
        if (!universe.contains(s)) {
            throw ArgumentError(fmt::format("recommended species '{}' not in the universe", s));
        }
    }
    for (const auto& s : truth) {
        if (!universe.contains(s)) {
            throw ArgumentError(fmt::format("truth species '{}' not in the universe", s));
        }
    }
    std::int64_t tp = 0, fp = 0, fn = 0, tn = 0;
    for (const auto& s : universe) {
        const bool rec = recommended.contains(s);
        const bool tru = truth.contains(s);
        if (rec && tru) ++tp;
        else if (rec) ++fp;
        else if (tru) ++fn;
        else ++tn;
    }
    return metrics_from_confusion(tp, fp, fn, tn);
}

// ---- species profiles ----------------------------------------------------

std::string_view to_string(GrowthClass c) {
    switch (c) {
    case GrowthClass::fast: return "fast";
    case GrowthClass::medium: return "medium";
    case GrowthClass::slow: return "slow";
    }
    return "medium";
}

std::string_view to_string(GrowthStage s) {
    switch (s) {
    case GrowthStage::young: return "young";
    case GrowthStage::mature: return "mature";
    case GrowthStage::old: return "old";
    }
    return "young";
}

StageBounds canonical_bounds(GrowthStage stage) {
    switch (stage) {
    case GrowthStage::young: return {5, 10};
    case GrowthStage::mature: return {11, 20};
    case GrowthStage::old: return {21, std::nullopt};
    }
    return {5, 10};
}

namespace {

GrowthClass parse_growth_class(std::string_view raw, std::size_t row_no) {
    const std::string norm = text::normalize_label(raw);
    if (norm.find("fast") != std::string::npos) return GrowthClass::fast;
    if (norm.find("medium") != std::string::npos) return GrowthClass::medium;
    if (norm.find("slow") != std::string::npos) return GrowthClass::slow;
    throw ParseError(fmt::format("row {}: unknown growing type '{}'", row_no, raw));
}

GrowthStage parse_stage(std::string_view raw, std::size_t row_no) {
    const std::string norm = text::normalize_label(raw);
    if (norm == "young") return GrowthStage::young;
    if (norm == "mature") return GrowthStage::mature;
    if (norm == "old") return GrowthStage::old;
    throw ParseError(fmt::format("row {}: unknown age stage '{}'", row_no, raw));
}

} // namespace

void SpeciesProfile::validate() const {
    if (name.display.empty()) throw ValidationError("species name is empty");
    if (!(spacing_m2 > 0.0) || !std::isfinite(spacing_m2)) {
        throw ValidationError(fmt::format("species '{}': spacing_m2 must be positive",
                                          name.display));
    }
    if (stages.empty()) {
        throw ValidationError(fmt::format("species '{}': no growth stages", name.display));
    }
    // Stages must be the contiguous prefix young[, mature[, old]] with the
    // canonical age windows.
    constexpr GrowthStage order[] = {GrowthStage::young, GrowthStage::mature,
                                     GrowthStage::old};
    if (stages.size() > 3) {
        throw ValidationError(fmt::format("species '{}': too many stages", name.display));
    }
    for (std::size_t i = 0; i < stages.size(); ++i) {
        const auto& st = stages[i];
        if (st.stage != order[i]) {
            throw ValidationError(fmt::format(
                "species '{}': stages must run young, mature, old without holes",
                name.display));
        }
        const auto canon = canonical_bounds(st.stage);
        if (st.start_offset_years != canon.start || st.end_offset_years != canon.end) {
            throw ValidationError(fmt::format(
                "species '{}': stage '{}' must span years {}..{}", name.display,
                to_string(st.stage), canon.start,
                canon.end ? fmt::format("{}", *canon.end) : "open"));
        }
        if (st.o2_kg_per_tree_year < 0.0 || st.co2_kg_per_tree_year < 0.0 ||
            st.yield_kg_per_tree_year < 0.0) {
            throw ValidationError(fmt::format("species '{}': negative stage rate",
                                              name.display));
        }
    }
}

const StageRates* SpeciesProfile::stage_for_age(int age) const {
    if (stages.empty()) {
        throw ValidationError(fmt::format("species '{}': no growth stages", name.display));
    }
    if (age < stages.front().start_offset_years) return nullptr;
    for (const auto& st : stages) {
        if (age >= st.start_offset_years &&
            (!st.end_offset_years || age <= *st.end_offset_years)) {
            return &st;
        }
    }
    throw ValidationError(fmt::format(
        "species '{}': age {} is past the last defined stage and none is open-ended",
        name.display, age));
}

std::vector<SpeciesProfile> parse_species_csv(std::string_view content) {
    const auto table = csv::parse(content);
    if (table.empty() || table.front().empty() ||
        text::normalize_label(table.front()[0]) != "name") {
        throw ParseError("species CSV: missing header row starting with 'name'");
    }
    constexpr std::size_t kColumns = 8;
    if (table.front().size() != kColumns) {
        throw ParseError(fmt::format("species CSV: expected {} columns", kColumns));
    }

    std::vector<SpeciesProfile> profiles; // in first-appearance order
    auto find_profile = [&](const std::string& display) -> SpeciesProfile* {
        for (auto& p : profiles) {
            if (p.name.display == display) return &p;
        }
        return nullptr;
    };

    for (std::size_t r = 1; r < table.size(); ++r) {
        const auto& row = table[r];
        const std::size_t row_no = r + 1;
        if (row.size() != kColumns) {
            throw ParseError(fmt::format("row {}: expected {} columns, found {}", row_no,
                                         kColumns, row.size()));
        }
        const auto name = SpeciesName::parse(row[0]);
        const auto growth = parse_growth_class(row[1], row_no);
        const auto stage = parse_stage(row[2], row_no);
        const auto start = parse_double(row[3]);
        const auto o2 = parse_double(row[4]);
        const auto co2 = parse_double(row[5]);
        const auto yield = parse_double(row[6]);
        const auto spacing = parse_double(row[7]);
        if (!start || !o2 || !co2 || !yield || !spacing) {
            throw ParseError(fmt::format("row {}: non-numeric rate column", row_no));
        }

        StageRates rates;
        rates.stage = stage;
        rates.start_offset_years = static_cast<int>(*start);
        rates.end_offset_years = canonical_bounds(stage).end;
        rates.o2_kg_per_tree_year = *o2;
        rates.co2_kg_per_tree_year = *co2;
        rates.yield_kg_per_tree_year = *yield;

        if (auto* existing = find_profile(name.display)) {
            if (existing->spacing_m2 != *spacing) {
                throw ValidationError(fmt::format(
                    "row {}: species '{}' has conflicting spacing values", row_no,
                    name.display));
            }
            existing->stages.push_back(rates);
        } else {
            SpeciesProfile p;
            p.name = name;
            p.growth_class = growth;
            p.spacing_m2 = *spacing;
            p.stages.push_back(rates);
            profiles.push_back(std::move(p));
        }
    }

    for (auto& p : profiles) {
        std::sort(p.stages.begin(), p.stages.end(),
                  [](const StageRates& a, const StageRates& b) {
                      return a.start_offset_years < b.start_offset_years;
                  });
        p.validate();
    }
    return profiles;
}

} // namespace canopy::species
