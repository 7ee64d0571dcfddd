#include "rhymecheck/corpus.hpp"

#include "rhymecheck/errors.hpp"
#include "rhymecheck/random.hpp"

#include <json.hpp>

#include <algorithm>
#include <limits>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <unordered_map>
#include <unordered_set>

namespace rhymecheck {

using Json = nlohmann::ordered_json;

std::string_view to_string(DocumentKind kind) {
    return kind == DocumentKind::rhyme ? "rhyme" : "poem";
}

std::string_view to_string(Provenance provenance) {
    switch (provenance) {
    case Provenance::original: return "original";
    case Provenance::augmented: return "augmented";
    case Provenance::rectified: return "rectified";
    }
    return "original";
}

std::optional<DocumentKind> parse_document_kind(std::string_view text) {
    if (text == "rhyme") return DocumentKind::rhyme;
    if (text == "poem") return DocumentKind::poem;
    return std::nullopt;
}

std::optional<Provenance> parse_provenance(std::string_view text) {
    if (text == "original") return Provenance::original;
    if (text == "augmented") return Provenance::augmented;
    if (text == "rectified") return Provenance::rectified;
    return std::nullopt;
}

namespace {

bool is_blank(std::string_view text) {
    return std::all_of(text.begin(), text.end(), [](unsigned char c) {
        return c == ' ' || c == '\t' || c == '\v' || c == '\f';
    });
}

const std::unordered_set<std::string> kDocumentFields{
    "id", "title", "kind", "source_language", "lines", "provenance", "parent_id",
    "needs_annotation"};
const std::unordered_set<std::string> kLineFields{"index", "text", "label"};

std::string require_string(const Json& obj, const char* field, std::size_t record) {
    auto it = obj.find(field);
    if (it == obj.end()) throw RecordError(std::string("missing ") + field, record);
    if (!it->is_string()) throw RecordError(std::string(field) + " must be a string", record);
    return it->get<std::string>();
}

Line parse_line(const Json& obj, std::size_t position, std::size_t record) {
    if (!obj.is_object()) throw RecordError("line entry must be an object", record);
    for (const auto& [key, _] : obj.items()) {
        if (!kLineFields.contains(key)) throw RecordError("unknown line field '" + key + "'", record);
    }
    Line line;
    line.index = position;
    if (auto it = obj.find("index"); it != obj.end()) {
        if (!it->is_number_unsigned() || it->get<std::size_t>() != position) {
            throw RecordError("line index does not match its position", record);
        }
    }
    line.text = require_string(obj, "text", record);
    auto label = obj.find("label");
    if (label == obj.end()) throw RecordError("missing label", record);
    if (!label->is_number_integer()) throw RecordError("label outside {0,1}", record);
    const auto value = label->get<long long>();
    if (value != 0 && value != 1) throw RecordError("label outside {0,1}", record);
    line.label = label_from_bool(value == 1);
    return line;
}

Document parse_record(const std::string& text, std::size_t record) {
    Json obj;
    try {
        obj = Json::parse(text);
    } catch (const Json::exception& e) {
        throw RecordError(std::string("malformed record (") + e.what() + ")", record);
    }
    if (!obj.is_object()) throw RecordError("malformed record (expected an object)", record);
    for (const auto& [key, _] : obj.items()) {
        if (!kDocumentFields.contains(key)) throw RecordError("unknown field '" + key + "'", record);
    }

    Document doc;
    doc.id = require_string(obj, "id", record);
    if (obj.contains("title")) doc.title = require_string(obj, "title", record);
    const auto kind = parse_document_kind(require_string(obj, "kind", record));
    if (!kind) throw RecordError("kind must be rhyme or poem", record);
    doc.kind = *kind;
    if (obj.contains("source_language")) doc.source_language = require_string(obj, "source_language", record);
    if (obj.contains("provenance")) {
        const auto provenance = parse_provenance(require_string(obj, "provenance", record));
        if (!provenance) throw RecordError("unknown provenance", record);
        doc.provenance = *provenance;
    }
    if (auto it = obj.find("parent_id"); it != obj.end() && !it->is_null()) {
        doc.parent_id = require_string(obj, "parent_id", record);
    }
    if (auto it = obj.find("needs_annotation"); it != obj.end()) {
        if (!it->is_boolean()) throw RecordError("needs_annotation must be a boolean", record);
        doc.needs_annotation = it->get<bool>();
    }

    auto lines = obj.find("lines");
    if (lines == obj.end()) throw RecordError("missing lines", record);
    if (!lines->is_array()) throw RecordError("lines must be an array", record);
    for (std::size_t i = 0; i < lines->size(); ++i) doc.lines.push_back(parse_line((*lines)[i], i, record));

    try {
        validate_document(doc);
    } catch (const DataError& e) {
        throw RecordError(e.what(), record);
    }
    return doc;
}

Json to_json(const Document& doc) {
    Json obj;
    obj["id"] = doc.id;
    obj["title"] = doc.title;
    obj["kind"] = to_string(doc.kind);
    obj["source_language"] = doc.source_language;
    obj["provenance"] = to_string(doc.provenance);
    if (doc.parent_id) obj["parent_id"] = *doc.parent_id;
    if (doc.needs_annotation) obj["needs_annotation"] = true;
    Json lines = Json::array();
    for (const auto& line : doc.lines) {
        lines.push_back(Json{{"text", line.text}, {"label", is_positive(line.label) ? 1 : 0}});
    }
    obj["lines"] = std::move(lines);
    return obj;
}

}  // namespace

void validate_document(const Document& doc) {
    if (doc.id.empty()) throw DataError("empty document id");
    if (doc.lines.empty()) throw DataError("document '" + doc.id + "' has no lines");
    for (std::size_t i = 0; i < doc.lines.size(); ++i) {
        const auto& line = doc.lines[i];
        if (line.index != i) throw DataError("line index mismatch in '" + doc.id + "'");
        if (line.text.find_first_of("\r\n") != std::string::npos) {
            throw DataError("line " + std::to_string(i) + " of '" + doc.id + "' contains a line break");
        }
        if (is_blank(line.text)) {
            throw DataError("line " + std::to_string(i) + " of '" + doc.id + "' is empty");
        }
    }
    if (doc.provenance == Provenance::original && doc.parent_id) {
        throw DataError("original document '" + doc.id + "' must not have a parent_id");
    }
    if (doc.provenance != Provenance::original && !doc.parent_id) {
        throw DataError("generated document '" + doc.id + "' requires a parent_id");
    }
}

void validate_corpus(const std::vector<Document>& docs) {
    std::unordered_set<std::string_view> ids;
    for (const auto& doc : docs) {
        validate_document(doc);
        if (!ids.insert(doc.id).second) throw DataError("duplicate id '" + doc.id + "'");
    }
    for (const auto& doc : docs) {
        if (doc.parent_id && !ids.contains(*doc.parent_id)) {
            throw DataError("dangling parent '" + *doc.parent_id + "' of '" + doc.id + "'");
        }
    }
}

std::vector<Document> parse_corpus(std::istream& in) {
    std::vector<Document> docs;
    std::unordered_map<std::string, std::size_t> record_of;
    std::string text;
    std::size_t record = 0;
    while (std::getline(in, text)) {
        if (!text.empty() && text.back() == '\r') text.pop_back();
        if (is_blank(text)) continue;
        ++record;
        Document doc = parse_record(text, record);
        if (!record_of.emplace(doc.id, record).second) {
            throw RecordError("duplicate id '" + doc.id + "'", record);
        }
        docs.push_back(std::move(doc));
    }
    for (const auto& doc : docs) {
        if (doc.parent_id && !record_of.contains(*doc.parent_id)) {
            throw RecordError("dangling parent '" + *doc.parent_id + "'", record_of.at(doc.id));
        }
    }
    return docs;
}

std::vector<Document> load_corpus(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open corpus file '" + path + "'");
    return parse_corpus(in);
}

void write_document(std::ostream& out, const Document& doc) {
    out << to_json(doc).dump(-1, ' ', false, Json::error_handler_t::strict) << '\n';
}

void serialize_corpus(std::ostream& out, const std::vector<Document>& docs) {
    for (const auto& doc : docs) write_document(out, doc);
}

void save_corpus(const std::string& path, const std::vector<Document>& docs) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write corpus file '" + path + "'");
    serialize_corpus(out, docs);
}

Label document_label(const Document& doc) {
    const bool any = std::any_of(doc.lines.begin(), doc.lines.end(),
                                 [](const Line& line) { return is_positive(line.label); });
    return label_from_bool(any);
}

namespace {

constexpr std::size_t kPartitions = 3;

// Largest-remainder apportionment of `total` over `weights` (which sum to 1).
std::array<std::size_t, kPartitions> apportion(std::size_t total, const std::array<double, kPartitions>& weights) {
    std::array<std::size_t, kPartitions> counts{};
    std::array<double, kPartitions> remainder{};
    std::size_t assigned = 0;
    for (std::size_t p = 0; p < kPartitions; ++p) {
        const double ideal = static_cast<double>(total) * weights[p];
        counts[p] = static_cast<std::size_t>(std::floor(ideal + 1e-9));
        remainder[p] = ideal - static_cast<double>(counts[p]);
        assigned += counts[p];
    }
    std::array<std::size_t, kPartitions> order{0, 1, 2};
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
    for (std::size_t i = 0; assigned < total; i = (i + 1) % kPartitions) {
        if (weights[order[i]] > 0.0) {
            ++counts[order[i]];
            ++assigned;
        }
    }
    return counts;
}

const Document& root_of(const Document& doc, const std::unordered_map<std::string_view, const Document*>& by_id) {
    const Document* current = &doc;
    for (std::size_t hops = 0; current->parent_id; ++hops) {
        if (hops > by_id.size()) throw DataError("provenance cycle through '" + doc.id + "'");
        auto it = by_id.find(*current->parent_id);
        if (it == by_id.end()) throw DataError("dangling parent '" + *current->parent_id + "'");
        current = it->second;
    }
    return *current;
}

}  // namespace

CorpusSplit split_corpus(const std::vector<Document>& docs, SplitRatios ratios, std::uint64_t seed) {
    const std::array<double, kPartitions> weights{ratios.train, ratios.validation, ratios.test};
    for (double w : weights) {
        if (!(w >= 0.0)) throw PreconditionError("split ratios must be nonnegative");
    }
    if (std::abs(weights[0] + weights[1] + weights[2] - 1.0) > 1e-9) {
        throw PreconditionError("split ratios must sum to 1");
    }

    std::unordered_map<std::string_view, const Document*> by_id;
    for (const auto& doc : docs) {
        if (!by_id.emplace(doc.id, &doc).second) throw DataError("duplicate id '" + doc.id + "'");
    }

    // Lineage groups keyed by root, in first-appearance order of the root.
    std::vector<std::string_view> roots;
    std::unordered_map<std::string_view, std::vector<std::string_view>> members;
    for (const auto& doc : docs) {
        const Document& root = root_of(doc, by_id);
        auto [it, inserted] = members.try_emplace(root.id);
        it->second.push_back(doc.id);
        if (inserted) roots.push_back(root.id);
    }

    std::array<std::vector<std::string_view>, 2> strata;
    for (auto root : roots) {
        strata[is_positive(document_label(*by_id.at(root))) ? 1 : 0].push_back(root);
    }
    for (const auto& stratum : strata) {
        if (stratum.empty()) {
            throw PreconditionError("split requires documents of both classes");
        }
    }

    // Per-class quotas: each cell is the floor or ceiling of its ideal share, rows sum to the class
    // sizes and columns to the overall apportionment. With two classes the first row fixes the
    // second, so trying the floor/ceiling choices of the first row is exhaustive. Such a rounding
    // always exists for a two-way table.
    const auto targets = apportion(roots.size(), weights);
    std::array<std::array<double, kPartitions>, 2> ideal{};
    for (std::size_t c = 0; c < 2; ++c) {
        for (std::size_t p = 0; p < kPartitions; ++p) ideal[c][p] = static_cast<double>(strata[c].size()) * weights[p];
    }
    auto rounded = [](double x, bool up) {
        return static_cast<long>(up ? std::ceil(x - 1e-9) : std::floor(x + 1e-9));
    };
    std::array<std::array<std::size_t, kPartitions>, 2> quota{};
    double best_error = std::numeric_limits<double>::infinity();
    for (unsigned mask = 0; mask < (1u << kPartitions); ++mask) {
        std::array<long, kPartitions> first{}, second{};
        long first_total = 0;
        bool feasible = true;
        double error = 0.0;
        for (std::size_t p = 0; p < kPartitions; ++p) {
            first[p] = rounded(ideal[0][p], (mask >> p) & 1u);
            second[p] = static_cast<long>(targets[p]) - first[p];
            first_total += first[p];
            feasible = feasible && second[p] >= rounded(ideal[1][p], false) && second[p] <= rounded(ideal[1][p], true);
            error += std::abs(static_cast<double>(first[p]) - ideal[0][p]) +
                     std::abs(static_cast<double>(second[p]) - ideal[1][p]);
        }
        if (!feasible || first_total != static_cast<long>(strata[0].size()) || !(error < best_error - 1e-12)) continue;
        best_error = error;
        for (std::size_t p = 0; p < kPartitions; ++p) {
            quota[0][p] = static_cast<std::size_t>(first[p]);
            quota[1][p] = static_cast<std::size_t>(second[p]);
        }
    }
    if (best_error == std::numeric_limits<double>::infinity()) throw std::logic_error("no consistent split quotas");

    CorpusSplit split;
    split.seed = seed;
    split.ratios = ratios;
    std::array<std::vector<std::string>*, kPartitions> outputs{&split.train, &split.validation, &split.test};
    SplitMix64 rng(seed);
    for (std::size_t c = 0; c < 2; ++c) {
        auto shuffled = strata[c];
        shuffle(shuffled, rng);
        std::size_t cursor = 0;
        for (std::size_t p = 0; p < kPartitions; ++p) {
            for (std::size_t k = 0; k < quota[c][p]; ++k, ++cursor) {
                for (auto id : members.at(shuffled[cursor])) outputs[p]->emplace_back(id);
            }
        }
    }
    // Partition contents follow corpus order, independent of the shuffle.
    std::unordered_map<std::string_view, std::size_t> position;
    for (std::size_t i = 0; i < docs.size(); ++i) position.emplace(docs[i].id, i);
    for (auto* out : outputs) {
        std::sort(out->begin(), out->end(),
                  [&](const std::string& a, const std::string& b) { return position.at(a) < position.at(b); });
    }
    return split;
}

CorpusStats corpus_stats(const std::vector<Document>& docs) {
    CorpusStats stats;
    auto add = [](CorpusStats::Row& row, std::size_t verses, std::size_t lines) {
        row.verses += verses;
        row.lines += lines;
    };
    for (const auto& doc : docs) {
        add(stats.total_with_generated, 1, doc.lines.size());
        if (doc.needs_annotation) {
            add(stats.unannotated, 1, doc.lines.size());
            continue;
        }
        if (doc.provenance == Provenance::augmented) {
            add(stats.augmented, 1, doc.lines.size());
            continue;
        }
        if (doc.provenance == Provenance::rectified) {
            add(stats.rectified, 1, doc.lines.size());
            continue;
        }
        add(stats.total_original, 1, doc.lines.size());
        const bool rhyme = doc.kind == DocumentKind::rhyme;
        auto& positive = rhyme ? stats.stereotypical_rhymes : stats.stereotypical_poems;
        auto& negative = rhyme ? stats.non_stereotypical_rhymes : stats.non_stereotypical_poems;
        // Verses are counted by document label, lines by their own label.
        (is_positive(document_label(doc)) ? positive : negative).verses += 1;
        for (const auto& line : doc.lines) (is_positive(line.label) ? positive : negative).lines += 1;
    }
    return stats;
}

}  // namespace rhymecheck
