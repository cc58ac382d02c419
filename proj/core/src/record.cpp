#include "toneforge/record.hpp"

#include <nlohmann/json.hpp>

#include "toneforge/errors.hpp"

namespace toneforge {

using json = nlohmann::json;

std::string human_score_to_json(const HumanScore& score) {
    return json{{"value", score.value}, {"annotator_id", score.annotator_id},
                {"scored_at", format_extended(score.scored_at)}}
        .dump();
}

HumanScore human_score_from_json(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw InvariantError(std::string("human_score: ") + e.what());
    }
    if (!doc.is_object() || doc.size() != 3 || !doc.contains("value") || !doc.at("value").is_number_integer() ||
        !doc.contains("annotator_id") || !doc.at("annotator_id").is_string() || !doc.contains("scored_at") ||
        !doc.at("scored_at").is_string())
        throw InvariantError("human_score: expected {value, annotator_id, scored_at}");
    HumanScore score;
    score.value = doc.at("value").get<int>();
    score.annotator_id = doc.at("annotator_id").get<std::string>();
    auto at = parse_extended(doc.at("scored_at").get<std::string>());
    if (!at) throw InvariantError("human_score: scored_at is not an ISO-8601 UTC timestamp");
    score.scored_at = *at;
    if (score.value < 0 || score.value > 3) throw InvariantError("human_score: value must be 0-3");
    return score;
}

void validate_record(const ExampleRecord& r) {
    const std::string where = "record " + std::to_string(r.id) + ": ";
    if (r.id < 1) throw InvariantError(where + "id must be positive");
    if (r.source_text.empty()) throw InvariantError(where + "source_text is empty");
    if (r.synth_model.empty()) throw InvariantError(where + "synth_model is empty");
    if (r.rewrite_text.has_value() != r.rewrite_model.has_value())
        throw InvariantError(where + "rewrite_model must be present exactly when rewrite_text is");
    if (r.rewrite_text && r.rewrite_text->empty()) throw InvariantError(where + "rewrite_text is empty");
    if (r.rewrite_model && r.rewrite_model->empty()) throw InvariantError(where + "rewrite_model is empty");
    if (r.verdict && !r.rewrite_text) throw InvariantError(where + "verdict without rewrite_text");
    if (r.human_score) {
        if (!r.rewrite_text) throw InvariantError(where + "human_score without rewrite_text");
        if (r.human_score->value < 0 || r.human_score->value > 3)
            throw InvariantError(where + "human_score must be 0-3");
    }
    if (r.verdict) {
        for (std::size_t i = 0; i < r.verdict->aspects.size(); ++i) {
            const AspectScore& s = r.verdict->aspects[i];
            if (s.aspect != kAllAspects[i]) throw InvariantError(where + "verdict aspects out of order");
            if (s.grade && (*s.grade < 1 || *s.grade > 3)) throw InvariantError(where + "aspect grade out of range");
        }
    }
}

}  // namespace toneforge
