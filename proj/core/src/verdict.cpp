#include "toneforge/verdict.hpp"

#include <cmath>
#include <set>

#include <nlohmann/json.hpp>

#include "toneforge/errors.hpp"

namespace toneforge {

using json = nlohmann::json;

std::string_view to_string(Aspect aspect) noexcept {
    switch (aspect) {
        case Aspect::accuracy: return "accuracy";
        case Aspect::completeness: return "completeness";
        case Aspect::coherence: return "coherence";
        case Aspect::conciseness: return "conciseness";
    }
    return "";
}

std::optional<Aspect> try_parse_aspect(std::string_view text) noexcept {
    for (Aspect a : kAllAspects) {
        if (to_string(a) == text) return a;
    }
    return std::nullopt;
}

bool JudgeVerdict::all_graded() const noexcept {
    for (const AspectScore& s : aspects) {
        if (!s.grade) return false;
    }
    return true;
}

bool JudgeVerdict::valid() const noexcept {
    if (!is_rewrite) return false;
    return !*is_rewrite || all_graded();
}

std::optional<double> JudgeVerdict::mean_grade() const noexcept {
    if (!all_graded()) return std::nullopt;
    int sum = 0;
    for (const AspectScore& s : aspects) sum += *s.grade;
    return static_cast<double>(sum) / 4.0;
}

std::optional<double> JudgeVerdict::normalized() const noexcept {
    if (!valid()) return std::nullopt;
    if (!*is_rewrite) return 0.0;
    return normalize_mean(*mean_grade());
}

JudgeVerdict make_verdict(const std::array<int, 4>& grades, bool is_rewrite, std::string judge_model) {
    JudgeVerdict v;
    for (std::size_t i = 0; i < 4; ++i) {
        if (grades[i] < 1 || grades[i] > 3) throw InvariantError("aspect grade must be 1, 2 or 3");
        v.aspects[i].grade = grades[i];
    }
    v.is_rewrite = is_rewrite;
    v.judge_model = std::move(judge_model);
    return v;
}

namespace {

json optional_number(std::optional<double> value) { return value ? json(*value) : json(nullptr); }

[[noreturn]] void bad(const std::string& what) { throw InvariantError("verdict_json: " + what); }

void expect_match(const json& doc, const char* key, std::optional<double> expected) {
    if (!doc.contains(key)) return;
    const json& v = doc.at(key);
    if (v.is_null()) {
        if (expected) bad(std::string(key) + " is null but grades define it");
        return;
    }
    if (!v.is_number()) bad(std::string(key) + " must be a number");
    if (!expected || std::abs(v.get<double>() - *expected) > 1e-9) bad(std::string(key) + " disagrees with the grades");
}

}  // namespace

std::string verdict_to_json(const JudgeVerdict& verdict) {
    json aspects = json::array();
    for (const AspectScore& s : verdict.aspects) {
        aspects.push_back({{"aspect", to_string(s.aspect)},
                           {"grade", s.grade ? json(*s.grade) : json(nullptr)},
                           {"rationale", s.rationale}});
    }
    json doc = {
        {"aspects", std::move(aspects)},
        {"is_rewrite", verdict.is_rewrite ? json(*verdict.is_rewrite) : json(nullptr)},
        {"mean_grade", optional_number(verdict.mean_grade())},
        {"normalized", optional_number(verdict.normalized())},
        {"judge_model", verdict.judge_model},
    };
    return doc.dump();
}

JudgeVerdict verdict_from_json(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        bad(e.what());
    }
    if (!doc.is_object()) bad("expected an object");
    static const std::set<std::string> known = {"aspects", "is_rewrite", "mean_grade", "normalized", "judge_model"};
    for (const auto& [key, _] : doc.items()) {
        if (!known.contains(key)) bad("unknown key '" + key + "'");
    }

    JudgeVerdict v;
    const json& aspects = doc.value("aspects", json());
    if (!aspects.is_array() || aspects.size() != 4) bad("aspects must hold exactly four entries");
    std::set<Aspect> seen;
    for (const json& entry : aspects) {
        if (!entry.is_object() || !entry.contains("aspect") || !entry.at("aspect").is_string()) bad("malformed aspect");
        auto aspect = try_parse_aspect(entry.at("aspect").get<std::string>());
        if (!aspect || !seen.insert(*aspect).second) bad("unknown or repeated aspect");
        AspectScore& slot = v.aspects[static_cast<std::size_t>(*aspect)];
        const json& grade = entry.value("grade", json());
        if (grade.is_number_integer()) {
            const int g = grade.get<int>();
            if (g < 1 || g > 3) bad("grade out of range");
            slot.grade = g;
        } else if (!grade.is_null()) {
            bad("grade must be an integer or null");
        }
        const json& rationale = entry.value("rationale", json(""));
        if (!rationale.is_string()) bad("rationale must be a string");
        slot.rationale = rationale.get<std::string>();
    }

    const json& is_rewrite = doc.value("is_rewrite", json());
    if (is_rewrite.is_boolean()) {
        v.is_rewrite = is_rewrite.get<bool>();
    } else if (!is_rewrite.is_null()) {
        bad("is_rewrite must be a boolean or null");
    }
    const json& model = doc.value("judge_model", json(""));
    if (!model.is_string()) bad("judge_model must be a string");
    v.judge_model = model.get<std::string>();

    expect_match(doc, "mean_grade", v.mean_grade());
    expect_match(doc, "normalized", v.normalized());
    return v;
}

}  // namespace toneforge
