#include <gtest/gtest.h>

#include "test_support.hpp"
#include "toneforge/csv_recovery.hpp"
#include "toneforge/errors.hpp"
#include "toneforge/mock_backend.hpp"

using namespace toneforge;

namespace {

ChatRequest request(std::string template_name, std::string user) {
    ChatRequest r;
    r.messages = {{Role::system, "sys"}, {Role::user, std::move(user)}};
    r.template_name = std::move(template_name);
    return r;
}

}  // namespace

TEST(MockBackend, TemplateRuleGivesCannedRewrite) {
    const MockRuleSet rules({tfx::rule("emojify", "beach", tfx::constant("Beach day! [wave]"))});
    ASSERT_EQ(rules.complete(request("rewrite.emojify", "Off to the beach")), "Beach day! [wave]");
    EXPECT_EQ(rules.complete(request("rewrite.emojify", "Off to work")), "Off to work");
}

TEST(MockBackend, SlangMapRemovesBruh) {
    MockTransform t;
    t.kind = MockTransform::Kind::replace;
    t.replacements = {{"feelin'", "feeling"}, {"bruh,", ""}, {"bruh", ""}};
    const MockRuleSet rules({tfx::rule("professional", "", t)});
    const std::string out = rules.complete(request("rewrite.professional", "I was feelin' myself in that outfit, bruh, no lie."));
    EXPECT_EQ(out, "I was feeling myself in that outfit, no lie.");
    EXPECT_EQ(out.find("bruh"), std::string::npos);
}

TEST(MockBackend, NoRuleEchoes) {
    const MockRuleSet rules;
    EXPECT_EQ(rules.complete(request("rewrite.witty", "same text")), "same text");
}

TEST(MockBackend, Pure) {
    const MockRuleSet rules({tfx::rule("", "", tfx::pick({"[1]", "[2]", "[3]"}))});
    const ChatRequest r = request("judge.accuracy", "input 42");
    EXPECT_EQ(rules.complete(r), rules.complete(r));
}

TEST(MockBackend, PickSpreadsOverOptions) {
    const MockRuleSet rules({tfx::rule("", "", tfx::pick({"a", "b", "c", "d"}))});
    std::set<std::string> seen;
    for (int i = 0; i < 40; ++i) seen.insert(rules.complete(request("t", "input " + std::to_string(i))));
    EXPECT_EQ(seen.size(), 4u);
}

TEST(MockBackend, CaptureGroupsAndPlaceholders) {
    const MockRuleSet rules({tfx::rule("", "name=(\\w+)", tfx::constant("hello {1} via {template}: {input}"))});
    EXPECT_EQ(rules.complete(request("tmpl", "name=ada")), "hello ada via tmpl: name=ada");
}

TEST(MockBackend, CsvRowsHonourCountAndYield) {
    const MockRuleSet rules({tfx::rule("generate", "Generate (\\d+)", tfx::csv_rows(1, 0.85, "row {i}, of {template}", true))});
    const std::string reply = rules.complete(request("generate.witty", "Generate 100 sentences"));
    const CsvBlock block = parse_csv_block(reply);
    ASSERT_EQ(block.texts().size(), 85u);
    EXPECT_EQ(block.texts().front(), "row 1, of generate.witty");
}

TEST(MockBackend, FailRaisesCompletionError) {
    const MockRuleSet rules({tfx::rule("", "poison", tfx::fail_with("boom"))});
    EXPECT_THROW(rules.complete(request("t", "poison pill")), CompletionError);
}

TEST(MockBackend, BadPatternIsConfigError) {
    EXPECT_THROW(MockRuleSet({tfx::rule("", "(unclosed", tfx::constant("x"))}), ConfigError);
}

TEST(MockBackend, Fnv1aReferenceValues) {
    EXPECT_EQ(fnv1a(""), 0xcbf29ce484222325ULL);
    EXPECT_EQ(fnv1a("a"), 0xaf63dc4c8601ec8cULL);
}
