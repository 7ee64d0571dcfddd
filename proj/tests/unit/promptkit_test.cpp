#include <gtest/gtest.h>

#include <fstream>
#include <json.hpp>

#include "fixtures.hpp"
#include "rhymecheck/errors.hpp"
#include "rhymecheck/promptkit.hpp"

namespace rhymecheck {
namespace {

const std::string kAugment =
    "Replace [*nouns or subject/objects from the poem or rhyme*] with synonyms. Keep the poem rhyme scheme and "
    "sentence formation intact forcefully";
const std::string kRectify =
    "Change the poem to remove gender stereotypes and make sure to keep sentence formation and rhyme scheme close to "
    "the original as much as possible.";

Document jack_and_jill() {
    return fixtures::make_doc("jj", {{"Jack and Jill went up the hill,", 0}, {"To fetch a pail of water.", 0}});
}

Document peter() {
    return fixtures::make_doc("peter", {{"Peter, Peter, pumpkin eater,", 0}, {"Had a wife but couldn't keep her;", 1}});
}

TEST(Prompts, TemplatesAreByteExact) {
    EXPECT_EQ(kAugmentationInstruction, kAugment);
    EXPECT_EQ(kRectificationInstruction, kRectify);
    const auto aug = build_augmentation_prompt(jack_and_jill());
    EXPECT_EQ(aug.prompt_text, kAugment + "\n\nJack and Jill went up the hill,\nTo fetch a pail of water.");
    EXPECT_EQ(aug.kind, PromptKind::augmentation);
    const auto rect = build_rectification_prompt(peter(), true);
    EXPECT_EQ(rect.prompt_text.substr(0, kRectify.size()), kRectify);
    EXPECT_NE(rect.prompt_text.find("Had a wife but couldn't keep her;"), std::string::npos);
}

TEST(Prompts, Preconditions) {
    EXPECT_THROW(build_rectification_prompt(peter(), false), PreconditionError);
    Document child = jack_and_jill();
    child.id = "jj~aug";
    child.provenance = Provenance::augmented;
    child.parent_id = "jj";
    EXPECT_THROW(build_augmentation_prompt(child), PreconditionError);
    EXPECT_EQ(parse_prompt_kind("augment"), PromptKind::augmentation);
    EXPECT_EQ(parse_prompt_kind("rectify"), PromptKind::rectification);
    EXPECT_FALSE(parse_prompt_kind("translate").has_value());
}

TEST(Prompts, TimestampFormat) {
    const Timestamp t = std::chrono::system_clock::time_point{} + std::chrono::seconds(86400 + 3661);
    EXPECT_EQ(format_timestamp(t), "1970-01-02T01:01:01Z");
}

TEST(Register, AugmentationKeepsLabelsWhenLinesAlign) {
    const auto parent = peter();
    const auto job = build_augmentation_prompt(parent);
    const auto doc = register_response(job, "Paul, Paul, squash eater,\nHad a spouse but couldn't keep her;\n", parent);
    EXPECT_EQ(doc.id, "peter~aug");
    EXPECT_EQ(doc.provenance, Provenance::augmented);
    EXPECT_EQ(doc.parent_id, "peter");
    EXPECT_FALSE(doc.needs_annotation);
    ASSERT_EQ(doc.lines.size(), 2u);
    EXPECT_EQ(doc.lines[1].label, Label::stereotypical);

    const auto uneven = register_response(job, "one line only", parent, "custom");
    EXPECT_EQ(uneven.id, "custom");
    EXPECT_TRUE(uneven.needs_annotation);
}

TEST(Register, RectificationAlwaysNeedsAnnotation) {
    const auto parent = peter();
    const auto job = build_rectification_prompt(parent, true);
    const auto doc = register_response(job, "Peter, Peter, pumpkin eater,\nHad a partner, kind and sweeter;", parent);
    EXPECT_EQ(doc.id, "peter~rect");
    EXPECT_EQ(doc.provenance, Provenance::rectified);
    EXPECT_TRUE(doc.needs_annotation);
}

TEST(Register, RejectsEmptyAndBinaryResponses) {
    const auto parent = peter();
    const auto job = build_augmentation_prompt(parent);
    try {
        register_response(job, " \n\t ", parent);
        FAIL();
    } catch (const DataError& e) {
        EXPECT_NE(std::string(e.what()).find("empty response"), std::string::npos);
    }
    try {
        register_response(job, std::string("abc\0def", 7), parent);
        FAIL();
    } catch (const DataError& e) {
        EXPECT_NE(std::string(e.what()).find("unparseable response"), std::string::npos);
    }
    EXPECT_THROW(register_response(job, "\xC3\x28", parent), DataError);
}

TEST(StubClient, ReproducesSynonymExample) {
    StubCompletionClient client;
    const auto job = build_augmentation_prompt(jack_and_jill());
    EXPECT_EQ(client.complete(job.prompt_text), "Jack and Jill went up the mountain,\nTo obtain a bucket of water.");
}

class FlakyClient final : public CompletionClient {
public:
    std::string complete(std::string_view prompt) override {
        if (prompt.find("Peter") != std::string_view::npos) throw CompletionError("service unavailable");
        if (prompt.find("Blank") != std::string_view::npos) return "   ";
        return std::string(prompt.substr(prompt.find("\n\n") + 2));
    }
};

TEST(RunCompletions, KeepsJobOrderAndReportsFailures) {
    std::vector<Document> parents;
    std::vector<PromptJob> jobs;
    for (int i = 0; i < 9; ++i) {
        auto doc = fixtures::make_doc("d" + std::to_string(i), {{i % 3 == 1 ? "Peter line" : i % 3 == 2 ? "Blank" : "ok", 0}});
        jobs.push_back(build_augmentation_prompt(doc));
        parents.push_back(doc);
    }
    const auto journal_path = fixtures::scratch_dir("journal") / "journal.jsonl";
    FlakyClient client;
    {
        PromptJournal journal(journal_path.string());
        const auto outcomes = run_completions(client, jobs, parents, &journal, 4);
        ASSERT_EQ(outcomes.size(), jobs.size());
        for (int i = 0; i < 9; ++i) {
            EXPECT_EQ(outcomes[i].job.doc_id, "d" + std::to_string(i));
            EXPECT_EQ(outcomes[i].document.has_value(), i % 3 == 0) << i;
            if (i % 3 == 1) {
                EXPECT_NE(outcomes[i].error.find("service unavailable"), std::string::npos);
            }
            if (i % 3 == 2) {
                EXPECT_NE(outcomes[i].error.find("empty response"), std::string::npos);
            }
        }
    }
    std::ifstream in(journal_path);
    std::map<std::string, int> events;
    std::string line;
    while (std::getline(in, line)) events[nlohmann::json::parse(line).at("event").get<std::string>()]++;
    EXPECT_EQ(events["job"], 9);
    EXPECT_EQ(events["response"], 3);
    EXPECT_EQ(events["failure"], 6);

    std::vector<PromptJob> orphan{build_augmentation_prompt(jack_and_jill())};
    EXPECT_THROW(run_completions(client, orphan, parents), PreconditionError);
}

TEST(CommandClient, PipesPromptThroughCommand) {
    CommandCompletionClient echo("tail -n +3");
    const auto job = build_augmentation_prompt(jack_and_jill());
    EXPECT_EQ(echo.complete(job.prompt_text), "Jack and Jill went up the hill,\nTo fetch a pail of water.");
    CommandCompletionClient failing("false");
    EXPECT_THROW(failing.complete("x"), CompletionError);
}

}  // namespace
}  // namespace rhymecheck
