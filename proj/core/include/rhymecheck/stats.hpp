#pragma once

// Inter-annotator reliability and the rectification-survey statistics.

#include "rhymecheck/corpus.hpp"

#include <array>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace rhymecheck {

// Two raters, binary nominal labels, no missing entries.
struct AgreementTable {
    std::vector<std::pair<Label, Label>> items;
};

// Krippendorff's alpha, 1 - D_o / D_e, from the coincidence matrix. Throws
// PreconditionError for fewer than two items and DataError("degenerate agreement data")
// when only one label value occurs (D_e = 0).
double krippendorff_alpha(const AgreementTable& table);

struct TTestResult {
    double t = 0.0;
    std::size_t df = 0;
    double p_two_tailed = 1.0;
};

// Paired t-test on d = x - y with the n-1 sample deviation. Throws PreconditionError on
// length mismatch or n < 2 and DataError("zero variance") when all differences are equal.
TTestResult paired_ttest(std::span<const double> x, std::span<const double> y);

// Student-t CDF through the regularised incomplete beta function. df >= 1.
double t_cdf(double t, double df);

// Regularised incomplete beta I_x(a, b) by Lentz's continued fraction.
double regularized_incomplete_beta(double x, double a, double b);

enum class SurveyChoice { human, llm, no_difference };

std::string_view to_string(SurveyChoice choice);
std::optional<SurveyChoice> parse_survey_choice(std::string_view text);

enum class SurveyQuestion { q3, q4 };

// Ratings are indexed [human, llm] and lie in [1, 5].
struct SurveyRecord {
    std::string participant;
    std::string item;
    std::array<int, 2> reduction{};
    std::array<int, 2> creativity{};
    SurveyChoice q3 = SurveyChoice::no_difference;
    SurveyChoice q4 = SurveyChoice::no_difference;
};

struct ChoiceCounts {
    std::size_t human = 0;
    std::size_t llm = 0;
    std::size_t no_difference = 0;

    std::size_t total() const { return human + llm + no_difference; }
    friend bool operator==(const ChoiceCounts&, const ChoiceCounts&) = default;
};

ChoiceCounts tally_choices(std::span<const SurveyRecord> records, SurveyQuestion question);

struct SurveySummary {
    TTestResult reduction;   // human minus llm
    TTestResult creativity;  // human minus llm
    ChoiceCounts q3;
    ChoiceCounts q4;
};

SurveySummary summarize_survey(std::span<const SurveyRecord> records);

// Tab-separated with a header row:
// participant item reduction_human reduction_llm creativity_human creativity_llm q3 q4
std::vector<SurveyRecord> parse_survey(std::istream& in);
void write_survey(std::ostream& out, std::span<const SurveyRecord> records);

// Two-column delimited files (tab, comma or spaces). '#' comments and blank lines are
// skipped, as is a leading header row whose first field is not numeric.
AgreementTable parse_agreement_table(std::istream& in);
std::pair<std::vector<double>, std::vector<double>> parse_score_pairs(std::istream& in);

}  // namespace rhymecheck
