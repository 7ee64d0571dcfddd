#include "rhymecheck/stats.hpp"

#include "rhymecheck/errors.hpp"

#include <cmath>
#include <cstdlib>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace rhymecheck {

double krippendorff_alpha(const AgreementTable& table) {
    if (table.items.size() < 2) throw PreconditionError("agreement table needs at least two items");
    // Coincidence matrix: each two-rater unit contributes (a,b) and (b,a) with weight 1.
    double o[2][2] = {{0, 0}, {0, 0}};
    for (const auto& [a, b] : table.items) {
        const int i = is_positive(a) ? 1 : 0;
        const int j = is_positive(b) ? 1 : 0;
        o[i][j] += 1.0;
        o[j][i] += 1.0;
    }
    const double n0 = o[0][0] + o[0][1];
    const double n1 = o[1][0] + o[1][1];
    const double n = n0 + n1;
    if (n0 == 0.0 || n1 == 0.0) throw DataError("degenerate agreement data: only one label value occurs");
    const double observed = (o[0][1] + o[1][0]) / n;
    const double expected = 2.0 * n0 * n1 / (n * (n - 1.0));
    return 1.0 - observed / expected;
}

namespace {

// Continued fraction for I_x(a, b), modified Lentz. Converges quickly for x < (a+1)/(a+b+2).
double beta_continued_fraction(double x, double a, double b) {
    constexpr double tiny = 1e-300;
    constexpr double tolerance = 1e-15;
    constexpr int max_terms = 10000;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= max_terms; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < tolerance) return h;
    }
    throw std::runtime_error("incomplete beta continued fraction did not converge");
}

// I_x(a, b) given both x and 1 - x, so callers can pass an exactly computed complement.
double incomplete_beta(double x, double one_minus_x, double a, double b) {
    if (x <= 0.0) return 0.0;
    if (one_minus_x <= 0.0) return 1.0;
    const double log_front =
        std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log(one_minus_x);
    const double front = std::exp(log_front);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(x, a, b) / a;
    return 1.0 - front * beta_continued_fraction(one_minus_x, b, a) / b;
}

// P(|T| > |t|) for T ~ Student-t(df).
double two_tailed(double t, double df) {
    const double t2 = t * t;
    return incomplete_beta(df / (df + t2), t2 / (df + t2), df / 2.0, 0.5);
}

}  // namespace

double regularized_incomplete_beta(double x, double a, double b) {
    if (!(a > 0.0 && b > 0.0)) throw PreconditionError("incomplete beta needs a, b > 0");
    if (!(x >= 0.0 && x <= 1.0)) throw PreconditionError("incomplete beta needs x in [0, 1]");
    return incomplete_beta(x, 1.0 - x, a, b);
}

double t_cdf(double t, double df) {
    if (!(df >= 1.0)) throw PreconditionError("t distribution needs df >= 1");
    if (std::isnan(t)) return t;
    if (std::isinf(t)) return t > 0 ? 1.0 : 0.0;
    const double tail = 0.5 * two_tailed(t, df);
    return t > 0.0 ? 1.0 - tail : tail;
}

TTestResult paired_ttest(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw PreconditionError("paired samples differ in length");
    const std::size_t n = x.size();
    if (n < 2) throw PreconditionError("paired t-test needs at least two pairs");
    std::vector<double> d(n);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        d[i] = x[i] - y[i];
        sum += d[i];
    }
    const double mean = sum / static_cast<double>(n);
    double ss = 0.0;
    for (double v : d) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    if (sd == 0.0) throw DataError("zero variance in paired differences");
    TTestResult result;
    result.t = mean / (sd / std::sqrt(static_cast<double>(n)));
    result.df = n - 1;
    result.p_two_tailed = two_tailed(result.t, static_cast<double>(result.df));
    return result;
}

std::string_view to_string(SurveyChoice choice) {
    switch (choice) {
    case SurveyChoice::human: return "Human";
    case SurveyChoice::llm: return "ChatGPT";
    case SurveyChoice::no_difference: return "NoDifference";
    }
    return "NoDifference";
}

std::optional<SurveyChoice> parse_survey_choice(std::string_view text) {
    if (text == "Human" || text == "human") return SurveyChoice::human;
    if (text == "ChatGPT" || text == "LLM" || text == "llm" || text == "AI") return SurveyChoice::llm;
    if (text == "NoDifference" || text == "no_difference" || text == "None") return SurveyChoice::no_difference;
    return std::nullopt;
}

ChoiceCounts tally_choices(std::span<const SurveyRecord> records, SurveyQuestion question) {
    ChoiceCounts counts;
    for (const auto& record : records) {
        switch (question == SurveyQuestion::q3 ? record.q3 : record.q4) {
        case SurveyChoice::human: ++counts.human; break;
        case SurveyChoice::llm: ++counts.llm; break;
        case SurveyChoice::no_difference: ++counts.no_difference; break;
        }
    }
    return counts;
}

SurveySummary summarize_survey(std::span<const SurveyRecord> records) {
    std::vector<double> reduction_h, reduction_l, creativity_h, creativity_l;
    for (const auto& r : records) {
        reduction_h.push_back(r.reduction[0]);
        reduction_l.push_back(r.reduction[1]);
        creativity_h.push_back(r.creativity[0]);
        creativity_l.push_back(r.creativity[1]);
    }
    SurveySummary summary;
    summary.reduction = paired_ttest(reduction_h, reduction_l);
    summary.creativity = paired_ttest(creativity_h, creativity_l);
    summary.q3 = tally_choices(records, SurveyQuestion::q3);
    summary.q4 = tally_choices(records, SurveyQuestion::q4);
    return summary;
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string current;
    const bool has_delimiter = line.find_first_of("\t,") != std::string::npos;
    for (char c : line) {
        const bool separator = has_delimiter ? (c == '\t' || c == ',') : (c == ' ');
        if (separator) {
            fields.push_back(current);
            current.clear();
        } else if (c != '\r') {
            current.push_back(c);
        }
    }
    fields.push_back(current);
    for (auto& f : fields) {
        const auto first = f.find_first_not_of(' ');
        const auto last = f.find_last_not_of(' ');
        f = first == std::string::npos ? std::string{} : f.substr(first, last - first + 1);
    }
    if (!has_delimiter) std::erase_if(fields, [](const std::string& f) { return f.empty(); });
    return fields;
}

std::optional<double> to_number(const std::string& text) {
    if (text.empty()) return std::nullopt;
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (end != text.c_str() + text.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

// Rows of exactly two fields, header and comments removed. Row numbers are 1-based lines.
std::vector<std::pair<std::size_t, std::array<std::string, 2>>> read_two_columns(std::istream& in) {
    std::vector<std::pair<std::size_t, std::array<std::string, 2>>> rows;
    std::string line;
    std::size_t line_no = 0;
    bool first = true;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos || line.front() == '#') continue;
        auto fields = split_fields(line);
        if (first && !fields.empty() && !to_number(fields.front())) {
            first = false;
            continue;
        }
        first = false;
        if (fields.size() != 2) throw DataError("expected two columns on line " + std::to_string(line_no));
        rows.push_back({line_no, {fields[0], fields[1]}});
    }
    return rows;
}

}  // namespace

AgreementTable parse_agreement_table(std::istream& in) {
    AgreementTable table;
    for (const auto& [line_no, fields] : read_two_columns(in)) {
        std::array<Label, 2> labels{};
        for (std::size_t k = 0; k < 2; ++k) {
            if (fields[k] != "0" && fields[k] != "1") {
                throw DataError("label outside {0,1} on line " + std::to_string(line_no));
            }
            labels[k] = label_from_bool(fields[k] == "1");
        }
        table.items.emplace_back(labels[0], labels[1]);
    }
    return table;
}

std::pair<std::vector<double>, std::vector<double>> parse_score_pairs(std::istream& in) {
    std::pair<std::vector<double>, std::vector<double>> columns;
    for (const auto& [line_no, fields] : read_two_columns(in)) {
        const auto a = to_number(fields[0]);
        const auto b = to_number(fields[1]);
        if (!a || !b) throw DataError("non-numeric value on line " + std::to_string(line_no));
        columns.first.push_back(*a);
        columns.second.push_back(*b);
    }
    return columns;
}

std::vector<SurveyRecord> parse_survey(std::istream& in) {
    static const std::vector<std::string> kHeader{"participant",      "item",           "reduction_human",
                                                  "reduction_llm",    "creativity_human", "creativity_llm",
                                                  "q3",               "q4"};
    std::vector<SurveyRecord> records;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        std::vector<std::string> fields;
        std::stringstream row(line);
        for (std::string field; std::getline(row, field, '\t');) fields.push_back(field);
        if (!header_seen) {
            if (fields != kHeader) throw DataError("survey file must start with the documented header row");
            header_seen = true;
            continue;
        }
        if (fields.size() != kHeader.size()) throw DataError("expected 8 fields on survey line " + std::to_string(line_no));
        SurveyRecord record;
        record.participant = fields[0];
        record.item = fields[1];
        auto rating = [&](const std::string& text) {
            if (text.size() != 1 || text[0] < '1' || text[0] > '5') {
                throw DataError("rating outside [1,5] on survey line " + std::to_string(line_no));
            }
            return text[0] - '0';
        };
        auto choice = [&](const std::string& text) {
            const auto c = parse_survey_choice(text);
            if (!c) throw DataError("unknown choice '" + text + "' on survey line " + std::to_string(line_no));
            return *c;
        };
        record.reduction = {rating(fields[2]), rating(fields[3])};
        record.creativity = {rating(fields[4]), rating(fields[5])};
        record.q3 = choice(fields[6]);
        record.q4 = choice(fields[7]);
        records.push_back(std::move(record));
    }
    return records;
}

void write_survey(std::ostream& out, std::span<const SurveyRecord> records) {
    out << "participant\titem\treduction_human\treduction_llm\tcreativity_human\tcreativity_llm\tq3\tq4\n";
    for (const auto& r : records) {
        out << r.participant << '\t' << r.item << '\t' << r.reduction[0] << '\t' << r.reduction[1] << '\t'
            << r.creativity[0] << '\t' << r.creativity[1] << '\t' << to_string(r.q3) << '\t' << to_string(r.q4)
            << '\n';
    }
}

}  // namespace rhymecheck
