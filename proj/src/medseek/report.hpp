#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "medseek/answer_extraction.hpp"
#include "medseek/memorization.hpp"
#include "medseek/metrics.hpp"
#include "medseek/qa_runner.hpp"
#include "medseek/run_store.hpp"
#include "medseek/stats.hpp"
#include "medseek/usermodel.hpp"

namespace medseek {

enum class ErrorCategory { ConsensusMisunderstanding, QuestionMisinterpretation, AmbiguousAnswer };

std::string_view to_string(ErrorCategory c);  // snake_case
// Accepts snake_case or CamelCase; anything else is a ParseError.
ErrorCategory error_category_from_string(std::string_view s);

struct ErrorAnnotation {
  int topic_id = 0;
  std::string model_id;
  PromptKind kind = PromptKind::NoContext;
  ErrorCategory category = ErrorCategory::AmbiguousAnswer;
  std::string rationale;
};

// JSON lines, one annotation object per line. Lines whose category is empty
// (an export that was never filled in) are skipped.
std::vector<ErrorAnnotation> parse_annotations(std::string_view jsonl);

// Topics where every model's zero-shot row for `kind` is incorrect, ascending.
// Throws TopicSetMismatch when the models do not cover the same topics.
std::vector<int> find_universal_failures(std::span<const AnswerRow> rows, PromptKind kind);

// Percentages per category, per prompt kind; each kind's row sums to 100.
using CategoryShares = std::array<double, 3>;
std::map<PromptKind, CategoryShares> tally_error_categories(std::span<const ErrorAnnotation> annotations);

// ---- store-backed views ----

// Store payloads carry a "table" discriminator: "se" for reading-comprehension
// records, the RunTable names for LLM rows, "memcheck" for completion pairs.
nlohmann::json se_payload(const AnswerRecord& r, const std::string& reader, const std::string& scorer);
std::string se_record_key(const AnswerRecord& r, const std::string& reader, const std::string& scorer);

struct MemcheckRecord {
  std::string model_id;
  int year = 0;
  CompletionPair pair;
  std::optional<double> semantic_general;
  std::optional<double> semantic_guided;
};
nlohmann::json memcheck_payload(const MemcheckRecord& r);
std::string memcheck_record_key(const MemcheckRecord& r);

struct StoreView {
  std::vector<AnswerRecord> se;  // sorted by (engine, topic, rank)
  std::vector<AnswerRow> llm;    // store order
  std::vector<MemcheckRecord> memcheck;
};

StoreView load_store_view(RunStore& store);

struct SeSummaryRow {
  std::string engine;
  double answering_score = 0;
  std::optional<double> correct_rate;  // empty when nothing was answered
};

struct UserSimRow {
  std::string model;  // "lazy" or "diligent"
  std::string engine;
  OutcomeSummary summary;
};

struct AccuracyRow {
  RunTable table = RunTable::ZeroShot;
  std::string model_id;
  PromptKind kind = PromptKind::NoContext;
  int shots = 0;
  int rag_rank = 0;
  int concat_top = 0;
  size_t n = 0;
  double accuracy = 0;
};

struct McNemarRow {
  std::string system_a;
  std::string system_b;
  McNemarResult result;
};

int max_se_depth(std::span<const AnswerRecord> se);
std::vector<RankCurve> se_curves(std::span<const AnswerRecord> se, CurveMode mode = CurveMode::PerEntry);
std::vector<SeSummaryRow> se_summary(std::span<const AnswerRecord> se);
std::vector<UserSimRow> user_simulation(std::span<const AnswerRecord> se);
std::vector<AccuracyRow> accuracy_grid(std::span<const AnswerRow> rows);
// Every pair of zero-shot (model, kind) systems, in grid order.
std::vector<McNemarRow> zero_shot_mcnemar(std::span<const AnswerRow> rows);
std::vector<MemorizationRow> memorization_rows(std::span<const MemcheckRecord> records);

std::string curve_csv(const std::vector<RankCurve>& curves);
std::string se_summary_csv(const std::vector<SeSummaryRow>& rows);
std::string usersim_csv(const std::vector<UserSimRow>& rows);
std::string accuracy_csv(const std::vector<AccuracyRow>& rows);
std::string mcnemar_csv(const std::vector<McNemarRow>& rows);

// Line chart: one polyline per engine plus one <circle class="vertex"> per point.
std::string curve_svg(const std::vector<RankCurve>& curves);
// Grouped bars: one group per (model, kind), one bar per condition.
std::string accuracy_svg(const std::vector<AccuracyRow>& rows);

enum class ReportFormat { Csv, Svg, Markdown };
ReportFormat report_format_from_string(std::string_view s);  // csv, svg / svg-plot, markdown / md / markdown-table

// Writes the report files for `format` into `out_dir` and returns them in
// write order. Output depends only on store contents.
std::vector<std::filesystem::path> emit_report(RunStore& store, ReportFormat format,
                                               const std::filesystem::path& out_dir);

}  // namespace medseek
