#include "medseek/report.hpp"

#include <algorithm>
#include <iomanip>
#include <set>
#include <sstream>

#include "medseek/error.hpp"
#include "medseek/text.hpp"

namespace medseek {

namespace {

std::string fmt(double v, int digits = 4) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

std::string system_name(const std::string& model, PromptKind kind) {
  return model + "/" + std::string(to_string(kind));
}

std::string condition_label(const AccuracyRow& r) {
  switch (r.table) {
    case RunTable::ZeroShot: return "zero-shot";
    case RunTable::FewShot: return std::to_string(r.shots) + "-shot";
    case RunTable::Rag:
      return r.concat_top > 0 ? "rag top-" + std::to_string(r.concat_top) + " concat"
                              : "rag top " + std::to_string(r.rag_rank);
  }
  return "?";
}

// Fixed palette cycled by series index.
constexpr std::array<std::string_view, 8> kPalette{"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                                   "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

// Per-engine, per-topic rank-ordered slots padded with no-answer records.
std::map<std::string, std::map<int, std::vector<AnswerRecord>>> se_grid(std::span<const AnswerRecord> se, int depth) {
  std::map<std::string, std::map<int, std::vector<AnswerRecord>>> out;
  for (const auto& r : se) {
    auto& slots = out[std::string(to_string(r.engine))][r.topic_id];
    if (slots.empty()) {
      slots.resize(static_cast<size_t>(depth));
      for (int i = 0; i < depth; ++i) {
        slots[static_cast<size_t>(i)].engine = r.engine;
        slots[static_cast<size_t>(i)].topic_id = r.topic_id;
        slots[static_cast<size_t>(i)].rank = i + 1;
      }
    }
    if (r.rank >= 1 && r.rank <= depth) slots[static_cast<size_t>(r.rank - 1)] = r;
  }
  return out;
}

std::string markdown_table(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  std::ostringstream os;
  bool header = true;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    os << "| " << text::join(cells, " | ") << " |\n";
    if (header) {
      os << '|';
      for (size_t i = 0; i < cells.size(); ++i) os << "---|";
      os << '\n';
      header = false;
    }
  }
  return os.str();
}

}  // namespace

std::string_view to_string(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::ConsensusMisunderstanding: return "consensus_misunderstanding";
    case ErrorCategory::QuestionMisinterpretation: return "question_misinterpretation";
    case ErrorCategory::AmbiguousAnswer: return "ambiguous_answer";
  }
  return "?";
}

ErrorCategory error_category_from_string(std::string_view s) {
  if (s == "consensus_misunderstanding" || s == "ConsensusMisunderstanding")
    return ErrorCategory::ConsensusMisunderstanding;
  if (s == "question_misinterpretation" || s == "QuestionMisinterpretation")
    return ErrorCategory::QuestionMisinterpretation;
  if (s == "ambiguous_answer" || s == "AmbiguousAnswer") return ErrorCategory::AmbiguousAnswer;
  throw Error(ErrorCode::ParseError, "unknown error category '" + std::string(s) + "'");
}

std::vector<ErrorAnnotation> parse_annotations(std::string_view jsonl) {
  std::vector<ErrorAnnotation> out;
  std::istringstream in{std::string(jsonl)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    try {
      auto j = nlohmann::json::parse(line);
      auto category = j.value("category", "");
      if (category.empty()) continue;
      ErrorAnnotation a;
      a.topic_id = j.at("topic_id").get<int>();
      a.model_id = j.at("model").get<std::string>();
      a.kind = prompt_kind_from_string(j.value("kind", "no_context"));
      a.category = error_category_from_string(category);
      a.rationale = j.value("rationale", "");
      out.push_back(std::move(a));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::ParseError, "annotation line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

std::vector<int> find_universal_failures(std::span<const AnswerRow> rows, PromptKind kind) {
  std::map<std::string, std::map<int, bool>> by_model;
  for (const auto& r : rows)
    if (r.table == RunTable::ZeroShot && r.kind == kind) by_model[r.model_id][r.topic_id] = r.correct;
  if (by_model.empty()) return {};
  std::set<int> topics;
  for (const auto& [id, _] : by_model.begin()->second) topics.insert(id);
  for (const auto& [model, outcomes] : by_model) {
    std::set<int> own;
    for (const auto& [id, _] : outcomes) own.insert(id);
    if (own != topics) throw Error(ErrorCode::TopicSetMismatch, "model " + model + " covers a different topic set");
  }
  std::vector<int> out;
  for (int id : topics) {
    bool all_wrong = std::all_of(by_model.begin(), by_model.end(),
                                 [&](const auto& m) { return !m.second.at(id); });
    if (all_wrong) out.push_back(id);
  }
  return out;
}

std::map<PromptKind, CategoryShares> tally_error_categories(std::span<const ErrorAnnotation> annotations) {
  if (annotations.empty()) throw Error(ErrorCode::EmptyInput, "no annotations");
  std::map<PromptKind, std::array<size_t, 3>> counts;
  for (const auto& a : annotations) ++counts[a.kind][static_cast<size_t>(a.category)];
  std::map<PromptKind, CategoryShares> out;
  for (const auto& [kind, c] : counts) {
    const auto total = static_cast<double>(c[0] + c[1] + c[2]);
    for (size_t i = 0; i < 3; ++i) out[kind][i] = 100.0 * static_cast<double>(c[i]) / total;
  }
  return out;
}

nlohmann::json se_payload(const AnswerRecord& r, const std::string& reader, const std::string& scorer) {
  auto j = to_json(r);
  j["table"] = "se";
  j["reader"] = reader;
  j["scorer"] = scorer;
  return j;
}

std::string se_record_key(const AnswerRecord& r, const std::string& reader, const std::string& scorer) {
  nlohmann::json id = {"se", to_string(r.engine), r.topic_id, r.rank, reader, scorer};
  return text::sha256_hex(id.dump());
}

nlohmann::json memcheck_payload(const MemcheckRecord& r) {
  nlohmann::json j = {{"table", "memcheck"},
                      {"model", r.model_id},
                      {"year", r.year},
                      {"topic_id", r.pair.topic_id},
                      {"general_text", r.pair.general_text},
                      {"guided_text", r.pair.guided_text},
                      {"reference", r.pair.reference}};
  if (r.semantic_general) j["semantic_general"] = *r.semantic_general;
  if (r.semantic_guided) j["semantic_guided"] = *r.semantic_guided;
  return j;
}

std::string memcheck_record_key(const MemcheckRecord& r) {
  nlohmann::json id = {"memcheck", r.model_id, r.year, r.pair.topic_id, r.semantic_general.has_value()};
  return text::sha256_hex(id.dump());
}

StoreView load_store_view(RunStore& store) {
  StoreView view;
  for (const auto& rec : store.records(RecordKind::Answer)) {
    const auto table = rec.payload.value("table", "");
    if (table == "se") {
      view.se.push_back(answer_record_from_json(rec.payload));
    } else if (table == "memcheck") {
      MemcheckRecord m;
      try {
        m.model_id = rec.payload.at("model").get<std::string>();
        m.year = rec.payload.at("year").get<int>();
        m.pair.topic_id = rec.payload.at("topic_id").get<int>();
        m.pair.general_text = rec.payload.at("general_text").get<std::string>();
        m.pair.guided_text = rec.payload.at("guided_text").get<std::string>();
        m.pair.reference = rec.payload.at("reference").get<std::string>();
        if (rec.payload.contains("semantic_general")) m.semantic_general = rec.payload["semantic_general"].get<double>();
        if (rec.payload.contains("semantic_guided")) m.semantic_guided = rec.payload["semantic_guided"].get<double>();
      } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::StoreCorrupt, std::string("bad memcheck record: ") + e.what());
      }
      view.memcheck.push_back(std::move(m));
    } else {
      view.llm.push_back(answer_row_from_json(rec.payload));
    }
  }
  std::sort(view.se.begin(), view.se.end(), [](const AnswerRecord& a, const AnswerRecord& b) {
    return std::tuple(to_string(a.engine), a.topic_id, a.rank) < std::tuple(to_string(b.engine), b.topic_id, b.rank);
  });
  return view;
}

int max_se_depth(std::span<const AnswerRecord> se) {
  int depth = 0;
  for (const auto& r : se) depth = std::max(depth, r.rank);
  return depth;
}

std::vector<RankCurve> se_curves(std::span<const AnswerRecord> se, CurveMode mode) {
  const int depth = max_se_depth(se);
  std::vector<RankCurve> out;
  for (const auto& [engine, topics] : se_grid(se, depth)) {
    std::vector<AnswerRecord> flat;
    for (const auto& [id, slots] : topics) flat.insert(flat.end(), slots.begin(), slots.end());
    out.push_back(cumulative_correct_curve(flat, depth, mode));
  }
  return out;
}

std::vector<SeSummaryRow> se_summary(std::span<const AnswerRecord> se) {
  const int depth = max_se_depth(se);
  std::vector<SeSummaryRow> out;
  for (const auto& [engine, topics] : se_grid(se, depth)) {
    std::vector<AnswerRecord> flat;
    for (const auto& [id, slots] : topics) flat.insert(flat.end(), slots.begin(), slots.end());
    SeSummaryRow row;
    row.engine = engine;
    row.answering_score = answering_score(flat, depth);
    try {
      row.correct_rate = conditional_correct_rate(flat);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NoAnsweredRecords) throw;
    }
    out.push_back(row);
  }
  return out;
}

std::vector<UserSimRow> user_simulation(std::span<const AnswerRecord> se) {
  const int depth = max_se_depth(se);
  std::vector<UserSimRow> out;
  auto grid = se_grid(se, depth);
  for (std::string model : {"lazy", "diligent"}) {
    for (const auto& [engine, topics] : grid) {
      std::vector<InspectionOutcome> outcomes;
      for (const auto& [id, slots] : topics)
        outcomes.push_back(model == "lazy" ? lazy_user(std::span<const AnswerRecord>(slots))
                                           : diligent_user(std::span<const AnswerRecord>(slots)));
      out.push_back({model, engine, summarize_outcomes(outcomes)});
    }
  }
  return out;
}

std::vector<AccuracyRow> accuracy_grid(std::span<const AnswerRow> rows) {
  std::vector<AccuracyRow> out;
  std::map<std::string, size_t> index;
  std::vector<std::vector<PredictionPair>> preds;
  for (const auto& r : rows) {
    nlohmann::json id = {to_string(r.table), r.model_id, to_string(r.kind), r.shots, r.rag_rank, r.concat_top};
    auto [it, fresh] = index.emplace(id.dump(), out.size());
    if (fresh) {
      out.push_back({r.table, r.model_id, r.kind, r.shots, r.rag_rank, r.concat_top, 0, 0});
      preds.emplace_back();
    }
    preds[it->second].push_back({r.predicted, r.truth});
  }
  for (size_t i = 0; i < out.size(); ++i) {
    out[i].n = preds[i].size();
    out[i].accuracy = llm_accuracy(preds[i]);
  }
  return out;
}

std::vector<McNemarRow> zero_shot_mcnemar(std::span<const AnswerRow> rows) {
  std::vector<std::string> order;
  std::map<std::string, std::map<int, bool>> systems;
  for (const auto& r : rows) {
    if (r.table != RunTable::ZeroShot) continue;
    auto name = system_name(r.model_id, r.kind);
    if (!systems.contains(name)) order.push_back(name);
    systems[name][r.topic_id] = r.correct;
  }
  std::vector<McNemarRow> out;
  for (size_t i = 0; i < order.size(); ++i)
    for (size_t j = i + 1; j < order.size(); ++j)
      out.push_back({order[i], order[j], mcnemar_test(pair_outcomes(systems[order[i]], systems[order[j]]))});
  return out;
}

std::vector<MemorizationRow> memorization_rows(std::span<const MemcheckRecord> records) {
  // (model, year) groups in first-seen order.
  std::vector<std::pair<std::string, int>> order;
  std::map<std::pair<std::string, int>, std::vector<const MemcheckRecord*>> groups;
  for (const auto& r : records) {
    auto key = std::pair(r.model_id, r.year);
    if (!groups.contains(key)) order.push_back(key);
    groups[key].push_back(&r);
  }
  std::vector<MemorizationRow> out;
  for (const auto& key : order) {
    auto& members = groups[key];
    std::sort(members.begin(), members.end(),
              [](const MemcheckRecord* a, const MemcheckRecord* b) { return a->pair.topic_id < b->pair.topic_id; });
    std::vector<CompletionPair> pairs;
    for (const auto* m : members) pairs.push_back(m->pair);
    MemorizationRow row;
    row.model_id = key.first + " (" + std::to_string(key.second) + ")";
    row.report = contamination_report(pairs);
    const bool semantic = std::all_of(members.begin(), members.end(), [](const MemcheckRecord* m) {
      return m->semantic_general && m->semantic_guided;
    });
    if (semantic) {
      // Recompute the stored semantic scores through the same comparison path.
      struct Replay final : PassageScorer {
        std::map<std::pair<std::string, std::string>, double> table;
        std::vector<double> score(const std::string& q, const std::vector<std::string>& ps) override {
          std::vector<double> s;
          for (const auto& p : ps) s.push_back(table.at({q, p}));
          return s;
        }
        std::string id() const override { return "replay"; }
        bool is_live() const override { return false; }
      } replay;
      for (const auto* m : members) {
        replay.table[{m->pair.reference, m->pair.general_text}] = *m->semantic_general;
        replay.table[{m->pair.reference, m->pair.guided_text}] = *m->semantic_guided;
      }
      row.report = contamination_report(pairs, &replay);
    }
    out.push_back(std::move(row));
  }
  return out;
}

std::string curve_csv(const std::vector<RankCurve>& curves) {
  std::ostringstream os;
  os << "engine,position,proportion\n";
  for (const auto& c : curves)
    for (const auto& [pos, v] : c.points) os << c.engine << ',' << pos << ',' << fmt(v) << '\n';
  return os.str();
}

std::string se_summary_csv(const std::vector<SeSummaryRow>& rows) {
  std::ostringstream os;
  os << "engine,answering_score,correct_given_answered\n";
  for (const auto& r : rows)
    os << r.engine << ',' << fmt(r.answering_score) << ',' << (r.correct_rate ? fmt(*r.correct_rate) : "") << '\n';
  return os.str();
}

std::string usersim_csv(const std::vector<UserSimRow>& rows) {
  std::ostringstream os;
  os << "model,engine,pct_correct,pct_incorrect,pct_noanswer,mean_effort\n";
  for (const auto& r : rows)
    os << r.model << ',' << r.engine << ',' << fmt(r.summary.pct_correct, 2) << ',' << fmt(r.summary.pct_incorrect, 2)
       << ',' << fmt(r.summary.pct_noanswer, 2) << ',' << fmt(r.summary.mean_effort, 2) << '\n';
  return os.str();
}

std::string accuracy_csv(const std::vector<AccuracyRow>& rows) {
  std::ostringstream os;
  os << "table,model,kind,shots,rag_rank,concat_top,n,accuracy\n";
  for (const auto& r : rows)
    os << to_string(r.table) << ',' << csv_field(r.model_id) << ',' << to_string(r.kind) << ',' << r.shots << ','
       << r.rag_rank << ',' << r.concat_top << ',' << r.n << ',' << fmt(r.accuracy) << '\n';
  return os.str();
}

std::string mcnemar_csv(const std::vector<McNemarRow>& rows) {
  std::ostringstream os;
  os << "systemA,systemB,b,c,p,significant@0.05\n";
  for (const auto& r : rows)
    os << csv_field(r.system_a) << ',' << csv_field(r.system_b) << ',' << r.result.b << ',' << r.result.c << ','
       << fmt(r.result.p_value, 6) << ',' << (r.result.p_value < 0.05 ? "true" : "false") << '\n';
  return os.str();
}

std::string curve_svg(const std::vector<RankCurve>& curves) {
  constexpr double kW = 640, kH = 400, kLeft = 50, kRight = 150, kTop = 20, kBottom = 40;
  const double plot_w = kW - kLeft - kRight;
  const double plot_h = kH - kTop - kBottom;
  int max_pos = 1;
  for (const auto& c : curves)
    for (const auto& [pos, v] : c.points) max_pos = std::max(max_pos, pos);
  auto x_of = [&](int pos) { return kLeft + (max_pos == 1 ? 0.0 : plot_w * (pos - 1) / (max_pos - 1)); };
  auto y_of = [&](double v) { return kTop + plot_h * (1.0 - v); };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH << "\" viewBox=\"0 0 "
     << kW << ' ' << kH << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<line x1=\"" << kLeft << "\" y1=\"" << kTop + plot_h << "\" x2=\"" << kLeft + plot_w << "\" y2=\""
     << kTop + plot_h << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\"" << kTop + plot_h
     << "\" stroke=\"black\"/>\n";
  for (int tick = 0; tick <= 4; ++tick) {
    const double v = tick / 4.0;
    os << "<text x=\"" << kLeft - 8 << "\" y=\"" << fmt(y_of(v), 1) << "\" font-size=\"10\" text-anchor=\"end\">"
       << fmt(v, 2) << "</text>\n";
  }
  os << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kH - 8
     << "\" font-size=\"12\" text-anchor=\"middle\">rank position</text>\n";
  for (size_t i = 0; i < curves.size(); ++i) {
    const auto& c = curves[i];
    const auto color = kPalette[i % kPalette.size()];
    os << "<g class=\"series\" data-engine=\"" << xml_escape(c.engine) << "\">\n";
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (size_t k = 0; k < c.points.size(); ++k)
      os << (k ? " " : "") << fmt(x_of(c.points[k].first), 1) << ',' << fmt(y_of(c.points[k].second), 1);
    os << "\"/>\n";
    for (const auto& [pos, v] : c.points)
      os << "<circle class=\"vertex\" cx=\"" << fmt(x_of(pos), 1) << "\" cy=\"" << fmt(y_of(v), 1)
         << "\" r=\"2.5\" fill=\"" << color << "\"/>\n";
    os << "<text x=\"" << kLeft + plot_w + 10 << "\" y=\"" << kTop + 14 * (i + 1) << "\" font-size=\"11\" fill=\""
       << color << "\">" << xml_escape(c.engine) << "</text>\n";
    os << "</g>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::string accuracy_svg(const std::vector<AccuracyRow>& rows) {
  std::vector<std::string> groups;
  std::vector<std::string> conditions;
  std::map<std::pair<std::string, std::string>, double> value;
  for (const auto& r : rows) {
    auto g = system_name(r.model_id, r.kind);
    auto c = condition_label(r);
    if (std::find(groups.begin(), groups.end(), g) == groups.end()) groups.push_back(g);
    if (std::find(conditions.begin(), conditions.end(), c) == conditions.end()) conditions.push_back(c);
    value[{g, c}] = r.accuracy;
  }
  constexpr double kBar = 12, kGap = 24, kLeft = 50, kTop = 20, kPlotH = 300, kLegend = 160;
  const double group_w = std::max<double>(1, static_cast<double>(conditions.size())) * kBar + kGap;
  const double width = kLeft + static_cast<double>(groups.size()) * group_w + kLegend;
  const double height = kTop + kPlotH + 120;

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(width, 0) << "\" height=\"" << fmt(height, 0)
     << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<line x1=\"" << kLeft << "\" y1=\"" << kTop + kPlotH << "\" x2=\"" << fmt(width - kLegend, 1) << "\" y2=\""
     << kTop + kPlotH << "\" stroke=\"black\"/>\n";
  for (size_t gi = 0; gi < groups.size(); ++gi) {
    const double gx = kLeft + kGap / 2 + static_cast<double>(gi) * group_w;
    os << "<g class=\"group\" data-system=\"" << xml_escape(groups[gi]) << "\">\n";
    for (size_t ci = 0; ci < conditions.size(); ++ci) {
      auto it = value.find({groups[gi], conditions[ci]});
      if (it == value.end()) continue;
      const double h = kPlotH * it->second;
      os << "<rect class=\"bar\" x=\"" << fmt(gx + static_cast<double>(ci) * kBar, 1) << "\" y=\""
         << fmt(kTop + kPlotH - h, 1) << "\" width=\"" << kBar - 1 << "\" height=\"" << fmt(h, 1) << "\" fill=\""
         << kPalette[ci % kPalette.size()] << "\"><title>" << xml_escape(conditions[ci]) << ": "
         << fmt(it->second, 4) << "</title></rect>\n";
    }
    os << "<text transform=\"translate(" << fmt(gx, 1) << ',' << kTop + kPlotH + 12
       << ") rotate(45)\" font-size=\"10\">" << xml_escape(groups[gi]) << "</text>\n";
    os << "</g>\n";
  }
  for (size_t ci = 0; ci < conditions.size(); ++ci)
    os << "<text x=\"" << fmt(width - kLegend + 10, 1) << "\" y=\"" << kTop + 14 * (ci + 1)
       << "\" font-size=\"11\" fill=\"" << kPalette[ci % kPalette.size()] << "\">" << xml_escape(conditions[ci])
       << "</text>\n";
  os << "</svg>\n";
  return os.str();
}

ReportFormat report_format_from_string(std::string_view s) {
  if (s == "csv") return ReportFormat::Csv;
  if (s == "svg" || s == "svg-plot") return ReportFormat::Svg;
  if (s == "markdown" || s == "md" || s == "markdown-table") return ReportFormat::Markdown;
  throw Error(ErrorCode::UnknownFormat, "unknown report format '" + std::string(s) + "'");
}

std::vector<std::filesystem::path> emit_report(RunStore& store, ReportFormat format,
                                               const std::filesystem::path& out_dir) {
  auto view = load_store_view(store);
  std::filesystem::create_directories(out_dir);

  const auto curves = se_curves(view.se);
  const auto summary = se_summary(view.se);
  const auto usersim = user_simulation(view.se);
  const auto accuracy = accuracy_grid(view.llm);
  const auto mcnemar = zero_shot_mcnemar(view.llm);
  const auto memo = memorization_rows(view.memcheck);

  std::vector<std::filesystem::path> written;
  auto put = [&](const std::string& name, const std::string& body) {
    auto path = out_dir / name;
    text::write_file(path, body);
    written.push_back(path);
  };

  switch (format) {
    case ReportFormat::Csv:
      put("curve.csv", curve_csv(curves));
      put("se_score.csv", se_summary_csv(summary));
      put("usersim.csv", usersim_csv(usersim));
      put("accuracy.csv", accuracy_csv(accuracy));
      put("mcnemar.csv", mcnemar_csv(mcnemar));
      put("memorization.csv", render_memorization_csv(memo));
      break;
    case ReportFormat::Svg:
      put("curve.svg", curve_svg(curves));
      put("accuracy.svg", accuracy_svg(accuracy));
      break;
    case ReportFormat::Markdown: {
      std::ostringstream os;
      os << "# Evaluation report\n\n";
      os << "## Cumulative correct answers by rank\n\n" << markdown_table(curve_csv(curves)) << '\n';
      os << "## Search engine answering score\n\n" << markdown_table(se_summary_csv(summary)) << '\n';
      os << "## Simulated users\n\n" << markdown_table(usersim_csv(usersim)) << '\n';
      os << "## LLM accuracy\n\n" << markdown_table(accuracy_csv(accuracy)) << '\n';
      os << "## McNemar tests (zero-shot)\n\n" << markdown_table(mcnemar_csv(mcnemar)) << '\n';
      os << "## Memorization\n\n";
      if (memo.empty())
        os << "No memorization runs recorded.\n";
      else
        os << render_memorization_markdown(memo);
      put("report.md", os.str());
      break;
    }
  }
  return written;
}

}  // namespace medseek
