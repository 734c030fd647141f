#include "medseek/passages_rank.hpp"

#include <cmath>
#include <set>
#include <unordered_map>

#include "medseek/error.hpp"
#include "medseek/http.hpp"
#include "medseek/text.hpp"

namespace medseek {

std::vector<double> Bm25Scorer::score(const std::string& question, const std::vector<std::string>& passages) {
  const auto n_docs = static_cast<double>(passages.size());
  std::vector<std::unordered_map<std::string, int>> tf(passages.size());
  std::vector<double> length(passages.size());
  std::unordered_map<std::string, int> df;
  double total = 0;
  for (size_t i = 0; i < passages.size(); ++i) {
    auto tokens = text::tokenize(passages[i]);
    length[i] = static_cast<double>(tokens.size());
    total += length[i];
    for (auto& t : tokens) ++tf[i][t];
    for (const auto& [term, _] : tf[i]) ++df[term];
  }
  const double avgdl = passages.empty() || total == 0 ? 1.0 : total / n_docs;

  auto tokens = text::tokenize(question);
  std::set<std::string> terms(tokens.begin(), tokens.end());
  std::vector<double> scores(passages.size(), 0.0);
  for (const auto& term : terms) {
    auto it = df.find(term);
    if (it == df.end()) continue;
    const double n = it->second;
    const double idf = std::log(1.0 + (n_docs - n + 0.5) / (n + 0.5));
    for (size_t i = 0; i < passages.size(); ++i) {
      auto f = tf[i].find(term);
      if (f == tf[i].end()) continue;
      const double freq = f->second;
      scores[i] += idf * freq * (k1_ + 1) / (freq + k1_ * (1 - b_ + b_ * length[i] / avgdl));
    }
  }
  return scores;
}

std::vector<double> RemoteScorer::score(const std::string& question, const std::vector<std::string>& passages) {
  nlohmann::json req = {{"question", question}, {"passages", passages}};
  http::Options opts;
  opts.timeout = timeout_;
  ++calls_;
  http::Response resp;
  try {
    resp = http::post_json(endpoint_, req.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace), opts);
  } catch (const Error& e) {
    throw Error(ErrorCode::ScorerUnavailable, e.what());
  }
  if (resp.status != 200)
    throw Error(ErrorCode::ScorerUnavailable, endpoint_ + " returned HTTP " + std::to_string(resp.status));
  try {
    auto doc = nlohmann::json::parse(resp.body);
    auto scores = doc.at("scores").get<std::vector<double>>();
    if (scores.size() != passages.size())
      throw Error(ErrorCode::ScorerUnavailable, "scorer returned " + std::to_string(scores.size()) +
                                                    " scores for " + std::to_string(passages.size()) + " passages");
    return scores;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ScorerUnavailable, std::string("scorer response: ") + e.what());
  }
}

std::vector<double> CachedScorer::score(const std::string& question, const std::vector<std::string>& passages) {
  const auto key = text::sha256_hex(RunStore::canonical_dump({"scores", inner_.id(), question, passages}));
  if (auto hit = store_.find(RecordKind::Completion, key)) {
    try {
      return hit->payload.at("scores").get<std::vector<double>>();
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::StoreCorrupt, std::string("bad cached scores: ") + e.what());
    }
  }
  if (opts_.offline && inner_.is_live())
    throw Error(ErrorCode::OfflineCacheMiss, "scores for this passage set are not cached");
  auto scores = inner_.score(question, passages);
  store_.append(RecordKind::Completion, key, {{"scorer", inner_.id()}, {"question", question}, {"scores", scores}},
                opts_.run_id);
  return scores;
}

std::vector<ScoredPassage> score_passages(const std::string& question, std::span<const Passage> passages,
                                          PassageScorer& scorer) {
  if (passages.empty()) throw Error(ErrorCode::EmptyInput, "no passages to score");
  std::vector<std::string> texts;
  texts.reserve(passages.size());
  for (const auto& p : passages) texts.push_back(p.text);
  auto scores = scorer.score(question, texts);
  if (scores.size() != passages.size())
    throw Error(ErrorCode::ScorerUnavailable, "scorer returned the wrong number of scores");
  std::vector<ScoredPassage> out;
  out.reserve(passages.size());
  auto id = scorer.id();
  for (size_t i = 0; i < passages.size(); ++i) {
    if (!std::isfinite(scores[i]))
      throw Error(ErrorCode::ScorerUnavailable, "scorer returned a non-finite score");
    out.push_back(ScoredPassage{passages[i], scores[i], id});
  }
  return out;
}

const ScoredPassage& select_top(std::span<const ScoredPassage> scored) {
  if (scored.empty()) throw Error(ErrorCode::EmptyInput, "no passages to select from");
  const ScoredPassage* best = &scored[0];
  for (const auto& sp : scored.subspan(1)) {
    if (sp.score > best->score ||
        (sp.score == best->score &&
         (sp.passage.index < best->passage.index ||
          (sp.passage.index == best->passage.index && sp.passage.source_url < best->passage.source_url))))
      best = &sp;
  }
  return *best;
}

ScoredPassage top_passage(const std::string& question, std::span<const Passage> passages, PassageScorer& scorer) {
  auto scored = score_passages(question, passages, scorer);
  return select_top(scored);
}

std::vector<EntryEvidence> select_evidence(const Serp& serp, const std::string& question, PageFetcher& pages,
                                           PassageScorer& scorer, PassageWindow window, size_t max_in_flight) {
  std::vector<std::string> urls;
  for (const auto& e : serp.entries) urls.push_back(e.url);
  auto texts = pages.fetch_all(urls, max_in_flight);

  std::vector<EntryEvidence> out(serp.entries.size());
  std::vector<Passage> corpus;
  std::vector<std::pair<size_t, size_t>> ranges(serp.entries.size());  // [begin, end) into corpus
  for (size_t i = 0; i < serp.entries.size(); ++i) {
    out[i].rank = serp.entries[i].rank;
    out[i].url = serp.entries[i].url;
    out[i].page_status = texts[i].status;
    ranges[i] = {corpus.size(), corpus.size()};
    if (texts[i].status != PageStatus::Ok) continue;
    try {
      auto passages = split_passages(texts[i], window.window_words, window.stride_words);
      corpus.insert(corpus.end(), passages.begin(), passages.end());
    } catch (const Error& e) {
      if (e.code() != ErrorCode::EmptyPage) throw;
    }
    ranges[i].second = corpus.size();
  }
  if (corpus.empty()) return out;

  auto scored = score_passages(question, corpus, scorer);
  for (size_t i = 0; i < out.size(); ++i) {
    auto [begin, end] = ranges[i];
    if (begin == end) continue;
    out[i].top = select_top(std::span<const ScoredPassage>(scored).subspan(begin, end - begin));
  }
  return out;
}

}  // namespace medseek
