#pragma once

#include <atomic>
#include <chrono>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "medseek/extraction.hpp"

namespace medseek {

// Scores are only comparable between equal scorer_id values.
struct ScoredPassage {
  Passage passage;
  double score = 0.0;
  std::string scorer_id;
};

class PassageScorer {
 public:
  virtual ~PassageScorer() = default;
  // One finite score per passage, same order.
  virtual std::vector<double> score(const std::string& question, const std::vector<std::string>& passages) = 0;
  virtual std::string id() const = 0;
  virtual bool is_live() const = 0;
};

// Okapi BM25 over the given passages as the whole corpus. Tokens are
// lowercased alphanumeric runs, no stemming, each distinct query term counted
// once. IDF is ln(1 + (N - n + 0.5) / (n + 0.5)).
class Bm25Scorer final : public PassageScorer {
 public:
  explicit Bm25Scorer(double k1 = 1.2, double b = 0.75) : k1_(k1), b_(b) {}
  std::vector<double> score(const std::string& question, const std::vector<std::string>& passages) override;
  std::string id() const override { return "bm25"; }
  bool is_live() const override { return false; }

 private:
  double k1_;
  double b_;
};

// POST {"question", "passages": [...]} -> {"scores": [...]}. Any transport,
// status or shape problem raises ScorerUnavailable. `question` is also used as
// the reference text when this contract backs a semantic similarity scorer.
class RemoteScorer final : public PassageScorer {
 public:
  explicit RemoteScorer(std::string endpoint, std::chrono::milliseconds timeout = std::chrono::seconds(60))
      : endpoint_(std::move(endpoint)), timeout_(timeout) {}
  std::vector<double> score(const std::string& question, const std::vector<std::string>& passages) override;
  std::string id() const override { return "neural:" + endpoint_; }
  bool is_live() const override { return true; }
  size_t calls() const { return calls_.load(); }

 private:
  std::string endpoint_;
  std::chrono::milliseconds timeout_;
  std::atomic<size_t> calls_{0};
};

// Write-through cache for a live scorer. Scores are stored as completion
// records keyed by (scorer id, question, passages); in offline mode a miss is
// OfflineCacheMiss.
class CachedScorer final : public PassageScorer {
 public:
  CachedScorer(PassageScorer& inner, RunStore& store, CacheOptions opts = {})
      : inner_(inner), store_(store), opts_(std::move(opts)) {}
  std::vector<double> score(const std::string& question, const std::vector<std::string>& passages) override;
  std::string id() const override { return inner_.id(); }
  bool is_live() const override { return inner_.is_live(); }

 private:
  PassageScorer& inner_;
  RunStore& store_;
  CacheOptions opts_;
};

// Order-preserving; throws EmptyInput on an empty list.
std::vector<ScoredPassage> score_passages(const std::string& question, std::span<const Passage> passages,
                                          PassageScorer& scorer);

// Highest score; ties go to the lowest passage index (then source URL), so
// the result does not depend on input order.
const ScoredPassage& select_top(std::span<const ScoredPassage> scored);

ScoredPassage top_passage(const std::string& question, std::span<const Passage> passages, PassageScorer& scorer);

struct PassageWindow {
  int window_words = 120;
  int stride_words = 60;
};

// Best passage of one ranked entry's page. `top` is empty when the page could
// not be fetched or held no words.
struct EntryEvidence {
  int rank = 0;
  std::string url;
  PageStatus page_status = PageStatus::FetchFailed;
  std::optional<ScoredPassage> top;
};

// Fetches every entry's page, scores all passages of the SERP's page set as
// one corpus, and keeps each page's best passage. Output follows rank order.
std::vector<EntryEvidence> select_evidence(const Serp& serp, const std::string& question, PageFetcher& pages,
                                           PassageScorer& scorer, PassageWindow window = {},
                                           size_t max_in_flight = 8);

}  // namespace medseek
