#pragma once

#include <map>
#include <span>
#include <vector>

namespace medseek {

// Per-topic correctness of two systems over the same topics, aligned by id.
struct PairedOutcomes {
  std::vector<int> topic_ids;
  std::vector<bool> a;
  std::vector<bool> b;
};

// Throws LengthMismatch unless both maps cover the same topic ids.
PairedOutcomes pair_outcomes(const std::map<int, bool>& a, const std::map<int, bool>& b);

struct McNemarResult {
  int b = 0;  // A correct, B incorrect
  int c = 0;  // A incorrect, B correct
  double p_value = 1.0;
};

// Two-sided exact binomial: min(1, 2 * P(X >= max(b, c))), X ~ Bin(b + c, 1/2).
double mcnemar_exact_p(int b, int c);

McNemarResult mcnemar_test(const PairedOutcomes& paired);

struct WilcoxonResult {
  double w = 0;             // sum of ranks of the positive differences
  double p_value = 1.0;     // one-sided, alternative: positive shift
  int direction = 0;        // sign of the median difference
  bool degenerate = false;  // every difference was zero
  bool exact = true;
  int n = 0;                // non-zero differences used
};

// Zero differences are dropped and tied magnitudes share average ranks. Up to
// 25 non-zero differences the null distribution is enumerated exactly;
// beyond that a tie-corrected normal approximation with continuity
// correction is used.
WilcoxonResult wilcoxon_signed_rank(std::span<const double> diffs);

}  // namespace medseek
