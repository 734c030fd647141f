#include "medseek/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

#include "medseek/error.hpp"

namespace medseek {

namespace {

constexpr int kExactWilcoxonLimit = 25;

// P(X >= k) for X ~ Binomial(n, 1/2).
double binomial_upper_tail(int n, int k) {
  if (k <= 0) return 1.0;
  if (k > n) return 0.0;
  if (n <= 120) {
    // Exact integer arithmetic; C(120, 60) and 2^120 both fit in 128 bits.
    unsigned __int128 coeff = 1;  // C(n, i)
    unsigned __int128 tail = 0;
    for (int i = 0; i <= n; ++i) {
      if (i >= k) tail += coeff;
      coeff = coeff * static_cast<unsigned>(n - i) / static_cast<unsigned>(i + 1);
    }
    return std::ldexp(static_cast<double>(static_cast<long double>(tail)), -n);
  }
  long double sum = 0;
  for (int i = k; i <= n; ++i)
    sum += std::exp(std::lgamma(n + 1.0L) - std::lgamma(i + 1.0L) - std::lgamma(n - i + 1.0L) - n * std::log(2.0L));
  return static_cast<double>(std::min<long double>(sum, 1.0L));
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

PairedOutcomes pair_outcomes(const std::map<int, bool>& a, const std::map<int, bool>& b) {
  if (a.size() != b.size()) throw Error(ErrorCode::LengthMismatch, "paired outcomes differ in length");
  PairedOutcomes out;
  for (const auto& [id, ok] : a) {
    auto it = b.find(id);
    if (it == b.end())
      throw Error(ErrorCode::LengthMismatch, "topic " + std::to_string(id) + " missing from second system");
    out.topic_ids.push_back(id);
    out.a.push_back(ok);
    out.b.push_back(it->second);
  }
  return out;
}

double mcnemar_exact_p(int b, int c) {
  if (b < 0 || c < 0) throw Error(ErrorCode::InvalidArgument, "negative discordant counts");
  const int n = b + c;
  if (n == 0) return 1.0;
  return std::min(1.0, 2.0 * binomial_upper_tail(n, std::max(b, c)));
}

McNemarResult mcnemar_test(const PairedOutcomes& paired) {
  if (paired.a.size() != paired.b.size())
    throw Error(ErrorCode::LengthMismatch, "paired outcome vectors differ in length");
  McNemarResult r;
  for (size_t i = 0; i < paired.a.size(); ++i) {
    if (paired.a[i] && !paired.b[i]) ++r.b;
    if (!paired.a[i] && paired.b[i]) ++r.c;
  }
  r.p_value = mcnemar_exact_p(r.b, r.c);
  return r;
}

WilcoxonResult wilcoxon_signed_rank(std::span<const double> diffs) {
  if (diffs.empty()) throw Error(ErrorCode::EmptyInput, "no differences");
  WilcoxonResult res;
  const double med = median(std::vector<double>(diffs.begin(), diffs.end()));
  res.direction = med > 0 ? 1 : (med < 0 ? -1 : 0);

  std::vector<double> nz;
  for (double d : diffs)
    if (d != 0.0) nz.push_back(d);
  res.n = static_cast<int>(nz.size());
  if (nz.empty()) {
    res.degenerate = true;
    return res;
  }

  // Average ranks of |d|, kept doubled so they stay integral.
  const size_t n = nz.size();
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](size_t x, size_t y) { return std::fabs(nz[x]) < std::fabs(nz[y]); });
  std::vector<int64_t> rank2(n);
  double tie_term = 0;
  for (size_t i = 0; i < n;) {
    size_t j = i;
    while (j + 1 < n && std::fabs(nz[order[j + 1]]) == std::fabs(nz[order[i]])) ++j;
    const auto doubled = static_cast<int64_t>(i + 1 + j + 1);  // 2 * mean of ranks i+1..j+1
    for (size_t k = i; k <= j; ++k) rank2[order[k]] = doubled;
    const auto t = static_cast<double>(j - i + 1);
    tie_term += t * t * t - t;
    i = j + 1;
  }

  int64_t w2 = 0;
  for (size_t i = 0; i < n; ++i)
    if (nz[i] > 0) w2 += rank2[i];
  res.w = static_cast<double>(w2) / 2.0;

  const auto nn = static_cast<double>(n);
  if (res.n <= kExactWilcoxonLimit) {
    // counts[s] = number of sign assignments whose doubled positive-rank sum is s.
    const int64_t total2 = std::accumulate(rank2.begin(), rank2.end(), int64_t{0});
    std::vector<uint64_t> counts(static_cast<size_t>(total2) + 1, 0);
    counts[0] = 1;
    int64_t reach = 0;
    for (auto r : rank2) {
      for (int64_t s = reach; s >= 0; --s)
        if (counts[static_cast<size_t>(s)]) counts[static_cast<size_t>(s + r)] += counts[static_cast<size_t>(s)];
      reach += r;
    }
    uint64_t at_least = 0;
    for (int64_t s = w2; s <= total2; ++s) at_least += counts[static_cast<size_t>(s)];
    res.p_value = std::ldexp(static_cast<double>(at_least), -res.n);
    res.exact = true;
    return res;
  }

  res.exact = false;
  const double mean = nn * (nn + 1) / 4.0;
  const double var = nn * (nn + 1) * (2 * nn + 1) / 24.0 - tie_term / 48.0;
  if (var <= 0) {
    res.p_value = 1.0;
    return res;
  }
  const double z = (res.w - mean - 0.5) / std::sqrt(var);
  res.p_value = 0.5 * std::erfc(z / std::sqrt(2.0));
  return res;
}

}  // namespace medseek
