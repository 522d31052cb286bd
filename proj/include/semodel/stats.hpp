#pragma once
// Column statistics shared by the labeler and the relationship classifier.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace semodel::stats {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

inline std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

inline std::optional<double> parse_number(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return std::nullopt;
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

/// Numeric when at least 80% of the non-empty cells parse as numbers.
inline bool is_numeric(const std::vector<std::string>& values) {
  std::size_t nonempty = 0, numeric = 0;
  for (const auto& v : values) {
    if (trim(v).empty()) continue;
    ++nonempty;
    if (parse_number(v)) ++numeric;
  }
  return nonempty > 0 && numeric * 5 >= nonempty * 4;
}

inline std::vector<double> numeric_values(const std::vector<std::string>& values) {
  std::vector<double> out;
  for (const auto& v : values)
    if (auto x = parse_number(v)) out.push_back(*x);
  return out;
}

/// Lowercase alphanumeric runs.
inline std::vector<std::string> tokenize(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      cur += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

/// Identifier tokens: splits camelCase, snake_case, digits and punctuation.
inline std::vector<std::string> name_tokens(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) out.push_back(lower(cur));
    cur.clear();
  };
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto c = static_cast<unsigned char>(s[i]);
    if (!std::isalnum(c)) {
      flush();
      continue;
    }
    if (!cur.empty()) {
      const auto p = static_cast<unsigned char>(cur.back());
      const bool upper_after_lower = std::isupper(c) && std::islower(p);
      const bool digit_boundary = (std::isdigit(c) != 0) != (std::isdigit(p) != 0);
      const bool acronym_end = std::isupper(c) && std::isupper(p) && i + 1 < s.size() &&
                               std::islower(static_cast<unsigned char>(s[i + 1]));
      if (upper_after_lower || digit_boundary || acronym_end) flush();
    }
    cur += static_cast<char>(c);
  }
  flush();
  return out;
}

template <class T>
double jaccard(const std::set<T>& a, const std::set<T>& b) {
  if (a.empty() && b.empty()) return 0.0;
  std::size_t inter = 0;
  for (const auto& x : a) inter += b.count(x);
  return static_cast<double>(inter) / static_cast<double>(a.size() + b.size() - inter);
}

inline std::set<std::string> value_set(const std::vector<std::string>& values) {
  std::set<std::string> out;
  for (const auto& v : values) {
    auto t = trim(v);
    if (!t.empty()) out.insert(lower(t));
  }
  return out;
}

/// Two-sample Kolmogorov-Smirnov statistic sup |F_a - F_b|; 1 if a side is empty.
inline double ks_statistic(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) return 1.0;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

/// Mann-Whitney U of `a` against `b` with mid-ranks for ties, divided by
/// |a|·|b| (the probability-of-superiority form, in [0,1]); 0 if a side is empty.
inline double mann_whitney(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.empty() || b.empty()) return 0.0;
  std::vector<std::pair<double, int>> all;
  for (double x : a) all.emplace_back(x, 0);
  for (double x : b) all.emplace_back(x, 1);
  std::sort(all.begin(), all.end());
  double rank_sum_a = 0.0;
  for (std::size_t i = 0; i < all.size();) {
    std::size_t j = i;
    while (j < all.size() && all[j].first == all[i].first) ++j;
    const double mid = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k)
      if (all[k].second == 0) rank_sum_a += mid;
    i = j;
  }
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  const double u = rank_sum_a - na * (na + 1.0) / 2.0;
  return u / (na * nb);
}

/// Frequency of each distinct (normalized) value: the column's value histogram.
inline std::vector<double> value_histogram(const std::vector<std::string>& values) {
  std::map<std::string, double> counts;
  for (const auto& v : values) {
    auto t = trim(v);
    if (!t.empty()) counts[lower(t)] += 1.0;
  }
  std::vector<double> out;
  for (auto& [_, c] : counts) out.push_back(c);
  return out;
}

using SparseVector = std::map<std::string, double>;

inline double cosine(const SparseVector& a, const SparseVector& b) {
  double dot = 0, na = 0, nb = 0;
  for (auto& [k, v] : a) {
    na += v * v;
    if (auto it = b.find(k); it != b.end()) dot += v * it->second;
  }
  for (auto& [_, v] : b) nb += v * v;
  if (na == 0 || nb == 0) return 0.0;
  return std::clamp(dot / std::sqrt(na * nb), 0.0, 1.0);
}

inline std::map<std::string, double> term_counts(const std::vector<std::string>& values) {
  std::map<std::string, double> tf;
  for (const auto& v : values)
    for (auto& t : tokenize(v)) tf[t] += 1.0;
  return tf;
}

/// Smoothed inverse document frequency over a corpus of term-count documents.
class Idf {
 public:
  Idf() = default;
  explicit Idf(const std::vector<const std::map<std::string, double>*>& docs) : n_(docs.size()) {
    for (auto* d : docs)
      for (auto& [t, _] : *d) df_[t] += 1;
  }

  double operator()(const std::string& term) const {
    auto it = df_.find(term);
    const double df = it == df_.end() ? 0.0 : it->second;
    return std::log((static_cast<double>(n_) + 1.0) / (df + 1.0)) + 1.0;
  }

  SparseVector weigh(const std::map<std::string, double>& tf) const {
    SparseVector out;
    for (auto& [t, c] : tf) out[t] = c * (*this)(t);
    return out;
  }

 private:
  std::size_t n_ = 0;
  std::map<std::string, double> df_;
};

}  // namespace semodel::stats
