#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace iof {

/// Length of the longest common subsequence, bit-parallel over the code points
/// of `a` (64 per machine word).
std::size_t lcs_length(std::u32string_view a, std::u32string_view b);

/// Indel similarity 2·LCS / (|a| + |b|): the edit-distance ratio where an
/// insertion or deletion costs 1 and a substitution costs 2. Lengths are in code
/// points. Two empty strings score 1.
double username_ratio(std::u32string_view a, std::u32string_view b);
double username_ratio(std::string_view a_utf8, std::string_view b_utf8);

/// Upper bound on username_ratio from lengths alone: 2·min / (|a| + |b|).
double username_ratio_bound(std::size_t len_a, std::size_t len_b);

/// Precomputed match masks for one string, reused across many comparisons.
class LcsPattern {
 public:
  explicit LcsPattern(std::u32string pattern);
  std::size_t lcs_with(std::u32string_view other) const;
  double ratio_with(std::u32string_view other) const;
  std::size_t size() const { return pattern_.size(); }
  const std::u32string& str() const { return pattern_; }

 private:
  std::u32string pattern_;
  std::size_t words_ = 0;
  std::unordered_map<char32_t, std::vector<std::uint64_t>> masks_;
};

/// Ratcliff–Obershelp similarity 2M / (|a| + |b|), M the characters matched by
/// recursively taking the longest common block (earliest in `a`, then earliest
/// in `b`) and recursing on both sides. No junk heuristics. Two empty strings
/// score 1. Not symmetric in general: block choice can change M.
double gestalt_ratio(std::u32string_view a, std::u32string_view b);
double gestalt_ratio(std::string_view a_utf8, std::string_view b_utf8);

/// Matched character count M used by gestalt_ratio.
std::size_t gestalt_matches(std::u32string_view a, std::u32string_view b);

}  // namespace iof
