#include "ioforensics/similarity.hpp"

#include "ioforensics/text.hpp"

#include <algorithm>
#include <bit>

namespace iof {

namespace {

// Hyyrö's bit-vector LCS: V starts all ones; for each symbol of the text,
// U = V & M, V = (V + U) | (V & ~M). Zero bits of V count the LCS.
std::size_t run_lcs(std::size_t m, std::size_t words,
                    const std::unordered_map<char32_t, std::vector<std::uint64_t>>& masks, std::u32string_view text) {
  if (m == 0 || text.empty()) return 0;
  std::vector<std::uint64_t> v(words, ~std::uint64_t{0});
  for (char32_t c : text) {
    auto it = masks.find(c);
    if (it == masks.end()) continue;  // M = 0 leaves V unchanged
    const auto& pm = it->second;
    std::uint64_t carry = 0;
    for (std::size_t w = 0; w < words; ++w) {
      const std::uint64_t u = v[w] & pm[w];
      const std::uint64_t t = v[w] + carry;
      const std::uint64_t c1 = t < carry;
      const std::uint64_t sum = t + u;
      const std::uint64_t c2 = sum < u;
      carry = c1 | c2;
      v[w] = sum | (v[w] & ~pm[w]);
    }
  }
  std::size_t lcs = 0;
  for (std::size_t w = 0; w < words; ++w) {
    std::uint64_t zeros = ~v[w];
    const std::size_t bits_here = std::min<std::size_t>(64, m - w * 64);
    if (bits_here < 64) zeros &= (std::uint64_t{1} << bits_here) - 1;
    lcs += static_cast<std::size_t>(std::popcount(zeros));
  }
  return lcs;
}

}  // namespace

LcsPattern::LcsPattern(std::u32string pattern) : pattern_(std::move(pattern)) {
  words_ = (pattern_.size() + 63) / 64;
  for (std::size_t i = 0; i < pattern_.size(); ++i) {
    auto& mask = masks_[pattern_[i]];
    if (mask.empty()) mask.assign(words_, 0);
    mask[i / 64] |= std::uint64_t{1} << (i % 64);
  }
}

std::size_t LcsPattern::lcs_with(std::u32string_view other) const {
  return run_lcs(pattern_.size(), words_, masks_, other);
}

double LcsPattern::ratio_with(std::u32string_view other) const {
  const std::size_t total = pattern_.size() + other.size();
  if (total == 0) return 1.0;
  return 2.0 * static_cast<double>(lcs_with(other)) / static_cast<double>(total);
}

std::size_t lcs_length(std::u32string_view a, std::u32string_view b) {
  // Pattern on the shorter side keeps the word count minimal.
  if (a.size() > b.size()) std::swap(a, b);
  return LcsPattern(std::u32string(a)).lcs_with(b);
}

double username_ratio(std::u32string_view a, std::u32string_view b) {
  const std::size_t total = a.size() + b.size();
  if (total == 0) return 1.0;
  return 2.0 * static_cast<double>(lcs_length(a, b)) / static_cast<double>(total);
}

double username_ratio(std::string_view a, std::string_view b) {
  return username_ratio(text::to_u32(a), text::to_u32(b));
}

double username_ratio_bound(std::size_t len_a, std::size_t len_b) {
  if (len_a + len_b == 0) return 1.0;
  return 2.0 * static_cast<double>(std::min(len_a, len_b)) / static_cast<double>(len_a + len_b);
}

// ---------------------------------------------------------------------------

namespace {

struct Block {
  std::size_t i = 0, j = 0, size = 0;
};

// Longest common block of a[alo, ahi) and b[blo, bhi); earliest end in a wins,
// then earliest end in b, which for equal sizes is the earliest start.
Block longest_block(std::u32string_view a, std::u32string_view b, std::size_t alo, std::size_t ahi,
                    std::size_t blo, std::size_t bhi, std::vector<std::size_t>& prev, std::vector<std::size_t>& cur) {
  Block best{alo, blo, 0};
  const std::size_t width = bhi - blo;
  std::fill(prev.begin(), prev.begin() + width + 1, 0);
  for (std::size_t i = alo; i < ahi; ++i) {
    cur[0] = 0;
    for (std::size_t j = blo; j < bhi; ++j) {
      const std::size_t col = j - blo + 1;
      if (a[i] == b[j]) {
        const std::size_t k = prev[col - 1] + 1;
        cur[col] = k;
        if (k > best.size) best = {i + 1 - k, j + 1 - k, k};
      } else {
        cur[col] = 0;
      }
    }
    std::swap(prev, cur);
  }
  return best;
}

}  // namespace

std::size_t gestalt_matches(std::u32string_view a, std::u32string_view b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  struct Range {
    std::size_t alo, ahi, blo, bhi;
  };
  std::vector<Range> stack{{0, a.size(), 0, b.size()}};
  std::size_t matched = 0;
  while (!stack.empty()) {
    const Range r = stack.back();
    stack.pop_back();
    if (r.alo >= r.ahi || r.blo >= r.bhi) continue;
    const Block blk = longest_block(a, b, r.alo, r.ahi, r.blo, r.bhi, prev, cur);
    if (blk.size == 0) continue;
    matched += blk.size;
    stack.push_back({r.alo, blk.i, r.blo, blk.j});
    stack.push_back({blk.i + blk.size, r.ahi, blk.j + blk.size, r.bhi});
  }
  return matched;
}

double gestalt_ratio(std::u32string_view a, std::u32string_view b) {
  const std::size_t total = a.size() + b.size();
  if (total == 0) return 1.0;
  return 2.0 * static_cast<double>(gestalt_matches(a, b)) / static_cast<double>(total);
}

double gestalt_ratio(std::string_view a, std::string_view b) {
  return gestalt_ratio(text::to_u32(a), text::to_u32(b));
}

}  // namespace iof
