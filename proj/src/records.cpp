#include "ioforensics/records.hpp"

#include <charconv>
#include <cstdio>

namespace iof {

std::string_view to_string(Corpus c) {
  switch (c) {
    case Corpus::takedown: return "takedown";
    case Corpus::live: return "live";
    case Corpus::negative: return "negative";
  }
  return "unknown";
}

std::string_view to_string(SuspensionStatus s) {
  switch (s) {
    case SuspensionStatus::active: return "active";
    case SuspensionStatus::suspended_t1: return "suspended_t1";
    case SuspensionStatus::suspended_t2: return "suspended_t2";
    case SuspensionStatus::unknown: return "unknown";
  }
  return "unknown";
}

std::string_view to_string(TweetKind k) {
  switch (k) {
    case TweetKind::original: return "original";
    case TweetKind::retweet: return "retweet";
    case TweetKind::reply: return "reply";
    case TweetKind::quote: return "quote";
  }
  return "original";
}

std::optional<Corpus> parse_corpus(std::string_view s) {
  if (s == "takedown") return Corpus::takedown;
  if (s == "live") return Corpus::live;
  if (s == "negative") return Corpus::negative;
  return std::nullopt;
}

std::optional<SuspensionStatus> parse_suspension_status(std::string_view s) {
  if (s == "active") return SuspensionStatus::active;
  if (s == "suspended_t1") return SuspensionStatus::suspended_t1;
  if (s == "suspended_t2") return SuspensionStatus::suspended_t2;
  if (s == "unknown") return SuspensionStatus::unknown;
  return std::nullopt;
}

namespace {

bool read_int(std::string_view s, std::size_t pos, std::size_t len, int& out) {
  if (pos + len > s.size()) return false;
  for (std::size_t i = pos; i < pos + len; ++i)
    if (s[i] < '0' || s[i] > '9') return false;
  auto [p, ec] = std::from_chars(s.data() + pos, s.data() + pos + len, out);
  return ec == std::errc{} && p == s.data() + pos + len;
}

}  // namespace

std::optional<Date> parse_date(std::string_view s) {
  int y = 0, m = 0, d = 0;
  if (s.size() < 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
  if (!read_int(s, 0, 4, y) || !read_int(s, 5, 2, m) || !read_int(s, 8, 2, d)) return std::nullopt;
  Date date{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
            std::chrono::day{static_cast<unsigned>(d)}};
  if (!date.ok()) return std::nullopt;
  if (s.size() == 10) return date;
  // Date-only column carrying a time part: keep the calendar date.
  if (parse_timestamp(s)) return date;
  return std::nullopt;
}

std::optional<Timestamp> parse_timestamp(std::string_view s) {
  if (!s.empty() && (s.back() == 'Z' || s.back() == 'z')) s.remove_suffix(1);
  if (s.size() < 10) return std::nullopt;
  int y = 0, mo = 0, d = 0, hh = 0, mm = 0, ss = 0;
  if (s[4] != '-' || s[7] != '-') return std::nullopt;
  if (!read_int(s, 0, 4, y) || !read_int(s, 5, 2, mo) || !read_int(s, 8, 2, d)) return std::nullopt;
  if (s.size() > 10) {
    if (s[10] != ' ' && s[10] != 'T') return std::nullopt;
    if (s.size() != 16 && s.size() != 19) return std::nullopt;
    if (s[13] != ':' || !read_int(s, 11, 2, hh) || !read_int(s, 14, 2, mm)) return std::nullopt;
    if (s.size() == 19 && (s[16] != ':' || !read_int(s, 17, 2, ss))) return std::nullopt;
    if (hh > 23 || mm > 59 || ss > 60) return std::nullopt;
  }
  Date date{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(mo)},
            std::chrono::day{static_cast<unsigned>(d)}};
  if (!date.ok()) return std::nullopt;
  return std::chrono::sys_days{date} + std::chrono::hours{hh} + std::chrono::minutes{mm} +
         std::chrono::seconds{ss};
}

std::string format_date(Date d) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()),
                static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
  return buf;
}

std::string format_timestamp(Timestamp t) {
  const auto days = std::chrono::floor<std::chrono::days>(t);
  const Date d{days};
  const std::chrono::hh_mm_ss hms{t - days};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s %02d:%02d:%02d", format_date(d).c_str(),
                static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                static_cast<int>(hms.seconds().count()));
  return buf;
}

}  // namespace iof
