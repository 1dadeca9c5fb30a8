#include "ioforensics/csv.hpp"
#include "ioforensics/digest.hpp"
#include "ioforensics/records.hpp"
#include "ioforensics/text.hpp"

#include <doctest.h>

#include <sstream>

using namespace iof;

TEST_CASE("utf8 round trip and invalid bytes") {
  const std::string s = "İhsan ş 💢 ⭐️";
  CHECK(text::to_utf8(text::to_u32(s)) == s);
  CHECK(text::to_u32("a\xffz") == U"a�z");
  CHECK(text::to_u32("\xe2\x82") == U"��");
}

TEST_CASE("turkish folding") {
  CHECK(text::fold_turkish("İSTANBUL") == "istanbul");
  CHECK(text::fold_turkish("ISPARTA") == "isparta");
  CHECK(text::fold_turkish("ılık") == "ilik");
  CHECK(text::fold_turkish("YEDEK HESAP") == text::fold_turkish("yedek hesap"));
  CHECK(text::fold_turkish("MAIN ACCOUNT") == "main account");
  // Decomposed input folds like its precomposed form.
  CHECK(text::fold_turkish("ş") == text::fold_turkish("ş"));
}

TEST_CASE("whitespace helpers") {
  CHECK(text::trim("  a b \t") == "a b");
  auto parts = text::split_whitespace("  @a\t@b  c \n");
  REQUIRE(parts.size() == 3);
  CHECK(parts[0] == "@a");
  CHECK(parts[2] == "c");
  CHECK(text::split_whitespace("   ").empty());
}

TEST_CASE("csv reader handles quoting, embedded newlines and BOM") {
  std::istringstream in("\xEF\xBB\xBFh1,h2\n\"a,b\",\"say \"\"hi\"\"\"\n\"multi\nline\",x\r\nlast,\n");
  csv::Reader r(in);
  std::vector<std::string> f;
  REQUIRE(r.next(f));
  CHECK(f == std::vector<std::string>{"h1", "h2"});
  REQUIRE(r.next(f));
  CHECK(f == std::vector<std::string>{"a,b", "say \"hi\""});
  REQUIRE(r.next(f));
  CHECK(f == std::vector<std::string>{"multi\nline", "x"});
  REQUIRE(r.next(f));
  CHECK(f == std::vector<std::string>{"last", ""});
  CHECK_FALSE(r.next(f));
}

TEST_CASE("csv reader flags malformed quoting") {
  std::istringstream in("\"open,x\n");
  csv::Reader r(in);
  std::vector<std::string> f;
  r.next(f);
  CHECK(r.malformed());
  std::istringstream in2("\"a\"b,c\n");
  csv::Reader r2(in2);
  r2.next(f);
  CHECK(r2.malformed());
}

TEST_CASE("csv writer round trips through the reader") {
  const std::vector<std::string> row{"plain", "with,comma", "with \"quote\"", "line\nbreak", ""};
  std::ostringstream out;
  csv::write_row(out, row);
  std::istringstream in(out.str());
  csv::Reader r(in);
  std::vector<std::string> back;
  REQUIRE(r.next(back));
  CHECK(back == row);
}

TEST_CASE("timestamps and dates") {
  auto t = parse_timestamp("2020-01-15 10:30");
  REQUIRE(t);
  CHECK(format_timestamp(*t) == "2020-01-15 10:30:00");
  CHECK(parse_timestamp("2020-01-15T10:30:05Z") == parse_timestamp("2020-01-15 10:30:05"));
  CHECK(format_timestamp(*parse_timestamp("2020-01-15")) == "2020-01-15 00:00:00");
  CHECK_FALSE(parse_timestamp("2020-13-01"));
  CHECK_FALSE(parse_timestamp("yesterday"));
  auto d = parse_date("2019-12-31");
  REQUIRE(d);
  CHECK(format_date(*d) == "2019-12-31");
  CHECK(parse_date("2019-12-31 23:59:59") == d);
  CHECK_FALSE(parse_date("2019-02-30"));
}

TEST_CASE("enum names round trip") {
  for (auto c : {Corpus::takedown, Corpus::live, Corpus::negative}) CHECK(parse_corpus(to_string(c)) == c);
  for (auto s : {SuspensionStatus::active, SuspensionStatus::suspended_t1, SuspensionStatus::suspended_t2,
                 SuspensionStatus::unknown})
    CHECK(parse_suspension_status(to_string(s)) == s);
  CHECK(suspended_by_t2(SuspensionStatus::suspended_t1));
  CHECK(suspended_by_t2(SuspensionStatus::suspended_t2));
  CHECK_FALSE(suspended_by_t1(SuspensionStatus::suspended_t2));
}

TEST_CASE("sha256 known answers") {
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  // Length prefixes keep field boundaries apart.
  CHECK(Sha256().field("ab").field("c").hex() != Sha256().field("a").field("bc").hex());
}
