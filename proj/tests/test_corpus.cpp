#include "doctest.h"
#include "intentclust/corpus.hpp"
#include "intentclust/error.hpp"
#include "support.hpp"

using namespace intentclust;

TEST_CASE("JSONL parsing assigns dense ids and gold classes") {
  const auto c = parse_corpus(
      "{\"text\": \"  check my balance \", \"label\": \"balance\"}\n"
      "\n"
      "{\"text\": \"lost card\", \"label\": \"lost_card\"}\n"
      "{\"text\": \"how much money do i have\", \"label\": \"balance\"}\n",
      CorpusFormat::Jsonl, "bank");
  CHECK(c.name() == "bank");
  REQUIRE(c.size() == 3);
  CHECK(c[0].text == "check my balance");
  CHECK(c[2].id == 2);
  CHECK(c.labeled());
  CHECK(*c.gold_k() == 2);
  CHECK(c.gold_ids() == std::vector<std::size_t>{0, 1, 0});
  CHECK(c.gold_names() == std::vector<std::string>{"balance", "lost_card"});
}

TEST_CASE("integer labels are stringified") {
  const auto c = parse_corpus("{\"text\":\"a\",\"label\":3}\n{\"text\":\"b\",\"label\":3}\n", CorpusFormat::Jsonl, "x");
  CHECK(*c[0].gold_intent == "3");
  CHECK(*c.gold_k() == 1);
}

TEST_CASE("unlabeled corpus") {
  const auto c = parse_corpus("{\"text\":\"a\"}\n{\"text\":\"b\"}", CorpusFormat::Jsonl, "x");
  CHECK_FALSE(c.labeled());
  CHECK(c.gold_ids().empty());
}

TEST_CASE("malformed JSONL reports the 1-based line") {
  try {
    parse_corpus("{\"text\":\"a\"}\n{\"text\": 5}\n", CorpusFormat::Jsonl, "x");
    FAIL("expected MalformedRecord");
  } catch (const MalformedRecord& e) {
    CHECK(e.line() == 2);
  }
  CHECK_THROWS_AS(parse_corpus("{\"text\":\"a\"}\nnot json\n", CorpusFormat::Jsonl, "x"), MalformedRecord);
  CHECK_THROWS_AS(parse_corpus("{\"text\":\"   \"}\n{\"text\":\"b\"}\n", CorpusFormat::Jsonl, "x"), MalformedRecord);
}

TEST_CASE("corpus-level validation") {
  CHECK_THROWS_AS(parse_corpus("", CorpusFormat::Jsonl, "x"), EmptyCorpus);
  CHECK_THROWS_AS(parse_corpus("{\"text\":\"a\"}\n", CorpusFormat::Jsonl, "x"), EmptyCorpus);
  CHECK_THROWS_AS(parse_corpus("{\"text\":\"a\",\"label\":\"l\"}\n{\"text\":\"b\"}\n", CorpusFormat::Jsonl, "x"),
                  MixedLabeling);
}

TEST_CASE("CSV with quoted fields") {
  const auto c = parse_corpus(
      "text,label\r\n"
      "\"hello, world\",greet\r\n"
      "\"she said \"\"hi\"\"\",greet\r\n"
      "\"two\nlines\",other\r\n",
      CorpusFormat::Csv, "csv");
  REQUIRE(c.size() == 3);
  CHECK(c[0].text == "hello, world");
  CHECK(c[1].text == "she said \"hi\"");
  CHECK(c[2].text == "two\nlines");
  CHECK(*c.gold_k() == 2);
}

TEST_CASE("CSV errors") {
  CHECK_THROWS_AS(parse_corpus("body\nx\ny\n", CorpusFormat::Csv, "x"), MalformedRecord);
  CHECK_THROWS_AS(parse_corpus("text,label\na,b,c\nd,e\n", CorpusFormat::Csv, "x"), MalformedRecord);
  CHECK_THROWS_AS(parse_corpus("text\n\"open\n", CorpusFormat::Csv, "x"), MalformedRecord);
}

TEST_CASE("format names") {
  CHECK(parse_corpus_format("JSONL") == CorpusFormat::Jsonl);
  CHECK(parse_corpus_format("csv") == CorpusFormat::Csv);
  CHECK_THROWS_AS(parse_corpus_format("tsv"), ConfigError);
}

TEST_CASE("save then load round-trips") {
  testing::TempDir dir("corpus");
  const auto c = parse_corpus(
      "{\"text\":\"caf\\u00e9 hours?\",\"label\":\"hours\"}\n{\"text\":\"tab\\there\",\"label\":\"x\"}\n",
      CorpusFormat::Jsonl, "roundtrip");
  save_jsonl(c, dir / "roundtrip.jsonl");
  const auto back = load_corpus(dir / "roundtrip.jsonl", CorpusFormat::Jsonl);
  CHECK(back == c);
  CHECK(to_jsonl(back) == to_jsonl(c));
}

TEST_CASE("load_corpus on a missing file") {
  CHECK_THROWS_AS(load_corpus("/nonexistent/corpus.jsonl", CorpusFormat::Jsonl), Error);
}
