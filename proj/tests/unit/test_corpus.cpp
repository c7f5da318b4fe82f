#include <map>
#include <sstream>

#include "doctest.h"
#include "wordorder/corpus.hpp"
#include "wordorder/rng.hpp"

using namespace wordorder;

namespace {

InputPattern pat(char s, char v, char o) {
  return make_pattern(mark_from_letter(s), mark_from_letter(v), mark_from_letter(o));
}

PatternCounts random_counts(Rng& rng, int max_cell) {
  PatternCounts pc;
  for (int p = 0; p < kPatternCount; ++p) {
    for (int o = 0; o < kOrderCount; ++o) {
      pc.counts[p][o] = static_cast<int>(rng.bounded(static_cast<std::uint64_t>(max_cell + 1)));
    }
  }
  return pc;
}

}  // namespace

TEST_CASE("transcribed count table: spot rows, sums, and totals") {
  const PatternCounts& t = table2_counts();

  const InputPattern tff = pat('t', 'f', 'f');
  CHECK(t.at(tff, WordOrder::SVO) == 519);
  CHECK(t.at(tff, WordOrder::OVS) == 7);
  CHECK(t.at(tff, WordOrder::VSO) == 145);
  CHECK(t.at(tff, WordOrder::SOV) == 17);
  CHECK(t.at(tff, WordOrder::VOS) == 28);
  CHECK(t.at(tff, WordOrder::OSV) == 4);

  const InputPattern ffc = pat('f', 'f', 'c');
  CHECK(t.at(ffc, WordOrder::OVS) == 184);
  CHECK(t.at(ffc, WordOrder::SOV) == 1);
  CHECK(t.at(ffc, WordOrder::OSV) == 4);
  CHECK(t.at(ffc, WordOrder::SVO) == 0);
  CHECK(t.at(ffc, WordOrder::VSO) == 0);
  CHECK(t.at(ffc, WordOrder::VOS) == 0);

  CHECK(t.total() == 2955);
  CHECK(t.col_sum(WordOrder::SVO) == 1477);
  CHECK(t.col_sum(WordOrder::OVS) == 540);
  CHECK(t.col_sum(WordOrder::VSO) == 321);
  CHECK(t.col_sum(WordOrder::SOV) == 297);
  CHECK(t.col_sum(WordOrder::VOS) == 245);
  CHECK(t.col_sum(WordOrder::OSV) == 75);

  static constexpr int kRowSums[kPatternCount] = {40, 3,  34, 0, 0, 0, 275, 66, 720,
                                                  10, 1,  30, 0, 0, 0, 193, 11, 649,
                                                  33, 9,  14, 0, 1, 0, 404, 189, 273};
  for (int p = 0; p < kPatternCount; ++p) CHECK(t.row_sum(p) == kRowSums[p]);
}

TEST_CASE("generate_corpus: exact multiplicities, determinism, empty input") {
  const Corpus corpus = generate_corpus(table2_counts(), 42);
  CHECK(corpus.size() == 2955);
  const PatternCounts back = count_back(corpus);
  for (int p = 0; p < kPatternCount; ++p) {
    for (int o = 0; o < kOrderCount; ++o) {
      CHECK(back.counts[p][o] == table2_counts().counts[p][o]);
    }
  }

  const Corpus again = generate_corpus(table2_counts(), 42);
  CHECK(corpus.sentences == again.sentences);
  const Corpus other = generate_corpus(table2_counts(), 43);
  CHECK(corpus.sentences != other.sentences);

  const Corpus empty = generate_corpus(PatternCounts{}, 1);
  CHECK(empty.empty());
}

TEST_CASE("generate then count back is the identity on random tables") {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const PatternCounts pc = random_counts(rng, 5);
    const Corpus corpus = generate_corpus(pc, 100 + trial);
    const PatternCounts back = count_back(corpus);
    for (int p = 0; p < kPatternCount; ++p) {
      for (int o = 0; o < kOrderCount; ++o) CHECK(back.counts[p][o] == pc.counts[p][o]);
    }
  }
}

TEST_CASE("resample_corpus: size, determinism, support") {
  const Corpus test = resample_corpus(table2_counts(), 1000, 7);
  CHECK(test.size() == 1000);
  CHECK(test.sentences == resample_corpus(table2_counts(), 1000, 7).sentences);
  CHECK(test.sentences != resample_corpus(table2_counts(), 1000, 8).sentences);
  // only observed cells can be drawn
  const PatternCounts back = count_back(test);
  for (int p = 0; p < kPatternCount; ++p) {
    for (int o = 0; o < kOrderCount; ++o) {
      if (table2_counts().counts[p][o] == 0) CHECK(back.counts[p][o] == 0);
    }
  }
  CHECK_THROWS_AS(resample_corpus(PatternCounts{}, 10, 1), std::invalid_argument);
}

TEST_CASE("split: sizes, determinism, partition") {
  const Corpus corpus = resample_corpus(table2_counts(), 1000, 3);

  const SplitResult all_train = split(corpus, {1.0, 0.0, 0.0}, 5);
  CHECK(all_train.train.size() == 1000);
  CHECK(all_train.dev.empty());
  CHECK(all_train.test.empty());

  const SplitResult r = split(corpus, {0.6, 0.2, 0.2}, 5);
  CHECK(r.train.size() == 600);
  CHECK(r.dev.size() == 200);
  CHECK(r.test.size() == 200);

  const SplitResult r2 = split(corpus, {0.6, 0.2, 0.2}, 5);
  CHECK(r.train.sentences == r2.train.sentences);
  CHECK(r.dev.sentences == r2.dev.sentences);
  CHECK(r.test.sentences == r2.test.sentences);

  // disjoint and exhaustive as a multiset
  std::map<std::pair<int, int>, int> original, pieces;
  for (const Sentence& s : corpus.sentences) {
    ++original[{s.input.index(), static_cast<int>(s.observed)}];
  }
  for (const Corpus* part : {&r.train, &r.dev, &r.test}) {
    for (const Sentence& s : part->sentences) {
      ++pieces[{s.input.index(), static_cast<int>(s.observed)}];
    }
  }
  CHECK(original == pieces);

  CHECK_THROWS_AS(split(corpus, {0.5, 0.2, 0.2}, 5), std::invalid_argument);
  CHECK_THROWS_AS(split(corpus, {-0.2, 0.6, 0.6}, 5), std::invalid_argument);
}

TEST_CASE("baseline accuracy") {
  const Corpus corpus = generate_corpus(table2_counts(), 42);
  CHECK(baseline_accuracy(corpus) == 1477.0 / 2955.0);

  Corpus one;
  one.sentences.push_back({pat('t', 'f', 'f'), WordOrder::SVO});
  CHECK(baseline_accuracy(one) == 1.0);

  CHECK_THROWS_AS(baseline_accuracy(Corpus{}), std::invalid_argument);
}

TEST_CASE("upper-bound predictor: modal orders, fallback, dominance") {
  const Corpus corpus = generate_corpus(table2_counts(), 42);
  const UpperBoundPredictor ub = upper_bound_predictor(corpus);
  CHECK(upper_bound_accuracy(ub, corpus) == 2013.0 / 2955.0);
  CHECK(ub.predict(pat('f', 'f', 'c')) == WordOrder::OVS);
  CHECK(ub.predict(pat('t', 'f', 'f')) == WordOrder::SVO);
  CHECK(ub.predict(pat('t', 'c', 't')) == WordOrder::SVO);  // unseen pattern
  CHECK(ub.predict(pat('f', 'f', 'f')) == WordOrder::VSO);

  // modal choice dominates any fixed choice, on random corpora
  Rng rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const Corpus c = generate_corpus(random_counts(rng, 4), trial);
    if (c.empty()) continue;
    CHECK(upper_bound_accuracy(upper_bound_predictor(c), c) >= baseline_accuracy(c));
  }

  CHECK_THROWS_AS(upper_bound_predictor(Corpus{}), std::invalid_argument);
}

TEST_CASE("sentence file round trip") {
  Rng rng(17);
  Corpus corpus = generate_corpus(random_counts(rng, 3), 9);
  corpus.provenance = "round-trip fixture";
  std::ostringstream out;
  write_sentences(out, corpus);
  std::istringstream in(out.str());
  const Corpus back = read_sentences(in, "fixture");
  CHECK(back.sentences == corpus.sentences);
}

TEST_CASE("sentence file: comments, blanks, and malformed lines") {
  {
    std::istringstream in("# comment\n\nt f f\tSVO\nc t f\tOVS\n");
    const Corpus c = read_sentences(in, "ok");
    REQUIRE(c.size() == 2);
    CHECK(c.sentences[0].input == pat('t', 'f', 'f'));
    CHECK(c.sentences[1].observed == WordOrder::OVS);
  }
  {
    std::istringstream in("t f f\tSVO\nt x f\tSVO\n");
    CHECK_THROWS_WITH_AS(read_sentences(in, "bad"),
                         doctest::Contains("bad:2"), ParseError);
  }
  {
    std::istringstream in("t f f SVO\n");  // missing tab
    CHECK_THROWS_WITH_AS(read_sentences(in, "bad"), doctest::Contains("bad:1"), ParseError);
  }
  {
    std::istringstream in("t f f\tSVX\n");
    CHECK_THROWS_AS(read_sentences(in, "bad"), ParseError);
  }
  {
    std::istringstream in("t  f f\tSVO\n");  // wrong mark field shape
    CHECK_THROWS_AS(read_sentences(in, "bad"), ParseError);
  }
}

TEST_CASE("counts CSV export") {
  const std::string csv = counts_csv(table2_counts());
  std::istringstream in(csv);
  std::string line;
  REQUIRE(std::getline(in, line));
  CHECK(line == "S,V,O,SVO,OVS,VSO,SOV,VOS,OSV");
  int rows = 0;
  std::string tff_row;
  while (std::getline(in, line)) {
    ++rows;
    if (line.rfind("t,f,f,", 0) == 0) tff_row = line;
  }
  CHECK(rows == kPatternCount);
  CHECK(tff_row == "t,f,f,519,7,145,17,28,4");
}
