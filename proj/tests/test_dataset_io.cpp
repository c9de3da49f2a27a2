#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>
#include <json.hpp>

#include <algorithm>
#include <random>

#include "sarcbench/dataset.hpp"
#include "sarcbench/errors.hpp"
#include "support/temp_dir.hpp"

using namespace sarcbench;
using sarcbench::testing::TempDir;

namespace {

std::string sample_line(const std::string& id, const std::string& text,
                        const std::string& variety = "in",
                        const std::string& label = "sarcastic",
                        const std::string& explanation = "because it mocks") {
  nlohmann::json j{{"id", id},
                   {"text", text},
                   {"variety", variety},
                   {"label", label},
                   {"explanation", explanation}};
  return j.dump() + "\n";
}

}  // namespace

TEST_CASE("word_count counts maximal non-whitespace runs") {
  CHECK(word_count("") == 0);
  CHECK(word_count("nek  minit ") == 2);
  CHECK(word_count("The sun is out and I am at work yay") == 10);
  CHECK(word_count("   ") == 0);
  CHECK(word_count("one") == 1);
  CHECK(word_count("a\tb\nc") == 3);
}

TEST_CASE("word_count is trim-invariant") {
  std::mt19937 rng(123);
  for (int trial = 0; trial < 200; trial++) {
    std::string s;
    int len = static_cast<int>(rng() % 30);
    for (int i = 0; i < len; i++) {
      const char* alphabet = "ab  \t\nxyz ";
      s.push_back(alphabet[rng() % 10]);
    }
    std::string padded = "  \t" + s + " \n ";
    CHECK(word_count(s) == word_count(padded));
  }
}

TEST_CASE("load_dataset parses a 150-line Indian English file") {
  TempDir dir;
  std::string content;
  for (int i = 0; i < 150; i++) content += sample_line("in-" + std::to_string(i), "text " + std::to_string(i));
  auto path = dir.write("besstie-in.jsonl", content);

  auto ds = load_dataset(path, Variety::Indian);
  CHECK(ds.samples.size() == 150);
  CHECK(ds.name == "besstie-in");
  CHECK(ds.samples[0].id == "in-0");
  CHECK(ds.samples[149].variety == Variety::Indian);
}

TEST_CASE("load_dataset accepts an empty file") {
  TempDir dir;
  auto path = dir.write("empty.jsonl", "");
  auto ds = load_dataset(path);
  CHECK(ds.samples.empty());
}

TEST_CASE("load_dataset rejects a sarcastic sample without explanation") {
  TempDir dir;
  nlohmann::json j{{"id", "x"}, {"text", "t"}, {"variety", "au"}, {"label", "sarcastic"}};
  auto path = dir.write("bad.jsonl", j.dump() + "\n");
  CHECK_THROWS_AS(load_dataset(path), MissingFieldError);
}

TEST_CASE("load_dataset accepts a non-sarcastic sample without explanation") {
  TempDir dir;
  auto path = dir.write("mixed.jsonl", sample_line("a", "t1") +
                                           sample_line("b", "t2", "in", "not_sarcastic", ""));
  auto ds = load_dataset(path);
  REQUIRE(ds.samples.size() == 2);
  CHECK(ds.samples[0].is_sarcastic());
  CHECK_FALSE(ds.samples[1].is_sarcastic());
}

TEST_CASE("load_dataset error cases carry line numbers") {
  TempDir dir;
  SUBCASE("malformed json") {
    auto path = dir.write("m.jsonl", sample_line("a", "t") + "{not json\n");
    try {
      load_dataset(path);
      FAIL("expected MalformedLineError");
    } catch (const MalformedLineError& e) {
      CHECK(e.line_no == 2);
    }
  }
  SUBCASE("missing field") {
    auto path = dir.write("m.jsonl", "{\"id\": \"a\", \"text\": \"t\"}\n");
    try {
      load_dataset(path);
      FAIL("expected MissingFieldError");
    } catch (const MissingFieldError& e) {
      CHECK(e.line_no == 1);
      CHECK(e.field == "variety");
    }
  }
  SUBCASE("duplicate id") {
    auto path = dir.write("m.jsonl", sample_line("dup", "t1") + sample_line("dup", "t2"));
    CHECK_THROWS_AS(load_dataset(path), DuplicateIdError);
  }
  SUBCASE("variety mismatch") {
    auto path = dir.write("m.jsonl", sample_line("a", "t", "au"));
    try {
      load_dataset(path, Variety::Indian);
      FAIL("expected VarietyMismatchError");
    } catch (const VarietyMismatchError& e) {
      CHECK(e.line_no == 1);
    }
  }
  SUBCASE("unknown variety string") {
    auto path = dir.write("m.jsonl", sample_line("a", "t", "uk"));
    CHECK_THROWS_AS(load_dataset(path), MalformedLineError);
  }
  SUBCASE("empty text") {
    auto path = dir.write("m.jsonl", sample_line("a", "   "));
    CHECK_THROWS_AS(load_dataset(path), MalformedLineError);
  }
}

TEST_CASE("serialization round-trips field-for-field") {
  TempDir dir;
  std::string content = sample_line("a", "t1", "au") + sample_line("b", "t2 extra", "au") +
                        sample_line("c", "t3", "au", "not_sarcastic", "");
  auto path = dir.write("ds.jsonl", content);
  auto ds = load_dataset(path);

  auto path2 = dir.write("ds2.jsonl", serialize_dataset(ds));
  auto ds2 = load_dataset(path2);
  REQUIRE(ds2.samples.size() == ds.samples.size());
  for (size_t i = 0; i < ds.samples.size(); i++) CHECK(ds.samples[i] == ds2.samples[i]);
}

TEST_CASE("dataset_stats means and edge cases") {
  Dataset ds;
  ds.name = "tiny";

  SUBCASE("empty dataset is an error") { CHECK_THROWS_AS(dataset_stats(ds), EmptyDatasetError); }

  SUBCASE("single sample") {
    ds.samples.push_back({"a", "a b", Variety::StandardAmerican, "sarcastic", "c"});
    auto stats = dataset_stats(ds);
    CHECK(stats.n == 1);
    CHECK(stats.avg_text_words == doctest::Approx(2.0));
    CHECK(stats.avg_expl_words == doctest::Approx(1.0));
  }

  SUBCASE("two samples averaged") {
    ds.samples.push_back({"a", "one", Variety::StandardAmerican, "sarcastic", "x"});
    ds.samples.push_back({"b", "one two", Variety::StandardAmerican, "sarcastic", "x y z"});
    auto stats = dataset_stats(ds);
    CHECK(stats.avg_text_words == doctest::Approx(1.5));
    CHECK(stats.avg_expl_words == doctest::Approx(2.0));
  }
}

TEST_CASE("dataset_stats is permutation-invariant") {
  Dataset ds;
  ds.name = "p";
  std::mt19937 rng(7);
  for (int i = 0; i < 40; i++) {
    std::string text, expl;
    for (unsigned w = 0; w < 1 + rng() % 9; w++) text += "w ";
    for (unsigned w = 0; w < 1 + rng() % 9; w++) expl += "e ";
    ds.samples.push_back({"id" + std::to_string(i), text, Variety::Australian, "sarcastic", expl});
  }
  auto before = dataset_stats(ds);
  std::shuffle(ds.samples.begin(), ds.samples.end(), rng);
  auto after = dataset_stats(ds);
  CHECK(before.avg_text_words == doctest::Approx(after.avg_text_words).epsilon(1e-12));
  CHECK(before.avg_expl_words == doctest::Approx(after.avg_expl_words).epsilon(1e-12));
}
