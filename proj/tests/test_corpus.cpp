#include "misinfo/corpus.hpp"

#include <cstdio>
#include <fstream>

#include "doctest.h"
#include "misinfo/error.hpp"

using namespace misinfo;

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
  const std::string path = "corpus_" + name;
  std::ofstream out(path, std::ios::binary);
  out << content;
  return path;
}

}  // namespace

TEST_CASE("dataset loads from a JSON array with full records") {
  const auto ds = dataset_from_json_text(
      R"([{"id":"t1","text":"corona eri mu uganda","label":"misinformation","source":"twitter"},
          {"id":"f1","text":"ekilwadde kya corona","label":"no-misinformation","source":"facebook"}])",
      "test");
  REQUIRE(ds.size() == 2);
  CHECK(ds.documents[0].id == "t1");
  CHECK(ds.documents[0].source == Source::twitter);
  CHECK(*ds.documents[0].label == Label::misinformation);
  CHECK(ds.documents[1].source == Source::facebook);
  CHECK(*ds.documents[1].label == Label::no_misinformation);
}

TEST_CASE("dataset loads newline-delimited records") {
  const auto ds = dataset_from_json_text(
      "{\"text\":\"a\",\"label\":\"misinformation\",\"source\":\"twitter\"}\n"
      "{\"text\":\"b\",\"label\":\"no-misinformation\",\"source\":\"facebook\"}\n",
      "test");
  REQUIRE(ds.size() == 2);
  CHECK(ds.documents[0].text == "a");
  CHECK(ds.documents[1].text == "b");
}

TEST_CASE("missing ids are synthesized from the record index") {
  const auto ds = dataset_from_json_text(
      R"([{"text":"a","label":"misinformation","source":"twitter"},
          {"text":"b","label":"misinformation","source":"twitter"}])",
      "test");
  CHECK(ds.documents[0].id == "000000");
  CHECK(ds.documents[1].id == "000001");
}

TEST_CASE("malformed records are rejected with the record index") {
  SUBCASE("missing text") {
    try {
      dataset_from_json_text(R"([{"label":"misinformation","source":"twitter"}])", "test");
      FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
      CHECK(std::string(e.what()).find("record 0") != std::string::npos);
    }
  }
  SUBCASE("unknown label") {
    try {
      dataset_from_json_text(R"([{"text":"a","label":"spam","source":"twitter"}])", "test");
      FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
      CHECK(std::string(e.what()).find("spam") != std::string::npos);
    }
  }
  SUBCASE("unknown source") {
    CHECK_THROWS_AS(
        dataset_from_json_text(R"([{"text":"a","label":"misinformation","source":"mars"}])",
                               "test"),
        ValidationError);
  }
  SUBCASE("whitespace-only text") {
    CHECK_THROWS_AS(
        dataset_from_json_text(R"([{"text":"  ","label":"misinformation","source":"twitter"}])",
                               "test"),
        ValidationError);
  }
  SUBCASE("duplicate ids") {
    CHECK_THROWS_AS(dataset_from_json_text(
                        R"([{"id":"x","text":"a","label":"misinformation","source":"twitter"},
                            {"id":"x","text":"b","label":"misinformation","source":"twitter"}])",
                        "test"),
                    ValidationError);
  }
  SUBCASE("broken json") {
    CHECK_THROWS_AS(dataset_from_json_text("[{", "test"), ParseError);
  }
}

TEST_CASE("loading the same bytes twice yields identical datasets") {
  const std::string body =
      R"([{"text":"corona virus","label":"misinformation","source":"twitter"},
          {"text":"ssenyiga","label":"no-misinformation","source":"facebook"}])";
  const std::string path = write_temp("det.json", body);
  const auto a = load_dataset(path);
  const auto b = load_dataset(path);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a.documents[i].id == b.documents[i].id);
    CHECK(a.documents[i].text == b.documents[i].text);
    CHECK(a.documents[i].source == b.documents[i].source);
    CHECK(*a.documents[i].label == *b.documents[i].label);
  }
  std::remove(path.c_str());
}

TEST_CASE("missing file raises an I/O error") {
  CHECK_THROWS_AS(load_dataset("no_such_file_anywhere.json"), IoError);
}

TEST_CASE("save and reload round-trips a dataset") {
  const auto ds = dataset_from_json_text(
      R"([{"id":"a","text":"corona","label":"misinformation","source":"twitter"}])", "test");
  const std::string path = "corpus_roundtrip.json";
  save_dataset(ds, path);
  const auto back = load_dataset(path);
  REQUIRE(back.size() == 1);
  CHECK(back.documents[0].id == "a");
  CHECK(back.documents[0].text == "corona");
  std::remove(path.c_str());
}

TEST_CASE("stats cross-tab counts per source and label") {
  const auto ds = dataset_from_json_text(
      R"([{"text":"a","label":"misinformation","source":"twitter"},
          {"text":"b","label":"no-misinformation","source":"twitter"},
          {"text":"c","label":"no-misinformation","source":"twitter"},
          {"text":"d","label":"misinformation","source":"facebook"}])",
      "test");
  const auto st = compute_stats(ds);
  CHECK(st.cell[0][0] == 1);  // twitter misinformation
  CHECK(st.cell[0][1] == 2);
  CHECK(st.cell[1][0] == 1);
  CHECK(st.cell[1][1] == 0);
  CHECK(st.source_total(Source::twitter) == 3);
  CHECK(st.source_total(Source::facebook) == 1);
  CHECK(st.total() == ds.size());

  SUBCASE("single-document dataset has unit marginals") {
    const auto one = dataset_from_json_text(
        R"([{"text":"a","label":"misinformation","source":"twitter"}])", "test");
    const auto s1 = compute_stats(one);
    CHECK(s1.total() == 1);
    CHECK(s1.label_total(Label::misinformation) == 1);
    CHECK(s1.label_total(Label::no_misinformation) == 0);
  }

  SUBCASE("empty dataset is rejected") {
    CHECK_THROWS_AS(compute_stats(LabeledDataset{}), ValidationError);
  }

  SUBCASE("csv rendering lists all four cells") {
    const std::string csv = render_stats_csv(st);
    CHECK(csv.find("source,label,count") == 0);
    CHECK(csv.find("twitter,misinformation,1") != std::string::npos);
    CHECK(csv.find("facebook,no-misinformation,0") != std::string::npos);
  }
}

TEST_CASE("converter normalizes foreign field names and label values") {
  const std::string path = write_temp(
      "foreign.json",
      R"([{"body":"corona mu uganda","class":"fake","platform":"tw"},
          {"body":"amazima","class":"real","platform":"fb"}])");
  FieldMapping mapping;
  mapping.text_field = "body";
  mapping.label_field = "class";
  mapping.source_field = "platform";
  mapping.label_map = {{"fake", "misinformation"}, {"real", "no-misinformation"}};
  mapping.source_map = {{"tw", "twitter"}, {"fb", "facebook"}};
  const auto ds = convert_dataset(path, mapping);
  REQUIRE(ds.size() == 2);
  CHECK(*ds.documents[0].label == Label::misinformation);
  CHECK(ds.documents[0].source == Source::twitter);
  CHECK(*ds.documents[1].label == Label::no_misinformation);
  CHECK(ds.documents[1].source == Source::facebook);
  std::remove(path.c_str());
}
