#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <fairmtl/jsonl.hpp>
#include <fairmtl/synth.hpp>

using fairmtl::AspectId;
using fairmtl::Document;
using fairmtl::load_jsonl;
using fairmtl::detail::parse_record;
using fairmtl::to_record;
using fairmtl::write_jsonl;

namespace {

std::string temp_path(const char* name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("parse_record reads a full record") {
  const Document d = parse_record(
      R"({"id":"t1","text":"He BE walkin","labels":{"offensive":1,"lewd":0},)"
      R"("dialect":1,"dialect_source":"gold"})",
      1);
  CHECK(d.id == "t1");
  CHECK(d.text == "He BE walkin");
  CHECK(d.clean_text == "he be walkin");
  CHECK(d.label(AspectId::kOffensive) == 1);
  CHECK(d.label(AspectId::kLewd) == 0);
  CHECK_FALSE(d.has_label(AspectId::kIntent));
  CHECK(d.dialect() == 1);
  CHECK(d.dialect_source == "gold");
}

TEST_CASE("parse_record rejects malformed input with the line number") {
  auto msg = [](const std::string& line) {
    try {
      parse_record(line, 7);
    } catch (const std::exception& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(msg("not json").find("line 7") != std::string::npos);
  CHECK(msg(R"({"text":"x"})").find("line 7") != std::string::npos);      // no id
  CHECK(msg(R"({"id":"a"})").find("line 7") != std::string::npos);        // no text
  CHECK(msg(R"({"id":"a","text":"x","labels":{"offensive":2}})")
            .find("line 7") != std::string::npos);                        // bad label
  CHECK(msg(R"({"id":"a","text":"x","bogus":1})").find("bogus") !=
        std::string::npos);                                               // unknown key
  CHECK(msg(R"({"id":"a","text":"x","labels":{"huh":1}})").find("huh") !=
        std::string::npos);                                               // unknown aspect
}

TEST_CASE("jsonl round trip preserves documents") {
  fairmtl::GenSpec spec = fairmtl::default_gen_spec();
  spec.n_docs = 50;
  spec.seed = 99;
  const std::vector<Document> docs = fairmtl::generate(spec);

  const std::string path = temp_path("fairmtl_roundtrip.jsonl");
  write_jsonl(docs, path);
  const std::vector<Document> back = load_jsonl(path);
  REQUIRE(back.size() == docs.size());
  for (std::size_t i = 0; i < docs.size(); ++i) CHECK(back[i] == docs[i]);
  std::remove(path.c_str());
}

TEST_CASE("to_record omits absent optional fields") {
  Document d;
  d.id = "bare";
  d.text = "hi";
  d.clean_text = "hi";
  const nlohmann::json rec = to_record(d);
  CHECK(rec.contains("id"));
  CHECK(rec.contains("text"));
  CHECK_FALSE(rec.contains("labels"));
  CHECK_FALSE(rec.contains("dialect"));
  CHECK_FALSE(rec.contains("dialect_source"));
}

TEST_CASE("load_jsonl skips blank lines and reports the failing line") {
  const std::string path = temp_path("fairmtl_blank.jsonl");
  {
    std::ofstream out(path);
    out << R"({"id":"a","text":"one"})" << "\n\n"
        << R"({"id":"b","text":"two"})" << "\n";
  }
  CHECK(load_jsonl(path).size() == 2);
  {
    std::ofstream out(path, std::ios::app);
    out << "{broken\n";
  }
  CHECK_THROWS_WITH(load_jsonl(path), Catch::Matchers::ContainsSubstring("line 4"));
  std::remove(path.c_str());
}

TEST_CASE("load_jsonl on a missing file names the path") {
  CHECK_THROWS_WITH(load_jsonl("/nonexistent/nope.jsonl"),
                    Catch::Matchers::ContainsSubstring("nope.jsonl"));
}
