#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <fairmtl/config.hpp>

using fairmtl::Config;
using fairmtl::ConfigError;

namespace {

std::string write_config(const char* name, const std::string& body) {
  const std::string path = (std::filesystem::temp_directory_path() / name).string();
  std::ofstream out(path);
  out << body;
  return path;
}

}  // namespace

TEST_CASE("config parses key = value lines with comments and blanks") {
  const std::string path = write_config("fairmtl_ok.cfg",
                                        "# corpus settings\n"
                                        "n_docs = 8000\n"
                                        "\n"
                                        "dialect_rate = 0.3   # trailing comment\n"
                                        "mode = multitask+aae\n"
                                        "weighted_loss = true\n");
  const Config cfg = Config::from_file(path);
  CHECK(cfg.get_u64("n_docs", 0) == 8000);
  CHECK(cfg.get_double("dialect_rate", 0.0) == 0.3);
  CHECK(cfg.get_string("mode", "") == "multitask+aae");
  CHECK(cfg.get_bool("weighted_loss", false));
  CHECK(cfg.has("n_docs"));
  CHECK_FALSE(cfg.has("missing"));
  CHECK(cfg.get_u64("absent", 7) == 7);
  std::remove(path.c_str());
}

TEST_CASE("config errors carry the file and line number") {
  auto check_error = [](const std::string& body, const std::string& needle) {
    const std::string path = write_config("fairmtl_bad.cfg", body);
    try {
      Config::from_file(path);
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find(needle) != std::string::npos);
    }
    std::remove(path.c_str());
  };
  check_error("a = 1\nnonsense line\n", ":2:");
  check_error("= 3\n", "empty key");
  check_error("x = 1\nx = 2\n", "duplicate");
}

TEST_CASE("missing config file raises a config error") {
  CHECK_THROWS_AS(Config::from_file("/no/such/file.cfg"), ConfigError);
}

TEST_CASE("typed getters validate their values") {
  Config cfg;
  cfg.apply_override("count=12");
  cfg.apply_override("rate=0.25");
  cfg.apply_override("flag=no");
  cfg.apply_override("word=hello");
  CHECK(cfg.get_u64("count", 0) == 12);
  CHECK(cfg.get_double("rate", 0.0) == 0.25);
  CHECK_FALSE(cfg.get_bool("flag", true));
  CHECK(cfg.require_string("word") == "hello");
  CHECK_THROWS_AS(cfg.get_u64("word", 0), ConfigError);
  CHECK_THROWS_AS(cfg.get_double("word", 0.0), ConfigError);
  CHECK_THROWS_AS(cfg.get_bool("word", false), ConfigError);
  CHECK_THROWS_AS(cfg.require_string("nope"), ConfigError);
}

TEST_CASE("overrides replace file values and validate their shape") {
  const std::string path = write_config("fairmtl_ovr.cfg", "seed = 1\n");
  Config cfg = Config::from_file(path);
  cfg.apply_override("seed=99");
  CHECK(cfg.get_u64("seed", 0) == 99);
  CHECK_THROWS_AS(cfg.apply_override("no_equals_sign"), ConfigError);
  CHECK_THROWS_AS(cfg.apply_override("=value"), ConfigError);
  std::remove(path.c_str());
}

TEST_CASE("config hash is stable and content-sensitive") {
  Config a, b, c;
  a.apply_override("x=1");
  a.apply_override("y=2");
  b.apply_override("y=2");
  b.apply_override("x=1");
  c.apply_override("x=1");
  c.apply_override("y=3");
  CHECK(a.hash() == b.hash());  // insertion order is irrelevant
  CHECK(a.hash() != c.hash());
  CHECK(a.hash().size() == 16);  // 64-bit hex digest
}
