#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <fairmtl/model.hpp>

using fairmtl::AspectId;
using fairmtl::FeatureVector;
using fairmtl::MultitaskModel;
using fairmtl::NgramConfig;
using fairmtl::TaskHead;

namespace {

// Tiny hand-computed network: D=4 inputs, H=2 hidden units, one head.
MultitaskModel tiny_model() {
  MultitaskModel m;
  m.ngrams.dim = 4;
  m.dim = 4;
  m.hidden = 2;
  m.w1 = {0.5, -0.25, 0.0, 1.0,
          -0.75, 0.5, 0.25, -0.5};
  m.b1 = {0.1, -0.2};
  TaskHead head;
  head.w = {0.3, -0.4,
            -0.2, 0.6};
  head.b = {0.05, -0.05};
  m.heads[AspectId::kOffensive] = head;
  m.model_id = "tiny";
  return m;
}

FeatureVector tiny_input() {
  FeatureVector fv;
  fv.dim = 4;
  fv.entries = {{0, 0.6}, {2, 0.8}};
  return fv;
}

}  // namespace

TEST_CASE("softmax2 normalizes and orders correctly") {
  const auto p = fairmtl::softmax2(2.0, 2.0);
  CHECK(p[0] == Catch::Approx(0.5).epsilon(1e-15));
  CHECK(p[0] + p[1] == Catch::Approx(1.0).epsilon(1e-15));
  const auto q = fairmtl::softmax2(1000.0, -1000.0);  // max-shift keeps this finite
  CHECK(q[0] == Catch::Approx(1.0).epsilon(1e-12));
  CHECK(q[1] >= 0.0);
}

TEST_CASE("encode and forward match the hand-computed fixture") {
  const MultitaskModel m = tiny_model();
  const std::vector<double> h = fairmtl::encode(m, tiny_input());
  REQUIRE(h.size() == 2);
  CHECK(h[0] == Catch::Approx(0.3799489622552249).epsilon(1e-15));
  CHECK(h[1] == Catch::Approx(-0.4218990052500079).epsilon(1e-15));

  const auto pred = fairmtl::forward(m, tiny_input(), AspectId::kOffensive);
  CHECK(pred.probs[0] == Catch::Approx(0.67081499957552015).epsilon(1e-14));
  CHECK(pred.probs[1] == Catch::Approx(0.32918500042447985).epsilon(1e-14));
  CHECK(pred.label == 0);
}

TEST_CASE("prediction label is argmax with ties to the negative class") {
  TaskHead even;  // identical logits for any hidden state
  even.w = {0.5, 0.5, 0.5, 0.5};
  even.b = {0.25, 0.25};
  const auto pred = fairmtl::head_predict(even, {0.3, -0.7});
  CHECK(pred.probs[0] == Catch::Approx(0.5).epsilon(1e-15));
  CHECK(pred.label == 0);
}

TEST_CASE("forward on a missing head names the task") {
  CHECK_THROWS_WITH(fairmtl::forward(tiny_model(), tiny_input(), AspectId::kLewd),
                    Catch::Matchers::ContainsSubstring("lewd"));
}

TEST_CASE("encode rejects mismatched dimensions") {
  FeatureVector fv;
  fv.dim = 8;
  fv.entries = {{1, 1.0}};
  CHECK_THROWS_AS(fairmtl::encode(tiny_model(), fv), std::invalid_argument);
}

TEST_CASE("init_model is deterministic and head-complete") {
  NgramConfig ng;
  ng.dim = 64;
  const std::vector<AspectId> tasks = {AspectId::kOffensive, AspectId::kDialect};
  const MultitaskModel a = fairmtl::init_model(ng, 8, tasks, 42);
  const MultitaskModel b = fairmtl::init_model(ng, 8, tasks, 42);
  const MultitaskModel c = fairmtl::init_model(ng, 8, tasks, 43);
  CHECK(a.w1 == b.w1);
  CHECK(a.heads.at(AspectId::kOffensive).w == b.heads.at(AspectId::kOffensive).w);
  CHECK(a.w1 != c.w1);
  CHECK(a.heads.size() == 2);
  CHECK(a.w1.size() == 8u * 64u);
  CHECK(a.b1 == std::vector<double>(8, 0.0));
}

TEST_CASE("init_model rejects duplicate or empty task lists") {
  NgramConfig ng;
  ng.dim = 16;
  CHECK_THROWS_AS(fairmtl::init_model(ng, 4, {}, 1), std::invalid_argument);
  CHECK_THROWS_AS(
      fairmtl::init_model(ng, 4, {AspectId::kLewd, AspectId::kLewd}, 1),
      std::invalid_argument);
}

TEST_CASE("save and load round trip is bit exact") {
  NgramConfig ng;
  ng.dim = 32;
  MultitaskModel m =
      fairmtl::init_model(ng, 4, {AspectId::kOffensive, AspectId::kIntent}, 9);
  m.model_id = "roundtrip";
  m.metadata["mode"] = "multitask";
  m.metadata["seed"] = "9";

  const std::string path =
      (std::filesystem::temp_directory_path() / "fairmtl_model.bin").string();
  fairmtl::save_model(m, path);
  const MultitaskModel back = fairmtl::load_model(path);
  CHECK(back.w1 == m.w1);
  CHECK(back.b1 == m.b1);
  CHECK(back.heads.at(AspectId::kIntent).w == m.heads.at(AspectId::kIntent).w);
  CHECK(back.heads.at(AspectId::kIntent).b == m.heads.at(AspectId::kIntent).b);
  CHECK(back.model_id == "roundtrip");
  CHECK(back.metadata == m.metadata);
  CHECK(back.ngrams == m.ngrams);
  std::remove(path.c_str());
}

TEST_CASE("load_model rejects non-model files") {
  const std::string path =
      (std::filesystem::temp_directory_path() / "fairmtl_notamodel.bin").string();
  {
    std::ofstream out(path, std::ios::binary);
    out << "this is not a model";
  }
  CHECK_THROWS_WITH(fairmtl::load_model(path),
                    Catch::Matchers::ContainsSubstring("bad magic"));
  std::remove(path.c_str());
}

TEST_CASE("load_model detects truncation") {
  NgramConfig ng;
  ng.dim = 16;
  const MultitaskModel m = fairmtl::init_model(ng, 2, {AspectId::kLewd}, 3);
  const std::string path =
      (std::filesystem::temp_directory_path() / "fairmtl_trunc.bin").string();
  fairmtl::save_model(m, path);
  const auto full = std::filesystem::file_size(path);
  std::filesystem::resize_file(path, full - 7);
  CHECK_THROWS_WITH(fairmtl::load_model(path),
                    Catch::Matchers::ContainsSubstring("truncated"));
  std::remove(path.c_str());
}
