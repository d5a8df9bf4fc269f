#pragma once

#include <cstdint>
#include <cstdio>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "fairmtl/aspects.hpp"
#include "fairmtl/document.hpp"
#include "fairmtl/preprocess.hpp"
#include "fairmtl/rng.hpp"

namespace fairmtl {

// Controls for the synthetic corpus. The interesting knob is `confound`:
// each label-positive document always carries that aspect's cue tokens, and
// with probability `confound` a label-NEGATIVE document carries them too,
// but only when the document is dialect-flagged. The cue is thus benign in
// dialect contexts and label-bearing otherwise, which is exactly the trap a
// lexical classifier falls into. Negative confound values flip the benign
// context to non-dialect documents. `confound_override` retunes single
// aspects while the rest keep the global value.
struct GenSpec {
  std::uint64_t n_docs = 0;
  double dialect_rate = 0.5;
  double confound = 0.0;
  std::map<AspectId, double> confound_override;
  std::map<AspectId, double> label_priors;  // intent/ingroup priors are
                                            // conditional on their parent
  std::vector<std::string> base_vocab;
  std::vector<std::string> dialect_markers;
  std::map<AspectId, std::vector<std::string>> aspect_cues;
  std::uint32_t min_len = 8;
  std::uint32_t max_len = 20;
  std::uint32_t markers_per_doc = 2;
  std::uint32_t cues_per_doc = 2;
  std::uint64_t seed = 1;
};

inline GenSpec default_gen_spec() {
  GenSpec spec;
  spec.base_vocab.reserve(150);
  for (int i = 0; i < 150; ++i) {
    char buf[8];
    std::snprintf(buf, sizeof buf, "w%03d", i);
    spec.base_vocab.emplace_back(buf);
  }
  spec.dialect_markers = {"finna", "tryna", "ion", "deadass"};
  spec.aspect_cues[AspectId::kOffensive] = {"boffa", "boffb"};
  spec.aspect_cues[AspectId::kIntent] = {"binta", "bintb"};
  spec.aspect_cues[AspectId::kLewd] = {"blewa", "blewb"};
  spec.aspect_cues[AspectId::kTargetGroup] = {"bgrpa", "bgrpb"};
  spec.aspect_cues[AspectId::kIngroup] = {"binga", "bingb"};
  for (AspectId a : kBiasAspects) spec.label_priors[a] = 0.3;
  return spec;
}

namespace detail {

inline bool token_ok(const std::string& tok) {
  if (tok.empty()) return false;
  for (char c : tok) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '\'';
    if (!ok) return false;
  }
  return true;
}

inline void validate_gen_spec(const GenSpec& spec) {
  auto fail = [](const std::string& msg) {
    throw std::invalid_argument("generate: " + msg);
  };
  if (!(spec.dialect_rate > 0.0 && spec.dialect_rate < 1.0)) {
    fail("dialect_rate must be in (0,1)");
  }
  if (spec.min_len < 1 || spec.max_len < spec.min_len) fail("bad length range");
  if (spec.markers_per_doc < 1) fail("markers_per_doc must be >= 1");
  if (spec.cues_per_doc < 1) fail("cues_per_doc must be >= 1");
  if (spec.base_vocab.empty()) fail("base vocabulary is empty");
  if (spec.dialect_markers.empty()) fail("dialect marker set is empty");
  auto check_confound = [&](double c, AspectId a) {
    if (c < -1.0 || c > 1.0) {
      fail("confound for \"" + std::string(aspect_name(a)) + "\" outside [-1,1]");
    }
  };
  std::set<std::string> seen;
  auto add_all = [&](const std::vector<std::string>& toks, const char* which) {
    for (const std::string& t : toks) {
      if (!token_ok(t)) fail(std::string(which) + " token \"" + t + "\" is not a clean lowercase token");
      if (!seen.insert(t).second) fail("token \"" + t + "\" appears in more than one set");
    }
  };
  add_all(spec.base_vocab, "base");
  add_all(spec.dialect_markers, "marker");
  for (AspectId a : kBiasAspects) {
    auto prior = spec.label_priors.find(a);
    if (prior == spec.label_priors.end()) {
      fail("missing label prior for \"" + std::string(aspect_name(a)) + "\"");
    }
    if (prior->second < 0.0 || prior->second > 1.0) {
      fail("label prior for \"" + std::string(aspect_name(a)) + "\" outside [0,1]");
    }
    auto cues = spec.aspect_cues.find(a);
    if (cues == spec.aspect_cues.end() || cues->second.empty()) {
      fail("missing cue tokens for \"" + std::string(aspect_name(a)) + "\"");
    }
    add_all(cues->second, "cue");
    auto ov = spec.confound_override.find(a);
    check_confound(ov != spec.confound_override.end() ? ov->second : spec.confound, a);
  }
}

}  // namespace detail

// Deterministic synthetic corpus. Documents are bags of min_len..max_len
// tokens; dialect markers appear only in dialect-flagged documents. Intent
// implies offensive and ingroup implies a target group, so gold labels never
// violate the impossible-combination rules. Each document draws from its own
// derived RNG stream, so generation order is immaterial.
inline std::vector<Document> generate(const GenSpec& spec) {
  detail::validate_gen_spec(spec);

  auto pick = [](SplitMix64& rng, const std::vector<std::string>& pool) {
    return pool[rng.next_below(pool.size())];
  };
  auto confound_of = [&](AspectId a) {
    auto it = spec.confound_override.find(a);
    return it != spec.confound_override.end() ? it->second : spec.confound;
  };

  std::vector<Document> docs;
  docs.reserve(spec.n_docs);
  for (std::uint64_t i = 0; i < spec.n_docs; ++i) {
    SplitMix64 rng = SplitMix64(spec.seed).derive(0xD0C000000ull + i);
    Document doc;
    char idbuf[24];
    std::snprintf(idbuf, sizeof idbuf, "synth-%06llu", static_cast<unsigned long long>(i));
    doc.id = idbuf;

    const bool dialect = rng.next_bernoulli(spec.dialect_rate);
    doc.labels[AspectId::kDialect] = dialect ? 1 : 0;

    const bool off = rng.next_bernoulli(spec.label_priors.at(AspectId::kOffensive));
    const bool intent = off && rng.next_bernoulli(spec.label_priors.at(AspectId::kIntent));
    const bool lewd = rng.next_bernoulli(spec.label_priors.at(AspectId::kLewd));
    const bool group = rng.next_bernoulli(spec.label_priors.at(AspectId::kTargetGroup));
    const bool ingroup = group && rng.next_bernoulli(spec.label_priors.at(AspectId::kIngroup));
    doc.labels[AspectId::kOffensive] = off ? 1 : 0;
    doc.labels[AspectId::kIntent] = intent ? 1 : 0;
    doc.labels[AspectId::kLewd] = lewd ? 1 : 0;
    doc.labels[AspectId::kTargetGroup] = group ? 1 : 0;
    doc.labels[AspectId::kIngroup] = ingroup ? 1 : 0;

    std::vector<std::string> tokens;
    if (dialect) {
      for (std::uint32_t k = 0; k < spec.markers_per_doc; ++k) {
        tokens.push_back(pick(rng, spec.dialect_markers));
      }
    }
    for (AspectId a : kBiasAspects) {
      const bool positive = doc.labels.at(a) == 1;
      const double c = confound_of(a);
      bool inject = positive;
      if (!positive && c > 0.0 && dialect) inject = rng.next_bernoulli(c);
      if (!positive && c < 0.0 && !dialect) inject = rng.next_bernoulli(-c);
      if (inject) {
        for (std::uint32_t k = 0; k < spec.cues_per_doc; ++k) {
          tokens.push_back(pick(rng, spec.aspect_cues.at(a)));
        }
      }
    }
    // if the injected tokens already exceed the drawn length, keep them all;
    // the total still fits max_len since at most 2 + 2*5 tokens are injected
    const std::uint32_t want =
        static_cast<std::uint32_t>(rng.next_int(spec.min_len, spec.max_len));
    while (tokens.size() < want) tokens.push_back(pick(rng, spec.base_vocab));
    rng.shuffle(tokens);

    std::string text;
    for (std::size_t t = 0; t < tokens.size(); ++t) {
      if (t) text += ' ';
      text += tokens[t];
    }
    doc.text = text;
    doc.clean_text = preprocess(text);
    docs.push_back(std::move(doc));
  }
  return docs;
}

}  // namespace fairmtl
