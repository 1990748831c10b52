#include "forge/style_adapter.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "forge/architect.hpp"
#include "forge/bundled.hpp"
#include "forge/util.hpp"
#include "support/oracles.hpp"
#include "support/stub_backend.hpp"

namespace forge {
namespace {

using forge_test::DroppingRewriter;
using forge_test::EchoRewriter;
using forge_test::WarnCapture;

struct Fixture {
  Task task;
  ContradictionBlueprint blueprint;
  AdversarialPassage p0;
  Corpus corpus = bundled_corpus();
  Retriever retriever;
  SimulatorModel model{SimulatorParams{}, bundled_tasks()};

  Fixture() {
    task = *bundled_tasks().find("t01");
    blueprint = build_blueprint(decompose(task), 3);
    p0 = weave(blueprint, task);
  }
};

TEST(OperatorClassTest, StringRoundTrip) {
  for (OperatorClass cls : {OperatorClass::SU, OperatorClass::RV,
                            OperatorClass::NI, OperatorClass::AU,
                            OperatorClass::NR}) {
    EXPECT_EQ(operator_class_from_string(to_string(cls)), cls);
  }
  EXPECT_THROW(operator_class_from_string("XX"), ValidationError);
}

TEST(OperatorLibraryTest, DefaultCoversAllClassesAndValidates) {
  OperatorLibrary lib = default_operator_library();
  EXPECT_EQ(lib.operators.size(), 5u);
  EXPECT_NO_THROW(lib.validate(0.1));
  std::set<OperatorClass> classes;
  for (const StyleOperator& op : lib.operators) {
    classes.insert(op.cls);
    EXPECT_EQ(op.utility, 1.0);
    EXPECT_NE(lib.find(op.id), nullptr);
  }
  EXPECT_EQ(classes.size(), 5u);
  EXPECT_EQ(lib.find("missing"), nullptr);
}

TEST(OperatorLibraryTest, ValidateRejectsDefects) {
  OperatorLibrary dup = default_operator_library();
  dup.operators.push_back(dup.operators[0]);
  EXPECT_THROW(dup.validate(0.1), ValidationError);

  OperatorLibrary missing = default_operator_library();
  missing.operators.pop_back();
  EXPECT_THROW(missing.validate(0.1), ValidationError);

  OperatorLibrary low = default_operator_library();
  low.operators[0].utility = 0.05;
  EXPECT_THROW(low.validate(0.1), ValidationError);
}

TEST(AdapterConfigTest, ValidateRejectsOutOfRange) {
  AdapterConfig good;
  EXPECT_NO_THROW(good.validate());

  AdapterConfig bad = good;
  bad.tau = 1.5;
  EXPECT_THROW(bad.validate(), ValidationError);
  bad = good;
  bad.lambda = 1.0;
  EXPECT_THROW(bad.validate(), ValidationError);
  bad = good;
  bad.epsilon = -0.1;
  EXPECT_THROW(bad.validate(), ValidationError);
  bad = good;
  bad.max_generations = 0;
  EXPECT_THROW(bad.validate(), ValidationError);
  bad = good;
  bad.stabilization_tol = 0.0;
  EXPECT_THROW(bad.validate(), ValidationError);
}

TEST(GreedyPickTest, PureGreedyTakesHighestUtilityTiesById) {
  OperatorLibrary lib = default_operator_library();
  AdapterConfig config;
  config.epsilon = 0.0;
  config.subsets_per_generation = 3;
  config.subset_size_max = 3;

  std::vector<std::string> sorted_ids;
  for (const StyleOperator& op : lib.operators) {
    sorted_ids.push_back(op.id);
  }
  std::sort(sorted_ids.begin(), sorted_ids.end());

  Rng rng(5);
  auto subsets = greedy_pick(lib, config, rng);
  ASSERT_EQ(subsets.size(), 3u);
  for (const auto& subset : subsets) {
    ASSERT_GE(subset.size(), 1u);
    ASSERT_LE(subset.size(), 3u);
    // Equal utilities: every slot falls back to the id order.
    for (std::size_t i = 0; i < subset.size(); ++i) {
      EXPECT_EQ(subset[i], sorted_ids[i]);
    }
  }
}

TEST(GreedyPickTest, DominantUtilityAlwaysLeads) {
  OperatorLibrary lib = default_operator_library();
  for (StyleOperator& op : lib.operators) {
    if (op.id == "nr-regulation") {
      op.utility = 9.0;
    }
  }
  AdapterConfig config;
  config.epsilon = 0.0;
  config.subsets_per_generation = 6;
  Rng rng(17);
  for (const auto& subset : greedy_pick(lib, config, rng)) {
    EXPECT_EQ(subset.front(), "nr-regulation");
  }
}

TEST(GreedyPickTest, SubsetsHaveNoDuplicates) {
  OperatorLibrary lib = default_operator_library();
  AdapterConfig config;
  config.epsilon = 1.0;
  config.subsets_per_generation = 20;
  Rng rng(23);
  for (const auto& subset : greedy_pick(lib, config, rng)) {
    std::set<std::string> unique(subset.begin(), subset.end());
    EXPECT_EQ(unique.size(), subset.size());
  }
}

TEST(GreedyPickTest, SameSeedSameDraws) {
  OperatorLibrary lib = default_operator_library();
  AdapterConfig config;
  config.epsilon = 1.0;
  config.subsets_per_generation = 10;
  Rng a(99);
  Rng b(99);
  EXPECT_EQ(greedy_pick(lib, config, a), greedy_pick(lib, config, b));
}

const StyleOperator& op_for(const OperatorLibrary& lib, OperatorClass cls) {
  for (const StyleOperator& op : lib.operators) {
    if (op.cls == cls) {
      return op;
    }
  }
  throw std::runtime_error("class missing from library");
}

TEST(RewriteTest, SymbolicOperatorInsertsAndPreservesLockedBytes) {
  Fixture fx;
  OperatorLibrary lib = default_operator_library();
  AdversarialPassage out =
      rewrite(fx.p0, {op_for(lib, OperatorClass::SU)});
  EXPECT_NE(out.text.find("Let x denote"), std::string::npos);
  EXPECT_EQ(out.annotations.style_classes,
            (std::vector<std::string>{"SU"}));
  ASSERT_EQ(out.locked_spans.size(), fx.p0.locked_spans.size());
  for (std::size_t i = 0; i < out.locked_spans.size(); ++i) {
    const LockedSpan& before = fx.p0.locked_spans[i];
    const LockedSpan& after = out.locked_spans[i];
    EXPECT_EQ(
        fx.p0.text.substr(before.start, before.end - before.start),
        out.text.substr(after.start, after.end - after.start));
  }
  EXPECT_TRUE(check_anchor_integrity(out, fx.blueprint));
}

TEST(RewriteTest, EmptySubsetIsIdentity) {
  Fixture fx;
  EXPECT_EQ(rewrite(fx.p0, {}), fx.p0);
}

TEST(RewriteTest, OperatorsAreIdempotent) {
  Fixture fx;
  OperatorLibrary lib = default_operator_library();
  const std::vector<StyleOperator> subset = {
      op_for(lib, OperatorClass::AU)};
  AdversarialPassage once = rewrite(fx.p0, subset);
  AdversarialPassage twice = rewrite(once, subset);
  EXPECT_EQ(once, twice);
}

TEST(RewriteTest, AllFiveClassesKeepIntegrity) {
  Fixture fx;
  OperatorLibrary lib = default_operator_library();
  AdversarialPassage out = rewrite(fx.p0, lib.operators);
  EXPECT_TRUE(check_anchor_integrity(out, fx.blueprint));
  EXPECT_EQ(out.annotations.style_classes,
            (std::vector<std::string>{"AU", "NI", "NR", "RV", "SU"}));
  EXPECT_GT(out.text.size(), fx.p0.text.size());
}

TEST(RewriteTest, GenerativeModeNeedsTheOtherEntryPoint) {
  Fixture fx;
  OperatorLibrary lib = default_operator_library();
  EXPECT_THROW(rewrite(fx.p0, {op_for(lib, OperatorClass::SU)},
                       RewriteMode::generative),
               ValidationError);
}

TEST(RewriteGenerativeTest, RelocatesSpansInsideRewrittenText) {
  Fixture fx;
  OperatorLibrary lib = default_operator_library();
  EchoRewriter rewriter;
  AdversarialPassage out = rewrite_generative(
      fx.p0, {op_for(lib, OperatorClass::RV)}, rewriter);
  EXPECT_EQ(rewriter.calls, 1);
  EXPECT_NE(out.text, fx.p0.text);
  EXPECT_TRUE(check_anchor_integrity(out, fx.blueprint));
  EXPECT_EQ(out.annotations.style_classes,
            (std::vector<std::string>{"RV"}));
}

TEST(RewriteGenerativeTest, DroppedSpanComesBackDegenerate) {
  Fixture fx;
  OperatorLibrary lib = default_operator_library();
  DroppingRewriter rewriter(logic_rendering(3));
  AdversarialPassage out = rewrite_generative(
      fx.p0, {op_for(lib, OperatorClass::RV)}, rewriter);
  EXPECT_FALSE(check_anchor_integrity(out, fx.blueprint));
}

TEST(FitnessTest, GridCases) {
  EXPECT_EQ(fitness(1000, 1, 0.5), 1000.0);
  EXPECT_EQ(fitness(1000, 0, 0.5), 500.0);
  EXPECT_EQ(fitness(1000, 0, 0.0), 1000.0);
  EXPECT_EQ(fitness(0, 1, 0.5), 0.0);
  EXPECT_THROW(fitness(-1, 1, 0.0), ValidationError);
}

TEST(UpdateWeightsTest, SharesDeltaAcrossWinners) {
  OperatorLibrary lib = default_operator_library();
  AdapterConfig config;  // eta 0.001, floor 0.1
  std::vector<std::string> winners = {"su-symbolic", "rv-clerk",
                                      "ni-formal"};
  OperatorLibrary updated = update_weights(lib, winners, 3000.0, config);
  for (const std::string& id : winners) {
    EXPECT_DOUBLE_EQ(updated.find(id)->utility, 2.0) << id;
  }
  EXPECT_DOUBLE_EQ(updated.find("au-recheck")->utility, 1.0);
}

TEST(UpdateWeightsTest, FloorClampsNegativeDeltas) {
  OperatorLibrary lib = default_operator_library();
  AdapterConfig config;
  OperatorLibrary updated =
      update_weights(lib, {"su-symbolic"}, -5000000.0, config);
  EXPECT_DOUBLE_EQ(updated.find("su-symbolic")->utility, 0.1);
}

TEST(UpdateWeightsTest, EmptySubsetIsNoOp) {
  OperatorLibrary lib = default_operator_library();
  OperatorLibrary updated = update_weights(lib, {}, 1000.0, AdapterConfig{});
  EXPECT_EQ(updated.operators, lib.operators);
}

TEST(StabilizedTest, CraftedHistories) {
  EXPECT_TRUE(stabilized({1000, 1005, 1007, 1008}, 3, 0.01));
  EXPECT_FALSE(stabilized({1000, 2000, 2010, 2015}, 3, 0.01));
  EXPECT_FALSE(stabilized({1000, 1005, 1007}, 3, 0.01));
  EXPECT_TRUE(stabilized({0.0, 0.0, 0.0, 0.0}, 3, 0.01));
  EXPECT_THROW(stabilized({}, 3, 0.01), ValidationError);
}

TEST(AdaptTest, ChampionImprovesAndHistoryIsMonotone) {
  Fixture fx;
  WarnCapture quiet;
  AdaptResult result =
      adapt(fx.p0, fx.blueprint, default_operator_library(), fx.model,
            fx.retriever, fx.task, fx.corpus, AdapterConfig{}, 42);

  ASSERT_FALSE(result.fitness_history.empty());
  EXPECT_EQ(result.fitness_history.front(), result.audit.front().fitness);
  for (std::size_t i = 1; i < result.fitness_history.size(); ++i) {
    EXPECT_GE(result.fitness_history[i], result.fitness_history[i - 1]);
  }
  EXPECT_EQ(result.champion_fitness, result.fitness_history.back());
  EXPECT_GT(result.champion_fitness, result.fitness_history.front());
  EXPECT_LE(result.generations_run, AdapterConfig{}.max_generations);
  EXPECT_TRUE(check_anchor_integrity(result.champion, fx.blueprint));
  EXPECT_FALSE(result.champion.annotations.style_classes.empty());

  ASSERT_FALSE(result.audit.empty());
  EXPECT_EQ(result.audit.front().generation, 0);
  EXPECT_TRUE(result.audit.front().champion);
  EXPECT_TRUE(result.audit.front().operator_ids.empty());
}

TEST(AdaptTest, ImpossibleGateKeepsInitialChampion) {
  Fixture fx;
  WarnCapture quiet;
  AdapterConfig config;
  config.tau = 1.0;  // no candidate can match the query that closely
  AdaptResult result =
      adapt(fx.p0, fx.blueprint, default_operator_library(), fx.model,
            fx.retriever, fx.task, fx.corpus, config, 42);
  EXPECT_EQ(result.champion, fx.p0);
  for (double f : result.fitness_history) {
    EXPECT_EQ(f, result.fitness_history.front());
  }
  EXPECT_TRUE(result.stabilized_early);
}

TEST(AdaptTest, SameSeedReproducesTheRun) {
  Fixture fx;
  WarnCapture quiet;
  AdaptResult a =
      adapt(fx.p0, fx.blueprint, default_operator_library(), fx.model,
            fx.retriever, fx.task, fx.corpus, AdapterConfig{}, 7);
  AdaptResult b =
      adapt(fx.p0, fx.blueprint, default_operator_library(), fx.model,
            fx.retriever, fx.task, fx.corpus, AdapterConfig{}, 7);
  EXPECT_EQ(a.champion, b.champion);
  EXPECT_EQ(a.fitness_history, b.fitness_history);
  ASSERT_EQ(a.audit.size(), b.audit.size());
  for (std::size_t i = 0; i < a.audit.size(); ++i) {
    EXPECT_EQ(audit_entry_to_json(a.audit[i]),
              audit_entry_to_json(b.audit[i]));
  }
}

TEST(AdaptTest, UnretrievableInitialPassageRejected) {
  Fixture fx;
  // Five decoys that mirror the question crowd the poison out of top-5.
  std::vector<Document> docs = fx.corpus.documents();
  for (int i = 0; i < 5; ++i) {
    Document decoy;
    decoy.id = "decoy-" + std::to_string(i);
    decoy.text = fx.task.question;
    docs.push_back(decoy);
  }
  Corpus crowded(docs);
  EXPECT_THROW(
      adapt(fx.p0, fx.blueprint, default_operator_library(), fx.model,
            fx.retriever, fx.task, crowded, AdapterConfig{}, 1),
      ValidationError);
}

TEST(AdaptTest, GenerativeRewriterPath) {
  Fixture fx;
  WarnCapture quiet;
  EchoRewriter rewriter;
  AdaptResult result =
      adapt(fx.p0, fx.blueprint, default_operator_library(), fx.model,
            fx.retriever, fx.task, fx.corpus, AdapterConfig{}, 42,
            &rewriter);
  EXPECT_GT(rewriter.calls, 0);
  EXPECT_TRUE(check_anchor_integrity(result.champion, fx.blueprint));
  EXPECT_GE(result.champion_fitness, result.fitness_history.front());
}

TEST(AuditEntryJson, RoundTrip) {
  AuditEntry entry;
  entry.generation = 3;
  entry.operator_ids = {"su-symbolic", "au-recheck"};
  entry.similarity = 0.4375;
  entry.rt = 6100;
  entry.acc = 1;
  entry.fitness = 6100.0;
  entry.champion = true;
  AuditEntry decoded = audit_entry_from_json(audit_entry_to_json(entry));
  EXPECT_EQ(decoded.generation, entry.generation);
  EXPECT_EQ(decoded.operator_ids, entry.operator_ids);
  EXPECT_EQ(decoded.similarity, entry.similarity);
  EXPECT_EQ(decoded.rt, entry.rt);
  EXPECT_EQ(decoded.acc, entry.acc);
  EXPECT_EQ(decoded.fitness, entry.fitness);
  EXPECT_EQ(decoded.champion, entry.champion);
}

}  // namespace
}  // namespace forge
