#include <gtest/gtest.h>

#include <map>

#include "fixtures.hpp"
#include "muvsim/errors.hpp"
#include "muvsim/generation.hpp"

using namespace muvsim;

TEST(Plan, DefaultSplitSizes) {
  const GenerationConfig c;
  const auto train = plan_split(c, Split::train);
  const auto val = plan_split(c, Split::validation);
  const auto test = plan_split(c, Split::test);
  EXPECT_EQ(train.size(), 10000u);
  EXPECT_EQ(val.size(), 1000u);
  EXPECT_EQ(test.size(), 600u);
  std::map<int, int> hist;
  for (const auto& p : test) ++hist[p.n_units];
  EXPECT_EQ(hist, (std::map<int, int>{{1, 100}, {5, 100}, {10, 100}, {15, 100}, {20, 100}, {25, 100}}));
  int lo = 100, hi = 0;
  for (const auto& p : train) {
    lo = std::min(lo, p.n_units);
    hi = std::max(hi, p.n_units);
  }
  EXPECT_EQ(lo, 5);
  EXPECT_EQ(hi, 30);
  EXPECT_EQ(c.test.noise_db, (std::vector<double>{10.0, 20.0, kNoiseFree}));
}

TEST(Plan, ScenesAreIndependentOfSplitSize) {
  GenerationConfig a;
  GenerationConfig b;
  b.train.count = 50;
  const auto pa = plan_split(a, Split::train);
  const auto pb = plan_split(b, Split::train);
  for (std::size_t i = 0; i < pb.size(); ++i) EXPECT_EQ(pa[i].n_units, pb[i].n_units);
  EXPECT_EQ(make_scene(a, Split::train, pa[7]), make_scene(b, Split::train, pb[7]));
}

TEST(Plan, SplitsUseDistinctStreams) {
  const GenerationConfig c;
  EXPECT_NE(scene_rng(c.seed, Split::train, 0).key(), scene_rng(c.seed, Split::test, 0).key());
  EXPECT_NE(scene_rng(1, Split::train, 0).key(), scene_rng(2, Split::train, 0).key());
}

TEST(Records, OnePerNoiseLevelSharingTheScene) {
  const GenerationConfig c = fixture::small_config();
  const auto recs = make_records(c, Split::test, {0, 3});
  ASSERT_EQ(recs.size(), 3u);
  for (const auto& r : recs) {
    EXPECT_EQ(r.scene, recs[0].scene);
    EXPECT_EQ(r.truths, recs[0].truths);
    EXPECT_EQ(r.truths.size(), 3u);
  }
  EXPECT_EQ(recs[0].snr_db, 10.0);
  EXPECT_NE(recs[0].sequence, recs[2].sequence);
  EXPECT_EQ(make_records(c, Split::test, {0, 3}), recs);
}

TEST(Config, JsonRoundTrip) {
  GenerationConfig c = fixture::small_config();
  c.seed = 77;
  c.muscle.amplitude_mode = AmplitudeMode::size_principle;
  c.test.noise_db = {5.0, kNoiseFree};
  const GenerationConfig back = config_from_json(config_to_json(c));
  EXPECT_EQ(config_to_json(back), config_to_json(c));
}

TEST(Config, PartialJsonKeepsDefaults) {
  const GenerationConfig c = config_from_json(R"({"seed": 5, "splits": {"test": {"per_category": 2}}})");
  EXPECT_EQ(c.seed, 5u);
  EXPECT_EQ(c.test.per_category, 2u);
  EXPECT_EQ(c.train.count, 10000u);
  EXPECT_EQ(c.grid, GridSpec{});
}

TEST(Config, InvalidInputsRejected) {
  EXPECT_THROW(config_from_json("{"), ParameterError);
  EXPECT_THROW(config_from_json(R"({"sed": 1})"), ParameterError);
  EXPECT_THROW(config_from_json(R"({"grid": {"frames": 0}})"), ParameterError);
  EXPECT_THROW(config_from_json(R"({"splits": {"test": {"noise_db": [-3]}}})"), ParameterError);
  EXPECT_THROW(config_from_json(R"({"splits": {"test": {"noise_db": []}}})"), ParameterError);
  EXPECT_THROW(config_from_json(R"({"splits": {"test": {"categories": [0]}}})"), ParameterError);
  EXPECT_THROW(config_from_json(R"({"muscle": {"amplitude_mode": "loud"}})"), ParameterError);
}

TEST(Generate, WritesEnabledSplits) {
  fixture::TempDir dir;
  const GenerationConfig c = fixture::small_config();
  const auto summary = generate_dataset(c, dir.path(), 2);
  ASSERT_EQ(summary.splits.size(), 3u);
  EXPECT_EQ(summary.splits.at(Split::train).sequences, 6u);
  EXPECT_EQ(summary.splits.at(Split::train).records, 6u);
  EXPECT_EQ(summary.splits.at(Split::test).sequences, 4u);
  EXPECT_EQ(summary.splits.at(Split::test).records, 12u);
  const ContainerReader test(dir / "test.muvd");
  EXPECT_EQ(test.size(), 12u);
  const DatasetManifest m = read_manifest(dir / "test.muvd");
  EXPECT_EQ(m.category_histogram, (std::map<int, std::size_t>{{1, 2}, {3, 2}}));
  EXPECT_EQ(m.record_count, 12u);
  const auto plan = plan_split(c, Split::test);
  for (std::size_t i = 0; i < test.size(); ++i) {
    const auto rec = test.read_record(i);
    EXPECT_EQ(rec.scene_index, plan[i / 3].scene_index);
    EXPECT_EQ(static_cast<int>(rec.truths.size()), plan[i / 3].n_units);
  }

  // Flip augmentation of the train split quadruples its unit tally.
  std::size_t planned = 0;
  for (const auto& p : plan_split(c, Split::train)) planned += static_cast<std::size_t>(p.n_units);
  const ContainerReader train(dir / "train.muvd");
  std::size_t augmented = 0;
  for (std::size_t a = 0; a < train.augmented_size(); ++a) augmented += train.read_augmented(a).truths.size();
  EXPECT_EQ(summary.splits.at(Split::train).units, planned);
  EXPECT_EQ(augmented, 4 * planned);
}

TEST(Generate, ThreadCountDoesNotChangeOutput) {
  fixture::TempDir a, b;
  GenerationConfig c = fixture::small_config();
  c.train.enabled = c.validation.enabled = false;
  generate_dataset(c, a.path(), 1);
  generate_dataset(c, b.path(), 3);
  EXPECT_EQ(fixture::read_bytes(a / "test.muvd"), fixture::read_bytes(b / "test.muvd"));
  EXPECT_EQ(fixture::read_bytes(a / "test.muvd.json"), fixture::read_bytes(b / "test.muvd.json"));
}

TEST(Threads, EnvironmentOverride) {
  EXPECT_EQ(resolve_threads(3), 3u);
  ::setenv("MUVSIM_THREADS", "2", 1);
  EXPECT_EQ(resolve_threads(), 2u);
  ::setenv("MUVSIM_THREADS", "zero", 1);
  EXPECT_THROW(resolve_threads(), ParameterError);
  ::unsetenv("MUVSIM_THREADS");
  EXPECT_GE(resolve_threads(), 1u);
}
