#include <gtest/gtest.h>

#include "helpers.hpp"
#include "litmap/config.hpp"
#include "litmap/text_util.hpp"

using namespace litmap;
using testing_helpers::scratch_dir;

namespace {

// Directory with an empty corpus file and a fixtures dir, so path checks pass.
std::filesystem::path config_fixture(const std::string& name) {
  auto dir = scratch_dir(name);
  text::write_file(dir / "seed.jsonl", "");
  std::filesystem::create_directories(dir / "fixtures");
  return dir;
}

Settings settings_of(const std::string& text, const std::filesystem::path& base) {
  return parse_config_text(text, "test.conf", base);
}

}  // namespace

TEST(ParseGrid, RangesStepsAndLists) {
  EXPECT_EQ(parse_grid("1:4"), (std::vector<std::size_t>{1, 2, 3, 4}));
  EXPECT_EQ(parse_grid("100:1000:300"), (std::vector<std::size_t>{100, 400, 700, 1000}));
  EXPECT_EQ(parse_grid("5:12:5"), (std::vector<std::size_t>{5, 10}));
  EXPECT_EQ(parse_grid("7"), (std::vector<std::size_t>{7}));
  EXPECT_EQ(parse_grid("3, 1,9"), (std::vector<std::size_t>{3, 1, 9}));
  EXPECT_EQ(parse_grid("4:4"), (std::vector<std::size_t>{4}));
  for (const char* bad : {"", "5:1", "1:5:0", "a:3", "1:2:3:4", "1,-2", "1.5", ":"}) {
    EXPECT_THROW(parse_grid(bad), ConfigError) << bad;
  }
}

TEST(ParseConfigText, CommentsBlanksAndTrimming) {
  auto s = settings_of("# header\n\n  depth =  1  \nk_w=50\r\n   # indented comment\nseed = 9", "/base");
  ASSERT_EQ(s.size(), 3u);
  EXPECT_EQ(s.at("depth").value, "1");
  EXPECT_EQ(s.at("k_w").value, "50");
  EXPECT_EQ(s.at("seed").value, "9");
  EXPECT_EQ(s.at("depth").origin, "test.conf:3");
  EXPECT_EQ(s.at("depth").base, std::filesystem::path("/base"));
}

TEST(ParseConfigText, Errors) {
  EXPECT_THROW(settings_of("depth 2\n", "."), ConfigError);
  EXPECT_THROW(settings_of("= 2\n", "."), ConfigError);
  try {
    settings_of("depth = 1\nseed = 2\ndepth = 2\n", ".");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("test.conf:3"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("duplicate"), std::string::npos);
  }
}

TEST(MakeConfig, DefaultsAndRelativePaths) {
  auto dir = config_fixture("cfg_defaults");
  auto c = make_config(settings_of("corpus = seed.jsonl\nfixtures_dir = fixtures\n", dir));
  EXPECT_EQ(c.corpus, dir / "seed.jsonl");
  EXPECT_EQ(c.fixtures_dir, dir / "fixtures");
  EXPECT_EQ(c.depth, 2);
  EXPECT_TRUE(c.enrich);
  EXPECT_EQ(c.min_degree, 2u);
  EXPECT_EQ(c.k_w, 10000u);
  EXPECT_EQ(c.theta_w, 10u);
  EXPECT_EQ(c.k_max, 500u);
  EXPECT_EQ(c.bootstrap, 100u);
  EXPECT_EQ(c.interdisc_bootstrap, 100u);
  EXPECT_EQ(c.semantic_mode, SemanticMode::Sweep);
  EXPECT_EQ(c.theta_grid.size(), 20u);
  EXPECT_EQ(c.kmax_grid.front(), 100u);
  EXPECT_EQ(c.kmax_grid.back(), 1000u);
  EXPECT_EQ(c.belonging, Belonging::Product);
}

TEST(MakeConfig, EveryKeyIsAccepted) {
  auto dir = config_fixture("cfg_all_keys");
  std::filesystem::create_directories(dir / "stop");
  const std::string text =
      "corpus = seed.jsonl\ncorpus_format = jsonl\ndepth = 1\nenrich = no\nprovider = fixture\n"
      "fixtures_dir = fixtures\nhttp_base_url = http://localhost:1\nrate_limit = 0.5\nparallelism = 4\n"
      "min_degree = 3\niterate_core = yes\nresolution = 1.5\nbootstrap = 0\nswaps_per_edge = 4\n"
      "max_ngram = 2\nmin_df = 3\nk_w = 77\nsubsumption = false\nstopwords_dir = stop\n"
      "semantic_mode = fixed\ntheta_grid = 1,2\nkmax_grid = 5:10:5\ntheta_w = 3\nk_max = 40\n"
      "filter_order = edges-first\npareto_objectives = modularity, balance\ninterdisc_bootstrap = 0\n"
      "belonging = min\nseed = 123\nout_dir = results\n";
  auto s = settings_of(text, dir);
  EXPECT_EQ(s.size(), config_keys().size());
  auto c = make_config(s);
  EXPECT_EQ(c.depth, 1);
  EXPECT_FALSE(c.enrich);
  EXPECT_EQ(c.rate_limit, 0.5);
  EXPECT_EQ(c.parallelism, 4u);
  EXPECT_EQ(c.min_degree, 3u);
  EXPECT_TRUE(c.iterate_core);
  EXPECT_EQ(c.resolution, 1.5);
  EXPECT_EQ(c.bootstrap, 0u);
  EXPECT_EQ(c.max_ngram, 2);
  EXPECT_FALSE(c.subsumption);
  EXPECT_EQ(c.stopwords_dir, dir / "stop");
  EXPECT_EQ(c.semantic_mode, SemanticMode::Fixed);
  EXPECT_EQ(c.kmax_grid, (std::vector<std::size_t>{5, 10}));
  EXPECT_EQ(c.theta_w, 3u);
  EXPECT_EQ(c.k_max, 40u);
  EXPECT_EQ(c.filter_order, FilterOrder::EdgesFirst);
  EXPECT_EQ(c.pareto_objectives, (std::vector<std::string>{"modularity", "balance"}));
  EXPECT_EQ(c.belonging, Belonging::Min);
  EXPECT_EQ(c.seed, 123u);
  EXPECT_EQ(c.out_dir, dir / "results");
}

TEST(MakeConfig, RejectsBadValues) {
  auto dir = config_fixture("cfg_bad");
  const std::string base = "corpus = seed.jsonl\nfixtures_dir = fixtures\n";
  for (const char* extra : {
           "colour = blue\n", "depth = 3\n", "depth = -1\n", "depth = two\n", "enrich = maybe\n",
           "provider = ftp\n", "rate_limit = 0\n", "parallelism = 0\n", "resolution = -1\n", "bootstrap = 1\n",
           "max_ngram = 4\n", "min_df = 0\n", "k_w = 0\n", "stopwords_dir = nowhere\n", "semantic_mode = auto\n",
           "theta_grid = 9:1\n", "kmax_grid = 0,5\n", "k_max = 0\n", "filter_order = random\n",
           "pareto_objectives = beauty\n", "interdisc_bootstrap = 1\n", "belonging = max\n", "seed = -5\n",
           "provider = http\n", "swaps_per_edge = 0\n", "corpus_format = xml\n"}) {
    EXPECT_THROW(make_config(settings_of(base + extra, dir)), ConfigError) << extra;
  }
}

TEST(MakeConfig, PathChecks) {
  auto dir = config_fixture("cfg_paths");
  EXPECT_THROW(make_config(settings_of("fixtures_dir = fixtures\n", dir)), ConfigError);
  EXPECT_THROW(make_config(settings_of("corpus = missing.jsonl\nfixtures_dir = fixtures\n", dir)), ConfigError);
  // crawling needs fixtures; a corpus-only run does not
  EXPECT_THROW(make_config(settings_of("corpus = seed.jsonl\n", dir)), ConfigError);
  EXPECT_NO_THROW(make_config(settings_of("corpus = seed.jsonl\n", dir), false));
  EXPECT_NO_THROW(make_config(settings_of("corpus = seed.jsonl\ndepth = 0\nenrich = false\n", dir)));
  EXPECT_THROW(make_config(settings_of("corpus = seed.jsonl\nfixtures_dir = nowhere\n", dir)), ConfigError);
  EXPECT_NO_THROW(make_config(settings_of("corpus = seed.jsonl\nprovider = http\nhttp_base_url = http://x\n", dir)));
}

TEST(MergeSettings, CommandLineWinsAndResolvesAgainstWorkingDir) {
  auto dir = config_fixture("cfg_merge");
  auto file = settings_of("corpus = seed.jsonl\nfixtures_dir = fixtures\nseed = 1\nk_w = 10\n", dir);
  auto merged = merge_settings(file, {{"seed", "77"}, {"out_dir", "elsewhere"}});
  auto c = make_config(merged);
  EXPECT_EQ(c.seed, 77u);
  EXPECT_EQ(c.k_w, 10u);
  EXPECT_EQ(c.out_dir, (std::filesystem::current_path() / "elsewhere").lexically_normal());
  EXPECT_EQ(merged.at("seed").origin, "command line");
}

TEST(LoadConfig, FileRelativePathsAndMissingFile) {
  auto dir = config_fixture("cfg_load");
  text::write_file(dir / "run.conf", "corpus = seed.jsonl\nfixtures_dir = fixtures\ndepth = 0\n");
  auto c = load_config(dir / "run.conf");
  EXPECT_EQ(c.corpus, dir / "seed.jsonl");
  EXPECT_EQ(c.depth, 0);
  EXPECT_THROW(load_config(dir / "absent.conf"), ConfigError);
  EXPECT_EQ(load_config(dir / "run.conf", {{"depth", "1"}}).depth, 1);
}

TEST(ConfigJson, LeavesOutPathsAndWorkerCount) {
  auto dir = config_fixture("cfg_json");
  auto a = make_config(settings_of("corpus = seed.jsonl\nfixtures_dir = fixtures\nparallelism = 1\n", dir));
  auto b = a;
  b.parallelism = 8;
  b.out_dir = "/somewhere/else";
  b.corpus = "/other/seed.jsonl";
  EXPECT_EQ(to_json(a).dump(), to_json(b).dump());
  b.seed = 5;
  EXPECT_NE(to_json(a).dump(), to_json(b).dump());
  EXPECT_TRUE(to_json(a).contains("theta_grid"));
  b.semantic_mode = SemanticMode::Fixed;
  EXPECT_TRUE(to_json(b).contains("theta_w"));
  EXPECT_FALSE(to_json(b).contains("theta_grid"));
}
