#include <gtest/gtest.h>

#include <fstream>
#include <set>
#include <sstream>

#include "signcop/config.hpp"
#include "signcop/error.hpp"

using namespace signcop;

TEST(Config, DefaultsAreValid) {
  const RunConfig cfg;
  EXPECT_NO_THROW(validate_config(cfg));
  EXPECT_EQ(cfg.train.d, 64u);
  EXPECT_EQ(cfg.train.epsilon, 0.04);
  EXPECT_EQ(cfg.train.eta, 0.01);
  EXPECT_EQ(cfg.train.max_epochs, 1000u);
  EXPECT_EQ(cfg.train.patience, 50u);
  EXPECT_EQ(cfg.repeats, 10u);
  EXPECT_EQ(cfg.splits.train, 0.8);
  EXPECT_EQ(cfg.inference_mode, InferenceMode::Mean);
}

TEST(Config, ParsesKeysCommentsAndWhitespace) {
  std::istringstream in(
      "# a comment\n"
      "\n"
      "d = 16\n"
      "  eta=0.05  \n"
      "epsilon = 0.1\r\n"
      "optimizer = adam\n"
      "inference_mode = sample\n"
      "identity_correlation = true\n"
      "split_train = 0.6\nsplit_val = 0.2\nsplit_test = 0.2\n"
      "seed = 18446744073709551615\n");
  RunConfig cfg;
  parse_config(in, cfg);
  EXPECT_EQ(cfg.train.d, 16u);
  EXPECT_EQ(cfg.train.eta, 0.05);
  EXPECT_EQ(cfg.train.epsilon, 0.1);
  EXPECT_EQ(cfg.train.optimizer, Optimizer::Adam);
  EXPECT_EQ(cfg.inference_mode, InferenceMode::Sample);
  EXPECT_TRUE(cfg.identity_correlation);
  EXPECT_EQ(cfg.splits.val, 0.2);
  EXPECT_EQ(cfg.train.seed, 18446744073709551615ull);
  EXPECT_NO_THROW(validate_config(cfg));
}

TEST(Config, ErrorsCarryLineNumbers) {
  RunConfig cfg;
  std::istringstream no_eq("d = 4\nnonsense\n");
  try {
    parse_config(no_eq, cfg);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find('2'), std::string::npos);
  }
  std::istringstream unknown("\nbogus = 1\n");
  try {
    parse_config(unknown, cfg);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("bogus"), std::string::npos);
  }
  std::istringstream empty_key("= 3\n");
  EXPECT_THROW(parse_config(empty_key, cfg), ParseError);
}

TEST(Config, RejectsBadValues) {
  RunConfig cfg;
  EXPECT_THROW(set_config_value(cfg, "d", "-1"), ConfigError);
  EXPECT_THROW(set_config_value(cfg, "d", "4.5"), ConfigError);
  EXPECT_THROW(set_config_value(cfg, "eta", "abc"), ConfigError);
  EXPECT_THROW(set_config_value(cfg, "eta", "inf"), ConfigError);
  EXPECT_THROW(set_config_value(cfg, "optimizer", "sgd"), ConfigError);
  EXPECT_THROW(set_config_value(cfg, "inference_mode", "median"), ConfigError);
  EXPECT_THROW(set_config_value(cfg, "identity_correlation", "maybe"), ConfigError);
}

TEST(Config, ValidationDomains) {
  auto invalid = [](auto mutate) {
    RunConfig cfg;
    mutate(cfg);
    EXPECT_THROW(validate_config(cfg), ConfigError);
  };
  invalid([](RunConfig& c) { c.train.eta = 0.5; });
  invalid([](RunConfig& c) { c.train.eta = 0.0; });
  invalid([](RunConfig& c) { c.train.epsilon = 0.0; });
  invalid([](RunConfig& c) { c.train.d = 0; });
  invalid([](RunConfig& c) { c.splits.train = 0.9; });
  invalid([](RunConfig& c) { c.samples = 0; });
  invalid([](RunConfig& c) { c.gradcheck_d = 9; });
  invalid([](RunConfig& c) { c.p_intra = 0.0; });
}

TEST(Config, FlagsAppliedAfterFileWin) {
  const auto path = std::filesystem::temp_directory_path() / "signcop_config_test.cfg";
  {
    std::ofstream f(path);
    f << "eta = 0.02\nd = 8\n";
  }
  RunConfig cfg = load_config(path);
  EXPECT_EQ(cfg.train.eta, 0.02);
  set_config_value(cfg, "eta", "0.03");
  EXPECT_EQ(cfg.train.eta, 0.03);
  EXPECT_EQ(cfg.train.d, 8u);
  std::filesystem::remove(path);
  EXPECT_THROW(load_config("/nonexistent/x.cfg"), ConfigError);
}

TEST(Config, EntriesRoundTripThroughParser) {
  RunConfig cfg;
  cfg.train.eta = 0.1 / 3.0;
  cfg.train.seed = 99;
  cfg.ideal_d = 12;
  cfg.train.optimizer = Optimizer::Adam;
  std::ostringstream dump;
  std::set<std::string> keys;
  for (const auto& e : config_entries(cfg)) {
    dump << e.key << " = " << e.value << "\n";
    EXPECT_TRUE(keys.insert(e.key).second) << "duplicate key " << e.key;
  }
  RunConfig back;
  std::istringstream in(dump.str());
  parse_config(in, back);
  std::ostringstream again;
  for (const auto& e : config_entries(back)) again << e.key << " = " << e.value << "\n";
  EXPECT_EQ(dump.str(), again.str());
  EXPECT_EQ(back.train.eta, cfg.train.eta);
  EXPECT_GE(keys.size(), 25u);
}
