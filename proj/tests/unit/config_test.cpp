#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "fbac/config.hpp"
#include "fbac/errors.hpp"

using namespace fbac;
using nlohmann::json;

namespace {

const json kDefaults = {{"run", {{"eps", 0.1}, {"M", 512}, {"name", "a"}, {"list", {0.1, 0.2}}}},
                        {"opt", nullptr}};

}  // namespace

TEST(Config, TomlConvertsToJson) {
  const json j = parse_toml("[run]\neps = 0.05\nM = 256\nlist = [1, 0.5]\n");
  EXPECT_EQ(j["run"]["eps"], 0.05);
  EXPECT_EQ(j["run"]["M"], 256);
  EXPECT_EQ(j["run"]["list"].size(), 2u);
}

TEST(Config, MergeOverlaysAndPromotesIntegers) {
  const json m = merge_config(kDefaults, json{{"run", {{"eps", 1}}}});
  EXPECT_TRUE(m["run"]["eps"].is_number_float());
  EXPECT_EQ(m["run"]["eps"].get<double>(), 1.0);
  EXPECT_EQ(m["run"]["M"], 512);
}

TEST(Config, UnknownKeysAndWrongTypesAreErrors) {
  EXPECT_THROW(merge_config(kDefaults, json{{"run", {{"epz", 0.1}}}}), ConfigError);
  EXPECT_THROW(merge_config(kDefaults, json{{"extra", 1}}), ConfigError);
  EXPECT_THROW(merge_config(kDefaults, json{{"run", {{"M", 0.5}}}}), ConfigError);
  EXPECT_THROW(merge_config(kDefaults, json{{"run", {{"list", {"x"}}}}}), ConfigError);
  EXPECT_NO_THROW(merge_config(kDefaults, json{{"opt", "anything"}}));
}

TEST(Config, HashIsStableAndOrderIndependent) {
  const json a = json::parse(R"({"b": 1, "a": [1.5, 2]})");
  const json b = json::parse(R"({"a": [1.5, 2], "b": 1})");
  EXPECT_EQ(config_hash(a), config_hash(b));
  EXPECT_EQ(config_hash(a).size(), 16u);
  EXPECT_NE(config_hash(a), config_hash(json::parse(R"({"b": 2, "a": [1.5, 2]})")));
  // FNV-1a 64 of the empty object "{}"
  EXPECT_EQ(config_hash(json::object()), "08f44b07b5901a25");
}

TEST(Config, SeedParsing) {
  EXPECT_EQ(parse_seed("0x5EED"), 0x5EEDu);
  EXPECT_EQ(parse_seed("5eed"), 0x5EEDu);
  EXPECT_EQ(parse_seed("0d42"), 42u);
  EXPECT_THROW(parse_seed("xyz"), ConfigError);
}

TEST(Config, FilesByExtension) {
  const auto dir = std::filesystem::temp_directory_path() / "fbac_config_test";
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "a.toml") << "[run]\nM = 64\n";
  std::ofstream(dir / "a.json") << R"({"run": {"M": 64}})";
  std::ofstream(dir / "bad.toml") << "[run\nM = \n";
  EXPECT_EQ(load_config_file((dir / "a.toml").string()), load_config_file((dir / "a.json").string()));
  EXPECT_THROW(load_config_file((dir / "bad.toml").string()), ConfigError);
  EXPECT_THROW(load_config_file((dir / "missing.toml").string()), ConfigError);
}
