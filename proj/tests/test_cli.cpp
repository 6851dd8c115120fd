#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ssg/cache.hpp"
#include "ssg/cli.hpp"

using namespace ssg;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path fresh_dir(const std::string& name) {
  fs::path d = fs::temp_directory_path() / ("ssg_test_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

}  // namespace

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run({"classes", "--p", "4"}).code, 2);
  EXPECT_EQ(run({"classes", "--p", "5", "--g", "0"}).code, 2);
  EXPECT_EQ(run({"brandt", "--p", "5", "--g", "2", "--n", "4"}).code, 2);
  EXPECT_EQ(run({"brandt", "--p", "5", "--g", "2", "--n", "5"}).code, 2);
  EXPECT_EQ(run({"graph", "--p", "5", "--ell", "5"}).code, 2);
  EXPECT_EQ(run({"graph", "--p", "5", "--ell", "2", "--strip-half-edges"}).code, 2);
  EXPECT_EQ(run({"graph", "--p", "5", "--ell", "2", "--kind", "tiny"}).code, 2);
  EXPECT_EQ(run({"spectrum", "--p", "5", "--ell", "2", "--format", "dot"}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({}).code, 2);
}

TEST(Cli, ClassesAndBrandt) {
  auto r = run({"classes", "--p", "5", "--g", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["h"], "2");
  EXPECT_EQ(j["e"], (nlohmann::json{"72", "240"}));
  EXPECT_EQ(j["mass"], "13/720");
  auto b = nlohmann::json::parse(run({"brandt", "--p", "5", "--g", "1", "--n", "2"}).out);
  EXPECT_EQ(b["matrix"], (nlohmann::json{{"3"}}));
  auto csv = run({"brandt", "--p", "5", "--g", "2", "--n", "2", "--format", "csv"});
  EXPECT_EQ(csv.code, 0);
  EXPECT_NE(csv.out.find("12"), std::string::npos);
}

TEST(Cli, GraphAndSpectrum) {
  auto dot = run({"graph", "--p", "5", "--g", "2", "--ell", "2", "--kind", "little", "--format", "dot"});
  ASSERT_EQ(dot.code, 0);
  EXPECT_NE(dot.out.find("digraph"), std::string::npos);
  auto stripped = run({"graph", "--p", "5", "--g", "2", "--ell", "3", "--kind", "little", "--strip-half-edges"});
  ASSERT_EQ(stripped.code, 0) << stripped.err;
  auto s = nlohmann::json::parse(run({"spectrum", "--p", "5", "--g", "2", "--ell", "2"}).out);
  EXPECT_EQ(s["report"]["charpoly"], "x^2 - 17*x + 30");
  auto e = nlohmann::json::parse(run({"spectrum", "--p", "5", "--g", "2", "--ell", "2", "--kind", "enhanced"}).out);
  EXPECT_EQ(e["report"]["bipartite"], true);
}

TEST(Cli, VerifyPasses) {
  for (auto args : std::vector<std::vector<std::string>>{{"verify", "--p", "5", "--g", "2", "--ell", "2"},
                                                         {"verify", "--p", "7", "--g", "1", "--ell", "3"}}) {
    auto r = run(args);
    EXPECT_EQ(r.code, 0) << r.out;
    EXPECT_EQ(nlohmann::json::parse(r.out)["all_pass"], true);
  }
}

TEST(Cli, DeterministicAcrossJobs) {
  for (auto base : std::vector<std::vector<std::string>>{{"brandt", "--p", "5", "--g", "2", "--n", "3"},
                                                         {"graph", "--p", "13", "--g", "2", "--ell", "2", "--kind", "enhanced"},
                                                         {"spectrum", "--p", "7", "--g", "2", "--ell", "3", "--kind", "little"}}) {
    auto one = base, four = base;
    one.insert(one.end(), {"--jobs", "1"});
    four.insert(four.end(), {"--jobs", "4"});
    auto a = run(one), b = run(four), c = run(four);
    ASSERT_EQ(a.code, 0);
    EXPECT_EQ(a.out, b.out);
    EXPECT_EQ(b.out, c.out);
  }
}

TEST(Cache, RoundTrip) {
  auto dir = fresh_dir("roundtrip");
  auto cs = cached_class_set(dir.string(), 5, 2);
  ASSERT_TRUE(fs::exists(cache_file(dir.string(), 5, 2)));
  auto loaded = load_cache(dir.string(), 5, 2);
  ASSERT_TRUE(loaded.has_value());
  ASSERT_EQ(loaded->h(), cs.h());
  for (std::size_t i = 0; i < cs.h(); ++i) {
    EXPECT_EQ(loaded->classes[i].e, cs.classes[i].e);
    EXPECT_EQ(loaded->classes[i].lattice.gram().doubled(), cs.classes[i].lattice.gram().doubled());
    EXPECT_EQ(*loaded->classes[i].form, *cs.classes[i].form);
  }
  EXPECT_EQ(class_set_to_json(*loaded), class_set_to_json(cs));
  auto g1 = cached_class_set(dir.string(), 11, 1);
  EXPECT_EQ(class_set_to_json(*load_cache(dir.string(), 11, 1)), class_set_to_json(g1));
  fs::remove_all(dir);
}

TEST(Cache, CorruptionIsDetected) {
  auto dir = fresh_dir("corrupt");
  cached_class_set(dir.string(), 5, 2);
  const auto path = cache_file(dir.string(), 5, 2);
  nlohmann::json j;
  std::ifstream(path) >> j;

  auto write = [&](const nlohmann::json& v) { std::ofstream(path) << v.dump(); };
  auto tampered = j;
  tampered["classes"][0]["e"] = "73";
  write(tampered);
  EXPECT_THROW(load_cache(dir.string(), 5, 2), CacheError);

  // consistent checksum but a wrong automorphism count
  {
    auto copy = j;
    copy["classes"][0]["e"] = "73";
    auto body = copy["classes"].dump();
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : body) h = (h ^ c) * 1099511628211ull;
    std::ostringstream hex;
    hex << std::hex << h;
    copy["checksum"] = hex.str();
    write(copy);
    EXPECT_THROW(load_cache(dir.string(), 5, 2), CacheError);
  }

  auto wrong_version = j;
  wrong_version["format_version"] = kCacheFormatVersion + 1;
  write(wrong_version);
  EXPECT_THROW(load_cache(dir.string(), 5, 2), CacheError);

  std::ofstream(path) << "{ not json";
  EXPECT_THROW(load_cache(dir.string(), 5, 2), CacheError);

  auto r = run({"verify", "--p", "5", "--g", "2", "--ell", "2", "--cache-dir", dir.string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("cache_integrity"), std::string::npos);
  EXPECT_EQ(run({"classes", "--p", "5", "--g", "2", "--cache-dir", dir.string()}).code, 1);

  write(j);
  EXPECT_EQ(run({"verify", "--p", "5", "--g", "2", "--ell", "2", "--cache-dir", dir.string()}).code, 0);
  fs::remove_all(dir);
}

TEST(Cache, EnvironmentDirectoryAndFlagPrecedence) {
  auto env_dir = fresh_dir("env"), flag_dir = fresh_dir("flag");
  ::setenv("CACHE_DIR", env_dir.string().c_str(), 1);
  EXPECT_EQ(run({"classes", "--p", "7", "--g", "2"}).code, 0);
  EXPECT_TRUE(fs::exists(cache_file(env_dir.string(), 7, 2)));
  EXPECT_EQ(run({"classes", "--p", "3", "--g", "2", "--cache-dir", flag_dir.string()}).code, 0);
  EXPECT_TRUE(fs::exists(cache_file(flag_dir.string(), 3, 2)));
  EXPECT_FALSE(fs::exists(cache_file(env_dir.string(), 3, 2)));
  ::unsetenv("CACHE_DIR");
  fs::remove_all(env_dir);
  fs::remove_all(flag_dir);
}
