#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <pup.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

// Exercises the library strictly through the C interface, the way an
// external program would: no internal headers, no core library linkage.
namespace {

class TempDir {
 public:
  TempDir() {
    auto base = std::filesystem::temp_directory_path();
    std::mt19937_64 rng(std::random_device{}());
    for (int attempt = 0; attempt < 100; ++attempt) {
      auto candidate = base / ("pup-capi-" + std::to_string(rng()));
      if (std::filesystem::create_directory(candidate)) {
        path_ = candidate;
        return;
      }
    }
    throw std::runtime_error("could not create temp directory");
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  std::string file(const std::string& name) const {
    return (path_ / name).string();
  }

 private:
  std::filesystem::path path_;
};

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
  REQUIRE(out.good());
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

class Config {
 public:
  Config() { REQUIRE(pup_config_new(&handle_) == PUP_OK); }
  ~Config() { pup_config_free(handle_); }
  void set(const std::string& key, const std::string& value) {
    REQUIRE(pup_config_set(handle_, key.c_str(), value.c_str()) == PUP_OK);
  }
  pup_config* get() const { return handle_; }

 private:
  pup_config* handle_ = nullptr;
};

void capture_warning(const char* message, void* user_data) {
  static_cast<std::vector<std::string>*>(user_data)->emplace_back(message);
}

// Builds a bundle via the synthetic prepare path and returns its location.
std::string prepare_bundle(const TempDir& dir, const std::string& out,
                           const std::string& users) {
  Config config;
  config.set("synthetic", "true");
  config.set("synthetic_users", users);
  config.set("synthetic_items", "40");
  config.set("synthetic_categories", "4");
  config.set("levels", "5");
  config.set("seed", "21");
  config.set("out", dir.file(out));
  REQUIRE(pup_run_prepare(config.get()) == PUP_OK);
  return dir.file(out + "/dataset.json");
}

}  // namespace

TEST_CASE("version and error state") {
  CHECK(std::string(pup_version()) == "0.1.0");
  CHECK(pup_config_new(nullptr) == PUP_ERROR_INVALID_ARGUMENT);
  CHECK(std::string(pup_last_error()).find("out_config") != std::string::npos);

  pup_config* config = nullptr;
  REQUIRE(pup_config_new(&config) == PUP_OK);
  CHECK(std::string(pup_last_error()).empty());
  CHECK(pup_config_set(config, nullptr, "x") == PUP_ERROR_INVALID_ARGUMENT);
  CHECK(pup_config_load_file(config, "/nonexistent.conf") != PUP_OK);
  CHECK(std::string(pup_last_error()).find("/nonexistent.conf") !=
        std::string::npos);
  pup_config_free(config);
  pup_config_free(nullptr);
}

TEST_CASE("invalid configuration surfaces at command time") {
  Config config;
  config.set("variant", "not-a-variant");
  config.set("synthetic", "true");
  CHECK(pup_run_train(config.get()) == PUP_ERROR_INVALID_ARGUMENT);
  CHECK(std::string(pup_last_error()).find("not-a-variant") !=
        std::string::npos);
  CHECK(pup_run_prepare(nullptr) == PUP_ERROR_INVALID_ARGUMENT);
}

TEST_CASE("full pipeline through the C interface") {
  TempDir dir;
  const std::string bundle = prepare_bundle(dir, "data", "15");

  Config config;
  config.set("dataset", bundle);
  config.set("out", dir.file("run"));
  config.set("variant", "bprmf");
  config.set("epochs", "2");
  config.set("dim_split", "6/2");
  config.set("batch_size", "32");
  config.set("k", "5");
  REQUIRE(pup_run_train(config.get()) == PUP_OK);
  REQUIRE(pup_run_evaluate(config.get()) == PUP_OK);
  REQUIRE(pup_run_coldstart_eval(config.get()) == PUP_OK);
  REQUIRE(pup_run_analyze_cwtp(config.get()) == PUP_OK);
  CHECK(std::filesystem::exists(dir.file("run/metrics.jsonl")));
  CHECK(std::filesystem::exists(dir.file("run/coldstart_metrics.jsonl")));
  CHECK(std::filesystem::exists(dir.file("run/cwtp.jsonl")));

  pup_dataset* dataset = nullptr;
  REQUIRE(pup_dataset_load(bundle.c_str(), &dataset) == PUP_OK);
  CHECK(pup_dataset_user_count(dataset) == 15);
  CHECK(pup_dataset_item_count(dataset) == 40);
  CHECK(pup_dataset_category_count(dataset) == 4);

  pup_model* model = nullptr;
  const std::string checkpoint = dir.file("run/checkpoint.pup");
  REQUIRE(pup_model_load(checkpoint.c_str(), dataset, &model) == PUP_OK);
  CHECK(std::string(pup_model_variant(model)) == "bprmf");

  double first = 0.0;
  REQUIRE(pup_model_score(model, 0, 0, &first) == PUP_OK);
  CHECK(std::isfinite(first));

  // A second load scores identically.
  pup_model* again = nullptr;
  REQUIRE(pup_model_load(checkpoint.c_str(), dataset, &again) == PUP_OK);
  double second = 0.0;
  REQUIRE(pup_model_score(again, 0, 0, &second) == PUP_OK);
  CHECK(second == first);
  pup_model_free(again);
  pup_model_free(model);

  // A differently shaped dataset is rejected.
  const std::string other = prepare_bundle(dir, "other", "9");
  pup_dataset* wrong = nullptr;
  REQUIRE(pup_dataset_load(other.c_str(), &wrong) == PUP_OK);
  pup_model* rejected = nullptr;
  CHECK(pup_model_load(checkpoint.c_str(), wrong, &rejected) ==
        PUP_ERROR_MISMATCH);
  CHECK(rejected == nullptr);
  pup_dataset_free(wrong);
  pup_dataset_free(dataset);
  pup_dataset_free(nullptr);
  pup_model_free(nullptr);
}

TEST_CASE("warnings route through the registered callback") {
  TempDir dir;
  // Five interactions where user b repeats one item: after the 60/20/20
  // chronological split b's only test item is already known from training,
  // so evaluation skips b with a warning.
  write_file(dir.file("interactions.csv"),
             "user_id,item_id,timestamp\n"
             "a,x,1\n"
             "a,y,2\n"
             "b,x,3\n"
             "b,x,4\n"
             "b,x,5\n");
  write_file(dir.file("catalog.csv"),
             "item_id,category_id,price\n"
             "x,c1,10\n"
             "y,c1,20\n");

  Config prepare;
  prepare.set("interactions", dir.file("interactions.csv"));
  prepare.set("catalog", dir.file("catalog.csv"));
  prepare.set("levels", "2");
  prepare.set("out", dir.file("out"));
  REQUIRE(pup_run_prepare(prepare.get()) == PUP_OK);

  Config config;
  config.set("dataset", dir.file("out/dataset.json"));
  config.set("out", dir.file("out"));
  config.set("variant", "itempop");
  config.set("k", "1");
  REQUIRE(pup_run_train(config.get()) == PUP_OK);

  std::vector<std::string> warnings;
  pup_set_log_callback(capture_warning, &warnings);
  REQUIRE(pup_run_evaluate(config.get()) == PUP_OK);
  pup_set_log_callback(nullptr, nullptr);

  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].find("b") != std::string::npos);
  CHECK(warnings[0].find("skipped") != std::string::npos);
  CHECK(read_file(dir.file("out/metrics.jsonl"))
            .find("\"users_evaluated\":0") != std::string::npos);
}
