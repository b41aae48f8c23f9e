#include "pup.h"

#include <exception>
#include <memory>
#include <string>

#include "checkpoint.hpp"
#include "commands.hpp"
#include "config.hpp"
#include "dataset.hpp"
#include "error.hpp"
#include "log.hpp"
#include "model.hpp"
#include "reports.hpp"

struct pup_config {
  pup::KeyValues file_values;
  pup::KeyValues overrides;
};

struct pup_dataset {
  pup::Dataset data;
};

struct pup_model {
  std::unique_ptr<pup::RankingModel> model;
};

namespace {

thread_local std::string t_last_error;

pup_status status_from(pup::ErrorCode code) {
  switch (code) {
    case pup::ErrorCode::invalid_argument: return PUP_ERROR_INVALID_ARGUMENT;
    case pup::ErrorCode::io: return PUP_ERROR_IO;
    case pup::ErrorCode::parse: return PUP_ERROR_PARSE;
    case pup::ErrorCode::diverged: return PUP_ERROR_DIVERGED;
    case pup::ErrorCode::mismatch: return PUP_ERROR_MISMATCH;
    case pup::ErrorCode::internal: return PUP_ERROR_INTERNAL;
  }
  return PUP_ERROR_INTERNAL;
}

template <typename Fn>
pup_status guarded(Fn&& fn) {
  try {
    fn();
    t_last_error.clear();
    return PUP_OK;
  } catch (const pup::PupError& error) {
    t_last_error = error.what();
    return status_from(error.code());
  } catch (const std::exception& error) {
    t_last_error = error.what();
    return PUP_ERROR_INTERNAL;
  }
}

pup_status null_argument(const char* what) {
  t_last_error = std::string(what) + " must not be null";
  return PUP_ERROR_INVALID_ARGUMENT;
}

pup_status run_command(const pup_config* config,
                       void (*command)(const pup::RunConfig&)) {
  if (config == nullptr) return null_argument("config");
  return guarded([&] {
    const pup::RunConfig resolved =
        pup::resolve_config(config->file_values, config->overrides);
    command(resolved);
  });
}

}  // namespace

extern "C" {

const char* pup_version(void) { return pup::kVersion; }

const char* pup_last_error(void) { return t_last_error.c_str(); }

void pup_set_log_callback(pup_log_callback callback, void* user_data) {
  pup::set_log_callback(callback, user_data);
}

pup_status pup_config_new(pup_config** out_config) {
  if (out_config == nullptr) return null_argument("out_config");
  return guarded([&] { *out_config = new pup_config(); });
}

void pup_config_free(pup_config* config) { delete config; }

pup_status pup_config_load_file(pup_config* config, const char* path) {
  if (config == nullptr) return null_argument("config");
  if (path == nullptr) return null_argument("path");
  return guarded([&] { config->file_values = pup::parse_config_file(path); });
}

pup_status pup_config_set(pup_config* config, const char* key,
                          const char* value) {
  if (config == nullptr) return null_argument("config");
  if (key == nullptr) return null_argument("key");
  if (value == nullptr) return null_argument("value");
  return guarded([&] { config->overrides[key] = value; });
}

pup_status pup_run_prepare(const pup_config* config) {
  return run_command(config, pup::cmd_prepare);
}

pup_status pup_run_analyze_cwtp(const pup_config* config) {
  return run_command(config, pup::cmd_analyze_cwtp);
}

pup_status pup_run_train(const pup_config* config) {
  return run_command(config, pup::cmd_train);
}

pup_status pup_run_evaluate(const pup_config* config) {
  return run_command(config, pup::cmd_evaluate);
}

pup_status pup_run_coldstart_eval(const pup_config* config) {
  return run_command(config, pup::cmd_coldstart_eval);
}

pup_status pup_dataset_load(const char* path, pup_dataset** out_dataset) {
  if (path == nullptr) return null_argument("path");
  if (out_dataset == nullptr) return null_argument("out_dataset");
  return guarded([&] {
    auto handle = std::make_unique<pup_dataset>();
    handle->data = pup::load_dataset_bundle(path);
    *out_dataset = handle.release();
  });
}

void pup_dataset_free(pup_dataset* dataset) { delete dataset; }

int pup_dataset_user_count(const pup_dataset* dataset) {
  return dataset == nullptr ? 0 : dataset->data.user_count();
}

int pup_dataset_item_count(const pup_dataset* dataset) {
  return dataset == nullptr ? 0 : dataset->data.item_count();
}

int pup_dataset_category_count(const pup_dataset* dataset) {
  return dataset == nullptr ? 0 : dataset->data.category_count();
}

pup_status pup_model_load(const char* checkpoint_path,
                          const pup_dataset* dataset, pup_model** out_model) {
  if (checkpoint_path == nullptr) return null_argument("checkpoint_path");
  if (dataset == nullptr) return null_argument("dataset");
  if (out_model == nullptr) return null_argument("out_model");
  return guarded([&] {
    auto handle = std::make_unique<pup_model>();
    handle->model = pup::load_model(checkpoint_path, dataset->data);
    *out_model = handle.release();
  });
}

void pup_model_free(pup_model* model) { delete model; }

const char* pup_model_variant(const pup_model* model) {
  if (model == nullptr) return "";
  return pup::variant_name(model->model->variant()).data();
}

pup_status pup_model_score(const pup_model* model, int user, int item,
                           double* out_score) {
  if (model == nullptr) return null_argument("model");
  if (out_score == nullptr) return null_argument("out_score");
  return guarded([&] { *out_score = model->model->score(user, item); });
}

}  // extern "C"
