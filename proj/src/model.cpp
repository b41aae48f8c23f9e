#include "model.hpp"

#include <utility>

#include "baselines.hpp"
#include "encoder.hpp"
#include "error.hpp"

namespace pup {

Variant parse_variant(std::string_view name) {
  if (name == "pup") return Variant::pup;
  if (name == "pup-minus-category") return Variant::pup_minus_category;
  if (name == "pup-minus-price") return Variant::pup_minus_price;
  if (name == "pup-minus-both") return Variant::pup_minus_both;
  if (name == "itempop") return Variant::itempop;
  if (name == "bprmf") return Variant::bprmf;
  if (name == "fm") return Variant::fm;
  fail(ErrorCode::invalid_argument,
       "unknown variant '" + std::string(name) +
           "' (expected pup|pup-minus-category|pup-minus-price|pup-minus-both|"
           "itempop|bprmf|fm)");
}

std::string_view variant_name(Variant v) {
  switch (v) {
    case Variant::pup: return "pup";
    case Variant::pup_minus_category: return "pup-minus-category";
    case Variant::pup_minus_price: return "pup-minus-price";
    case Variant::pup_minus_both: return "pup-minus-both";
    case Variant::itempop: return "itempop";
    case Variant::bprmf: return "bprmf";
    case Variant::fm: return "fm";
  }
  fail(ErrorCode::internal, "unhandled variant");
}

bool is_pup_family(Variant v) {
  return v == Variant::pup || v == Variant::pup_minus_category ||
         v == Variant::pup_minus_price || v == Variant::pup_minus_both;
}

bool variant_uses_category(Variant v) {
  return v == Variant::pup || v == Variant::pup_minus_price ||
         v == Variant::fm;
}

bool variant_uses_price(Variant v) {
  return v == Variant::pup || v == Variant::pup_minus_category ||
         v == Variant::fm;
}

PupLayout pup_layout(Variant variant, const TrainConfig& config) {
  if (!is_pup_family(variant)) {
    fail(ErrorCode::invalid_argument,
         "variant " + std::string(variant_name(variant)) +
             " has no branch layout");
  }
  const bool use_cat = variant_uses_category(variant);
  const bool use_price = variant_uses_price(variant);
  PupLayout layout;
  layout.global_spec =
      BranchSpec{.use_item = true, .use_category = false, .use_price = use_price};
  layout.category_spec = BranchSpec{.use_item = false, .use_category = use_cat,
                                    .use_price = use_price};
  if (layout.category_spec.active()) {
    layout.dim_global = config.dim_global;
    layout.dim_category = config.dim_category;
  } else {
    // Only one branch left: give it the whole budget.
    layout.dim_global = config.total_dim;
    layout.dim_category = 0;
  }
  return layout;
}

PupModel::PupModel(Dataset dataset, const TrainConfig& config, Variant variant,
                   Matrix global_weights, Matrix category_weights)
    : dataset_(std::move(dataset)),
      variant_(variant),
      alpha_(config.alpha),
      global_weights_(std::move(global_weights)),
      category_weights_(std::move(category_weights)) {
  auto layout = pup_layout(variant, config);
  global_spec_ = layout.global_spec;
  category_spec_ = layout.category_spec;
  graph_ = build_graph(dataset_, variant_uses_category(variant),
                       variant_uses_price(variant));

  const int nodes = graph_.node_count();
  if (global_weights_.rows() != nodes ||
      global_weights_.cols() != layout.dim_global) {
    fail(ErrorCode::mismatch,
         "global weights shape " + std::to_string(global_weights_.rows()) + "x" +
             std::to_string(global_weights_.cols()) + " does not match " +
             std::to_string(nodes) + "x" + std::to_string(layout.dim_global));
  }
  if (layout.dim_category > 0) {
    if (category_weights_.rows() != nodes ||
        category_weights_.cols() != layout.dim_category) {
      fail(ErrorCode::mismatch, "category weights shape mismatch");
    }
  } else if (!category_weights_.empty()) {
    fail(ErrorCode::mismatch,
         "variant " + std::string(variant_name(variant)) +
             " has no category branch, but category weights were supplied");
  }

  auto adjacency = build_normalized_adjacency(graph_);
  global_encoding_ = encode(adjacency, global_weights_);
  if (layout.dim_category > 0) {
    category_encoding_ = encode(adjacency, category_weights_);
  }
}

double PupModel::score(int user, int item) const {
  return score_pup(user, item, global_encoding_, category_encoding_, graph_,
                   dataset_, global_spec_, category_spec_, alpha_)
      .combined;
}

std::vector<std::pair<std::string, const Matrix*>> PupModel::parameter_matrices()
    const {
  std::vector<std::pair<std::string, const Matrix*>> out = {
      {"global_weights", &global_weights_}};
  if (!category_weights_.empty()) {
    out.emplace_back("category_weights", &category_weights_);
  }
  return out;
}

FitResult fit_model(const Dataset& dataset, const TrainConfig& config,
                    Variant variant) {
  if (variant == Variant::itempop) {
    return {itempop_fit(dataset), {}};
  }
  if (variant == Variant::bprmf) return bprmf_fit(dataset, config);
  if (variant == Variant::fm) return fm_fit(dataset, config);

  config.validate();
  auto layout = pup_layout(variant, config);
  TrainConfig branch_cfg = config;
  branch_cfg.dim_global = layout.dim_global;
  branch_cfg.dim_category = layout.dim_category;

  auto graph = build_graph(dataset, variant_uses_category(variant),
                           variant_uses_price(variant));
  auto adjacency = build_normalized_adjacency(graph);
  PupObjective objective(dataset, graph, adjacency, branch_cfg,
                         layout.global_spec, layout.category_spec);
  auto history = train_bpr(objective, dataset, branch_cfg);
  auto model = std::make_unique<PupModel>(
      dataset, branch_cfg, variant, std::move(objective.global_weights()),
      objective.has_category_branch() ? std::move(objective.category_weights())
                                      : Matrix());
  return {std::move(model), std::move(history)};
}

std::unique_ptr<RankingModel> model_from_parameters(
    const Dataset& dataset, const TrainConfig& config, Variant variant,
    std::vector<std::pair<std::string, Matrix>> params) {
  auto take = [&](const std::string& name, bool required) -> Matrix {
    for (auto& [key, matrix] : params) {
      if (key == name) return std::move(matrix);
    }
    if (required) {
      fail(ErrorCode::parse, "checkpoint is missing matrix '" + name + "'");
    }
    return Matrix();
  };

  if (variant == Variant::itempop) {
    return std::make_unique<ItemPopModel>(dataset, take("item_counts", true));
  }
  if (variant == Variant::bprmf || variant == Variant::fm) {
    return std::make_unique<FlatEmbeddingModel>(dataset, variant,
                                                take("table", true));
  }
  auto layout = pup_layout(variant, config);
  TrainConfig branch_cfg = config;
  branch_cfg.dim_global = layout.dim_global;
  branch_cfg.dim_category = layout.dim_category;
  return std::make_unique<PupModel>(
      dataset, branch_cfg, variant, take("global_weights", true),
      take("category_weights", layout.dim_category > 0));
}

}  // namespace pup
