#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dataset.hpp"
#include "decoder.hpp"
#include "graph.hpp"
#include "matrix.hpp"
#include "training.hpp"

namespace pup {

enum class Variant {
  pup,
  pup_minus_category,
  pup_minus_price,
  pup_minus_both,
  itempop,
  bprmf,
  fm,
};

Variant parse_variant(std::string_view name);
std::string_view variant_name(Variant v);
bool is_pup_family(Variant v);
// Whether the variant's graph carries category / price edges (and its scorer
// the corresponding features).
bool variant_uses_category(Variant v);
bool variant_uses_price(Variant v);

// Read-only scorer shared by every model kind. Implementations keep their own
// copy of the dataset so a loaded model stays valid on its own.
class RankingModel {
 public:
  virtual ~RankingModel() = default;
  virtual Variant variant() const = 0;
  virtual double score(int user, int item) const = 0;
  virtual const Dataset& dataset() const = 0;
  // Named parameter matrices in checkpoint order.
  virtual std::vector<std::pair<std::string, const Matrix*>> parameter_matrices()
      const = 0;
};

// Two-branch graph-convolutional model. The branch layout follows the
// variant: dropping the category factor removes category edges and the
// category feature; dropping price removes price edges and features; with
// both gone the category branch disappears and the global branch takes the
// whole embedding budget.
class PupModel : public RankingModel {
 public:
  PupModel(Dataset dataset, const TrainConfig& config, Variant variant,
           Matrix global_weights, Matrix category_weights);

  Variant variant() const override { return variant_; }
  double score(int user, int item) const override;
  const Dataset& dataset() const override { return dataset_; }
  std::vector<std::pair<std::string, const Matrix*>> parameter_matrices()
      const override;

  const HeteroGraph& graph() const { return graph_; }
  bool has_category_branch() const { return !category_weights_.empty(); }

 private:
  Dataset dataset_;
  Variant variant_;
  double alpha_;
  BranchSpec global_spec_;
  BranchSpec category_spec_;
  HeteroGraph graph_;
  Matrix global_weights_;
  Matrix category_weights_;
  Matrix global_encoding_;
  Matrix category_encoding_;
};

struct FitResult {
  std::unique_ptr<RankingModel> model;
  std::vector<EpochRecord> history;
};

// Branch feature layout and dimension split for a pup-family variant.
struct PupLayout {
  BranchSpec global_spec;
  BranchSpec category_spec;
  int dim_global = 0;
  int dim_category = 0;
};
PupLayout pup_layout(Variant variant, const TrainConfig& config);

// Trains (or counts, for itempop) the selected variant.
FitResult fit_model(const Dataset& dataset, const TrainConfig& config,
                    Variant variant);

// Reassembles a model from checkpointed parameter matrices.
std::unique_ptr<RankingModel> model_from_parameters(
    const Dataset& dataset, const TrainConfig& config, Variant variant,
    std::vector<std::pair<std::string, Matrix>> params);

}  // namespace pup
