#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "encoder.hpp"
#include "error.hpp"
#include "helpers.hpp"
#include "training.hpp"

using namespace pup;
using pup::testing::manual_dataset;
using pup::testing::random_dataset;

TEST_CASE("pairwise loss fixed values") {
  CHECK(std::abs(bpr_loss(0.0, 0.0) - std::log(2.0)) <= 1e-12);
  CHECK(std::abs(bpr_loss(1.0, 0.0) - std::log1p(std::exp(-1.0))) <= 1e-12);
  CHECK(bpr_loss(3.0, 2.0) == doctest::Approx(0.313262).epsilon(1e-5));

  const double saturated = bpr_loss(50.0, 0.0);
  CHECK(saturated < 1e-20);
  CHECK(std::isfinite(saturated));
  const double hopeless = bpr_loss(0.0, 50.0);
  CHECK(std::isfinite(hopeless));
  CHECK(hopeless == doctest::Approx(50.0).epsilon(1e-9));
  CHECK(std::isfinite(bpr_loss(0.0, 800.0)));  // would overflow exp(800)
}

TEST_CASE("pairwise loss is positive, decreasing, and symmetric-bounded") {
  Rng rng(1);
  double prev = bpr_loss(-5.0, 0.0);
  for (double m = -4.5; m <= 5.0; m += 0.5) {
    const double cur = bpr_loss(m, 0.0);
    CHECK(cur > 0.0);
    CHECK(cur < prev);  // strictly decreasing in the margin
    prev = cur;
  }
  for (int trial = 0; trial < 200; ++trial) {
    const double a = rng.next_uniform(-10, 10), b = rng.next_uniform(-10, 10);
    const double sum = bpr_loss(a, b) + bpr_loss(b, a);
    CHECK(sum >= 2.0 * std::log(2.0) - 1e-12);
  }
  CHECK(std::abs(bpr_loss(1.7, 1.7) + bpr_loss(1.7, 1.7) - 2 * std::log(2.0)) <=
        1e-12);
}

TEST_CASE("margin gradient matches finite differences of the loss") {
  CHECK(bpr_loss_margin_grad(0.0) == doctest::Approx(-0.5).epsilon(1e-12));
  Rng rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    const double m = rng.next_uniform(-8, 8);
    const double h = 1e-6;
    const double fd = (bpr_loss(m + h, 0.0) - bpr_loss(m - h, 0.0)) / (2 * h);
    CHECK(bpr_loss_margin_grad(m) == doctest::Approx(fd).epsilon(1e-6));
    CHECK(bpr_loss_margin_grad(m) > -1.0);
    CHECK(bpr_loss_margin_grad(m) < 0.0);
  }
}

TEST_CASE("negative sampling avoids positives and stays uniform") {
  Rng rng(3);
  std::vector<std::unordered_set<int>> positives(1);
  positives[0] = {0};
  for (int k = 0; k < 50; ++k) {
    CHECK(sample_negative(0, positives, 2, rng) == 1);
  }

  positives[0] = {0, 1, 2};
  CHECK_THROWS_AS(sample_negative(0, positives, 3, rng), PupError);

  // 12 items, 2 positives, 10 eligible: frequencies near 0.1 each.
  positives[0] = {3, 7};
  std::vector<int> counts(12, 0);
  for (int k = 0; k < 10000; ++k) counts[sample_negative(0, positives, 12, rng)]++;
  CHECK(counts[3] == 0);
  CHECK(counts[7] == 0);
  for (int i = 0; i < 12; ++i) {
    if (i == 3 || i == 7) continue;
    CHECK(counts[i] / 10000.0 == doctest::Approx(0.1).epsilon(0.2));  // 0.1 +- 0.02
  }
}

TEST_CASE("adam: zero gradient is a no-op, constant gradient steps by lr") {
  Matrix params(2, 2, 0.5);
  Matrix zero(2, 2);
  AdamState state(2, 2);
  adam_step(params, zero, state, 0.1);
  for (double v : params.flat()) CHECK(v == 0.5);
  CHECK(state.t == 1);

  // First bias-corrected step with constant gradient: lr * g / (|g| + eps).
  Matrix grads(2, 2);
  grads(0, 0) = 3.0;
  grads(0, 1) = -2.0;
  grads(1, 0) = 0.25;
  grads(1, 1) = -7.5;
  Matrix fresh(2, 2, 1.0);
  AdamState fresh_state(2, 2);
  adam_step(fresh, grads, fresh_state, 0.01);
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 2; ++c) {
      const double g = grads(r, c);
      const double expected = 1.0 - 0.01 * g / (std::abs(g) + 1e-8);
      CHECK(fresh(r, c) == doctest::Approx(expected).epsilon(1e-9));
    }
  }

  // Determinism:same inputs, same trajectory.
  Matrix a(2, 2, 1.0), b(2, 2, 1.0);
  AdamState sa(2, 2), sb(2, 2);
  for (int step = 0; step < 5; ++step) {
    adam_step(a, grads, sa, 0.05);
    adam_step(b, grads, sb, 0.05);
  }
  CHECK(std::equal(a.flat().begin(), a.flat().end(), b.flat().begin()));

  Matrix wrong(3, 2);
  CHECK_THROWS_AS(adam_step(params, wrong, state, 0.1), PupError);
}

namespace {

struct MicroSetup {
  Dataset ds;
  HeteroGraph graph;
  NormalizedAdjacency adj;
  TrainConfig cfg;
  BranchSpec global_spec;
  BranchSpec category_spec;

  MicroSetup(Rng& rng, bool with_category, bool with_price) {
    for (;;) {
      const int users = 1 + static_cast<int>(rng.next_below(4));
      const int items = 2 + static_cast<int>(rng.next_below(5));
      const int cats = 1 + static_cast<int>(rng.next_below(3));
      ds = random_dataset(rng, users, items, cats,
                          2 + static_cast<int>(rng.next_below(3)));
      auto positives = train_positive_sets(ds);
      const bool sampleable = std::any_of(
          ds.train.begin(), ds.train.end(), [&](const auto& pair) {
            return static_cast<int>(positives[pair.first].size()) <
                   ds.item_count();
          });
      if (sampleable) break;
    }
    graph = build_graph(ds, with_category, with_price);
    adj = build_normalized_adjacency(graph);
    cfg.dim_global = 1 + static_cast<int>(rng.next_below(3));
    cfg.dim_category = 1 + static_cast<int>(rng.next_below(2));
    cfg.total_dim = cfg.dim_global + cfg.dim_category;
    cfg.lambda_reg = 0.01;
    cfg.alpha = 0.7;
    cfg.dropout_p = 0.0;
    cfg.seed = rng.next_u64();
    global_spec = {.use_item = true, .use_category = false,
                   .use_price = with_price};
    category_spec = {.use_item = false, .use_category = with_category,
                     .use_price = with_price};
  }

  std::vector<Triplet> random_batch(Rng& rng, int count) {
    auto positives = train_positive_sets(ds);
    std::vector<Triplet> batch;
    std::vector<std::pair<int, int>> usable;
    for (const auto& [u, i] : ds.train) {
      if (static_cast<int>(positives[u].size()) < ds.item_count()) {
        usable.emplace_back(u, i);
      }
    }
    REQUIRE(!usable.empty());
    for (int k = 0; k < count; ++k) {
      const auto& [u, i] = usable[rng.next_below(usable.size())];
      batch.push_back({u, i, sample_negative(u, positives, ds.item_count(), rng)});
    }
    return batch;
  }
};

double loss_only(PupObjective& obj, std::span<const Triplet> batch) {
  std::vector<Matrix> sink;
  for (Matrix* p : obj.parameters()) sink.emplace_back(p->rows(), p->cols());
  return obj.batch_loss_and_gradients(batch, 0, false, sink);
}

}  // namespace

TEST_CASE("analytic gradients match central finite differences") {
  Rng rng(404);
  int instances = 0;
  while (instances < 12) {
    const bool with_cat = rng.next_bernoulli(0.75);
    const bool with_price = rng.next_bernoulli(0.75);
    MicroSetup s(rng, with_cat, with_price);
    if (s.graph.node_count() > 20) continue;
    ++instances;

    PupObjective obj(s.ds, s.graph, s.adj, s.cfg, s.global_spec,
                     s.category_spec);
    auto batch = s.random_batch(rng, 3);

    auto params = obj.parameters();
    std::vector<Matrix> grads;
    for (Matrix* p : params) grads.emplace_back(p->rows(), p->cols());
    obj.batch_loss_and_gradients(batch, 0, false, grads);

    const double h = 1e-5;
    for (std::size_t pi = 0; pi < params.size(); ++pi) {
      auto flat = params[pi]->flat();
      for (std::size_t k = 0; k < flat.size(); ++k) {
        const double saved = flat[k];
        flat[k] = saved + h;
        const double up = loss_only(obj, batch);
        flat[k] = saved - h;
        const double down = loss_only(obj, batch);
        flat[k] = saved;
        const double fd = (up - down) / (2 * h);
        const double analytic = grads[pi].flat()[k];
        const double denom =
            std::max({std::abs(fd), std::abs(analytic), 1e-5});
        REQUIRE(std::abs(fd - analytic) / denom <= 1e-4);
      }
    }
  }
}

TEST_CASE("zero parameters give ln2 loss and zero gradient") {
  Rng rng(6);
  MicroSetup s(rng, true, true);
  s.cfg.lambda_reg = 0.3;  // reg of zero rows is still zero
  PupObjective obj(s.ds, s.graph, s.adj, s.cfg, s.global_spec, s.category_spec);
  obj.global_weights().fill(0.0);
  obj.category_weights().fill(0.0);

  auto batch = s.random_batch(rng, 4);
  std::vector<Matrix> grads;
  for (Matrix* p : obj.parameters()) grads.emplace_back(p->rows(), p->cols());
  const double loss = obj.batch_loss_and_gradients(batch, 0, false, grads);
  CHECK(std::abs(loss - std::log(2.0)) <= 1e-12);
  for (const auto& g : grads) {
    for (double v : g.flat()) CHECK(v == 0.0);
  }
}

TEST_CASE("a triplet whose negative equals its positive has zero gradient") {
  Rng rng(7);
  MicroSetup s(rng, true, true);
  s.cfg.lambda_reg = 0.0;
  PupObjective obj(s.ds, s.graph, s.adj, s.cfg, s.global_spec, s.category_spec);
  const auto [u, i] = s.ds.train.front();
  std::vector<Triplet> batch = {{u, i, i}};
  std::vector<Matrix> grads;
  for (Matrix* p : obj.parameters()) grads.emplace_back(p->rows(), p->cols());
  const double loss = obj.batch_loss_and_gradients(batch, 0, false, grads);
  CHECK(std::abs(loss - std::log(2.0)) <= 1e-12);
  for (const auto& g : grads) {
    for (double v : g.flat()) CHECK(std::abs(v) <= 1e-15);
  }
}

namespace {

// Relabels users, items, and categories; price levels keep their identity.
struct Relabeling {
  std::vector<int> users, items, cats;

  static std::vector<int> random_perm(int n, Rng& rng) {
    std::vector<int> p(n);
    std::iota(p.begin(), p.end(), 0);
    for (int k = n - 1; k > 0; --k) std::swap(p[k], p[rng.next_below(k + 1)]);
    return p;
  }

  Relabeling(const Dataset& ds, Rng& rng)
      : users(random_perm(ds.user_count(), rng)),
        items(random_perm(ds.item_count(), rng)),
        cats(random_perm(ds.category_count(), rng)) {}

  Dataset apply(const Dataset& ds) const {
    Dataset out;
    out.price_level_count = ds.price_level_count;
    out.quantizer = ds.quantizer;
    out.user_ids.resize(ds.user_count());
    for (int u = 0; u < ds.user_count(); ++u) {
      out.user_ids[users[u]] = ds.user_ids[u];
    }
    out.item_ids.resize(ds.item_count());
    out.item_category.resize(ds.item_count());
    out.item_price_level.resize(ds.item_count());
    out.item_price.resize(ds.item_count());
    for (int i = 0; i < ds.item_count(); ++i) {
      out.item_ids[items[i]] = ds.item_ids[i];
      out.item_category[items[i]] = cats[ds.item_category[i]];
      out.item_price_level[items[i]] = ds.item_price_level[i];
      out.item_price[items[i]] = ds.item_price[i];
    }
    out.category_ids.resize(ds.category_count());
    for (int c = 0; c < ds.category_count(); ++c) {
      out.category_ids[cats[c]] = ds.category_ids[c];
    }
    for (const auto& [u, i] : ds.train) out.train.emplace_back(users[u], items[i]);
    for (const auto& [u, i] : ds.validation) {
      out.validation.emplace_back(users[u], items[i]);
    }
    for (const auto& [u, i] : ds.test) out.test.emplace_back(users[u], items[i]);
    for (int u = 0; u < ds.user_count(); ++u) out.user_index[out.user_ids[u]] = u;
    for (int i = 0; i < ds.item_count(); ++i) out.item_index[out.item_ids[i]] = i;
    for (int c = 0; c < ds.category_count(); ++c) {
      out.category_index[out.category_ids[c]] = c;
    }
    return out;
  }

  int node(const Dataset& ds, int v) const {
    const int m = ds.user_count(), n = ds.item_count(), c = ds.category_count();
    if (v < m) return users[v];
    if (v < m + n) return m + items[v - m];
    if (v < m + n + c) return m + n + cats[v - m - n];
    return v;
  }
};

}  // namespace

TEST_CASE("loss and gradients are equivariant under index relabeling") {
  Rng rng(505);
  for (int trial = 0; trial < 5; ++trial) {
    MicroSetup s(rng, true, true);
    Relabeling perm(s.ds, rng);
    auto ds2 = perm.apply(s.ds);
    auto graph2 = build_graph(ds2, true, true);
    auto adj2 = build_normalized_adjacency(graph2);

    PupObjective obj1(s.ds, s.graph, s.adj, s.cfg, s.global_spec,
                      s.category_spec);
    PupObjective obj2(ds2, graph2, adj2, s.cfg, s.global_spec, s.category_spec);
    const int vcount = s.graph.node_count();
    for (int v = 0; v < vcount; ++v) {
      const int w = perm.node(s.ds, v);
      for (int k = 0; k < obj1.global_weights().cols(); ++k) {
        obj2.global_weights()(w, k) = obj1.global_weights()(v, k);
      }
      for (int k = 0; k < obj1.category_weights().cols(); ++k) {
        obj2.category_weights()(w, k) = obj1.category_weights()(v, k);
      }
    }

    auto batch1 = s.random_batch(rng, 4);
    std::vector<Triplet> batch2;
    for (const auto& t : batch1) {
      batch2.push_back(
          {perm.users[t.user], perm.items[t.pos], perm.items[t.neg]});
    }

    std::vector<Matrix> g1, g2;
    for (Matrix* p : obj1.parameters()) g1.emplace_back(p->rows(), p->cols());
    for (Matrix* p : obj2.parameters()) g2.emplace_back(p->rows(), p->cols());
    const double l1 = obj1.batch_loss_and_gradients(batch1, 0, false, g1);
    const double l2 = obj2.batch_loss_and_gradients(batch2, 0, false, g2);
    CHECK(std::abs(l1 - l2) <= 1e-12);
    for (std::size_t pi = 0; pi < g1.size(); ++pi) {
      for (int v = 0; v < vcount; ++v) {
        const int w = perm.node(s.ds, v);
        for (int k = 0; k < g1[pi].cols(); ++k) {
          REQUIRE(std::abs(g1[pi](v, k) - g2[pi](w, k)) <= 1e-12);
        }
      }
    }
  }
}

namespace {

TrainConfig tiny_config() {
  TrainConfig cfg;
  cfg.total_dim = 12;
  cfg.dim_global = 8;
  cfg.dim_category = 4;
  cfg.batch_size = 16;
  cfg.epochs = 5;
  cfg.lambda_reg = 1e-4;
  cfg.dropout_p = 0.0;
  cfg.seed = 99;
  return cfg;
}

}  // namespace

TEST_CASE("trainer: zero epochs and zero learning rate leave parameters alone") {
  Rng rng(8);
  auto ds = random_dataset(rng, 8, 12, 3, 3);
  auto graph = build_graph(ds, true, true);
  auto adj = build_normalized_adjacency(graph);
  auto cfg = tiny_config();

  BranchSpec g{.use_item = true, .use_price = true};
  BranchSpec c{.use_category = true, .use_price = true};

  cfg.epochs = 0;
  PupObjective frozen(ds, graph, adj, cfg, g, c);
  const auto before = frozen.global_weights();
  auto history = train_bpr(frozen, ds, cfg);
  CHECK(history.empty());
  CHECK(std::equal(before.flat().begin(), before.flat().end(),
                   frozen.global_weights().flat().begin()));

  cfg.epochs = 3;
  cfg.learning_rate = 0.0;
  PupObjective still(ds, graph, adj, cfg, g, c);
  const auto init = still.global_weights();
  history = train_bpr(still, ds, cfg);
  CHECK(history.size() == 3);
  CHECK(std::equal(init.flat().begin(), init.flat().end(),
                   still.global_weights().flat().begin()));
}

TEST_CASE("trainer is deterministic and applies the decay schedule") {
  Rng rng(9);
  auto ds = random_dataset(rng, 10, 15, 3, 3);
  auto graph = build_graph(ds, true, true);
  auto adj = build_normalized_adjacency(graph);
  auto cfg = tiny_config();
  cfg.epochs = 8;  // decays at epochs 4 and 6

  BranchSpec g{.use_item = true, .use_price = true};
  BranchSpec c{.use_category = true, .use_price = true};

  PupObjective a(ds, graph, adj, cfg, g, c);
  PupObjective b(ds, graph, adj, cfg, g, c);
  auto ha = train_bpr(a, ds, cfg);
  auto hb = train_bpr(b, ds, cfg);
  REQUIRE(ha.size() == 8);
  for (std::size_t e = 0; e < ha.size(); ++e) {
    CHECK(ha[e].epoch == static_cast<int>(e) + 1);
    CHECK(ha[e].mean_loss == hb[e].mean_loss);  // bit-identical
    CHECK(ha[e].learning_rate == hb[e].learning_rate);
  }
  CHECK(std::equal(a.global_weights().flat().begin(),
                   a.global_weights().flat().end(),
                   b.global_weights().flat().begin()));

  CHECK(ha[0].learning_rate == doctest::Approx(1e-2).epsilon(1e-12));
  CHECK(ha[3].learning_rate == doctest::Approx(1e-3).epsilon(1e-12));
  CHECK(ha[5].learning_rate == doctest::Approx(1e-4).epsilon(1e-12));
  CHECK(ha[7].learning_rate == doctest::Approx(1e-4).epsilon(1e-12));
}

TEST_CASE("training reduces the loss on a small dataset") {
  Rng rng(10);
  auto ds = random_dataset(rng, 20, 30, 4, 4);
  auto graph = build_graph(ds, true, true);
  auto adj = build_normalized_adjacency(graph);
  auto cfg = tiny_config();
  cfg.epochs = 30;
  cfg.batch_size = 64;

  BranchSpec g{.use_item = true, .use_price = true};
  BranchSpec c{.use_category = true, .use_price = true};
  PupObjective obj(ds, graph, adj, cfg, g, c);
  auto history = train_bpr(obj, ds, cfg);
  REQUIRE(history.size() == 30);
  CHECK(history.back().mean_loss < history.front().mean_loss);
  for (const auto& rec : history) CHECK(std::isfinite(rec.mean_loss));
}

TEST_CASE("training with dropout stays finite and deterministic") {
  Rng rng(11);
  auto ds = random_dataset(rng, 10, 15, 3, 3);
  auto graph = build_graph(ds, true, true);
  auto adj = build_normalized_adjacency(graph);
  auto cfg = tiny_config();
  cfg.dropout_p = 0.3;
  cfg.epochs = 4;

  BranchSpec g{.use_item = true, .use_price = true};
  BranchSpec c{.use_category = true, .use_price = true};
  PupObjective a(ds, graph, adj, cfg, g, c);
  PupObjective b(ds, graph, adj, cfg, g, c);
  auto ha = train_bpr(a, ds, cfg);
  auto hb = train_bpr(b, ds, cfg);
  for (std::size_t e = 0; e < ha.size(); ++e) {
    CHECK(std::isfinite(ha[e].mean_loss));
    CHECK(ha[e].mean_loss == hb[e].mean_loss);
  }
}

TEST_CASE("config validation rejects inconsistent settings") {
  TrainConfig cfg;
  cfg.dim_global = 10;  // 10 + 16 != 64
  CHECK_THROWS_AS(cfg.validate(), PupError);
  cfg = TrainConfig{};
  cfg.dropout_p = 1.0;
  CHECK_THROWS_AS(cfg.validate(), PupError);
  cfg = TrainConfig{};
  cfg.neg_rate = 0;
  CHECK_THROWS_AS(cfg.validate(), PupError);
  cfg = TrainConfig{};
  cfg.batch_size = 0;
  CHECK_THROWS_AS(cfg.validate(), PupError);
  CHECK_NOTHROW(TrainConfig{}.validate());
}
