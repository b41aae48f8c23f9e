#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "config.hpp"
#include "error.hpp"
#include "helpers.hpp"

using namespace pup;
using pup::testing::TempDir;
using pup::testing::write_file;

TEST_CASE("defaults resolve without any input") {
  auto config = resolve_config({}, {});
  CHECK(config.levels == 10);
  CHECK(config.quantizer == Quantizer::uniform);
  CHECK(config.variant == Variant::pup);
  CHECK(config.train.total_dim == 64);
  CHECK(config.train.dim_global == 48);
  CHECK(config.train.dim_category == 16);
  CHECK(config.train.seed == 42);
  CHECK(config.ks == std::vector<int>{50, 100});
  CHECK(config.protocol == Protocol::standard);
  CHECK(config.threads == 1);
  CHECK(!config.entropy_groups_enabled());
  CHECK(!config.synthetic);
  CHECK(config.conv_layers == 1);
}

TEST_CASE("config files tolerate comments, blanks, and crlf") {
  TempDir dir;
  const auto path = dir.file("run.conf");
  write_file(path,
             "# training setup\r\n"
             "\n"
             "seed = 7\r\n"
             "  variant=bprmf\n"
             "k = 10, 20,30\n"
             "dim_split = 40/24\n"
             "dropout_p = 0.25\n");
  auto values = parse_config_file(path);
  CHECK(values.size() == 5);
  auto config = resolve_config(values, {});
  CHECK(config.train.seed == 7);
  CHECK(config.variant == Variant::bprmf);
  CHECK(config.ks == std::vector<int>{10, 20, 30});
  CHECK(config.train.dim_global == 40);
  CHECK(config.train.dim_category == 24);
  CHECK(config.train.total_dim == 64);
  CHECK(config.train.dropout_p == 0.25);
}

TEST_CASE("malformed config files carry path and line context") {
  TempDir dir;
  const auto path = dir.file("bad.conf");

  SUBCASE("no equals sign") {
    write_file(path, "seed 7\n");
    CHECK_THROWS_WITH_AS(static_cast<void>(parse_config_file(path)),
                         doctest::Contains(":1:"), PupError);
  }
  SUBCASE("empty key") {
    write_file(path, "= 7\n");
    CHECK_THROWS_AS(static_cast<void>(parse_config_file(path)), PupError);
  }
  SUBCASE("duplicate key") {
    write_file(path, "seed = 1\nseed = 2\n");
    CHECK_THROWS_WITH_AS(static_cast<void>(parse_config_file(path)),
                         doctest::Contains("duplicate"), PupError);
  }
  SUBCASE("missing file") {
    CHECK_THROWS_AS(static_cast<void>(parse_config_file(dir.file("none"))),
                    PupError);
  }
}

TEST_CASE("flags override the config file which overrides defaults") {
  KeyValues file_values{{"seed", "1"}, {"epochs", "5"}, {"alpha", "0.5"}};
  KeyValues overrides{{"seed", "2"}, {"threads", "4"}};
  auto config = resolve_config(file_values, overrides);
  CHECK(config.train.seed == 2);       // flag wins
  CHECK(config.train.epochs == 5);     // file survives
  CHECK(config.train.alpha == 0.5);    // file survives
  CHECK(config.threads == 4);          // flag-only
  CHECK(config.train.batch_size == 1024);  // default
}

TEST_CASE("bad values are rejected with the offending key") {
  CHECK_THROWS_WITH_AS(static_cast<void>(resolve_config({{"seed", "x"}}, {})),
                       doctest::Contains("seed"), PupError);
  CHECK_THROWS_AS(static_cast<void>(resolve_config({{"epochs", "3.5"}}, {})),
                  PupError);
  CHECK_THROWS_AS(static_cast<void>(resolve_config({{"synthetic", "yes"}}, {})),
                  PupError);
  CHECK_THROWS_AS(
      static_cast<void>(resolve_config({{"dim_split", "48-16"}}, {})),
      PupError);
  CHECK_THROWS_AS(static_cast<void>(resolve_config({{"k", "50,,100"}}, {})),
                  PupError);
  CHECK_THROWS_AS(static_cast<void>(resolve_config({{"variant", "gcn"}}, {})),
                  PupError);
  CHECK_THROWS_WITH_AS(
      static_cast<void>(resolve_config({{"no_such_key", "1"}}, {})),
      doctest::Contains("no_such_key"), PupError);
}

TEST_CASE("structural validation rejects out-of-range settings") {
  CHECK_THROWS_AS(static_cast<void>(resolve_config({{"levels", "0"}}, {})),
                  PupError);
  CHECK_THROWS_AS(static_cast<void>(resolve_config({{"threads", "0"}}, {})),
                  PupError);
  CHECK_THROWS_AS(static_cast<void>(resolve_config({{"k", "0"}}, {})),
                  PupError);
  CHECK_THROWS_WITH_AS(
      static_cast<void>(resolve_config({{"conv_layers", "2"}}, {})),
      doctest::Contains("exactly one convolution layer"), PupError);
  CHECK_THROWS_AS(
      static_cast<void>(resolve_config({{"synthetic_users", "0"}}, {})),
      PupError);
}

TEST_CASE("the echo of a resolved config resolves to the same echo") {
  KeyValues inputs{{"seed", "123"},
                   {"variant", "fm"},
                   {"dim_split", "30/10"},
                   {"learning_rate", "0.00125"},
                   {"k", "5,25"},
                   {"protocol", "ucir"},
                   {"entropy_threshold", "0.6931471805599453"},
                   {"per_user_csv", "true"},
                   {"out", "runs/exp1"}};
  auto config = resolve_config(inputs, {});
  auto echo = config_echo(config);
  auto config2 = resolve_config(echo, {});
  CHECK(config_echo(config2) == echo);
  CHECK(config2.entropy_threshold == 0.6931471805599453);
  CHECK(config2.train.learning_rate == 0.00125);
  CHECK(config2.out_dir == "runs/exp1");
}

TEST_CASE("synthetic spec mirrors the config") {
  auto config = resolve_config({{"synthetic", "true"},
                                {"synthetic_users", "12"},
                                {"synthetic_items", "34"},
                                {"synthetic_categories", "3"},
                                {"levels", "6"},
                                {"seed", "77"}},
                               {});
  auto spec = config.synthetic_spec();
  CHECK(spec.users == 12);
  CHECK(spec.items == 34);
  CHECK(spec.categories == 3);
  CHECK(spec.levels == 6);
  CHECK(spec.seed == 77);
}
