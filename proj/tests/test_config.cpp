#include <doctest.h>

#include "config.hpp"
#include "errors.hpp"

using namespace illumina;

TEST_CASE("empty config yields the defaults") {
  const ExperimentConfig c = parse_config("");
  CHECK(c.truncation.tail_tol == 1e-12);
  CHECK(c.truncation.max_dim == 4096);
  CHECK(c.optimizer.seed == 20240611);
  CHECK(c.optimizer.starts == 20);
  CHECK(c.fig2.n_th == kDefaultNthGrid);
  CHECK(c.fig5.n_total == std::vector<int>{2, 4, 10, 20, 30, 40});
  CHECK(c.mc.trials == 100000);
  CHECK(c.cache.dir.empty());
}

TEST_CASE("values are read") {
  const ExperimentConfig c = parse_config(R"(
[truncation]
tail_tol = 1e-10
max_dim = 512

[optimizer]
seed = 5
starts = 3

[fig6]
n_th = [0, 1, 2]
eta = 0.02

[qfi]
probe = "coherent"
n_signal = 2.5
)");
  CHECK(c.truncation.tail_tol == 1e-10);
  CHECK(c.truncation.max_dim == 512);
  CHECK(c.optimizer.seed == 5);
  CHECK(c.optimizer.starts == 3);
  CHECK(c.fig6.n_th == std::vector<double>{0, 1, 2});
  CHECK(c.fig6.eta == 0.02);
  CHECK(c.qfi.probe == "coherent");
  CHECK(c.qfi.n_signal == 2.5);
}

TEST_CASE("invalid configs are rejected") {
  const char* bad[] = {
      "[fig2]\nbogus = 1\n",
      "[nonsense]\nx = 1\n",
      "[fig2]\nn_th = [1, 0.5]\n",
      "[fig2]\nn_th = []\n",
      "[fig2]\nn_th = [-1, 0]\n",
      "[fig6]\neta = \"high\"\n",
      "[fig6]\neta = 1.5\n",
      "[truncation]\ntail_tol = 0\n",
      "[optimizer]\nstarts = 0\n",
      "[qfi]\nprobe = \"laser\"\n",
      "[bounds]\nstates = [\"npe\", \"squeezed\"]\n",
      "[mc]\ntrials = -5\n",
      "this is not toml = = \n",
  };
  for (const char* text : bad) {
    CAPTURE(text);
    CHECK_THROWS_AS(parse_config(text), ConfigError);
  }
}

TEST_CASE("canonical form and hash") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  const ExperimentConfig a = parse_config("");
  const ExperimentConfig b = parse_config("[fig2]\nn_th = [0, 1]\n");
  CHECK(canonical_config(a, "fig2") == canonical_config(parse_config(""), "fig2"));
  CHECK(canonical_config(a, "fig2") != canonical_config(b, "fig2"));
  // Tables of other subcommands do not enter the canonical form.
  CHECK(canonical_config(a, "fig3") == canonical_config(b, "fig3"));
}
