// Measures the inequality-check extremes over the shipped corpus so the
// regression bounds in calibration.hpp can be frozen.  Rerun after any
// change to the bump profile, the corpus, or the suite grids.
#include <cstdio>
#include <limits>
#include <vector>

#include "kdecay/corpus.hpp"
#include "kdecay/inequalities.hpp"

using namespace kdecay;

int main(int argc, char** argv) {
  const std::string path = argc > 1 ? argv[1] : "data/corpus.json";
  const auto corpus = load_corpus(path);
  std::printf("corpus: %zu entries from %s\n", corpus.size(), path.c_str());

  double bern_max = 0.0, opt_max = 0.0, emb_max = 0.0;
  const std::vector<std::pair<double, double>> bern_pq = {
      {std::numeric_limits<double>::infinity(), 2.0},
      {std::numeric_limits<double>::infinity(), 1.0},
      {2.0, 1.0},
      {4.0, 2.0}};

  for (const auto& e : corpus) {
    const int pts = corpus_pts(e.dim);
    const double box = corpus_box(e.dim);
    const LPFilterBank bank =
        build_lp_filters(corpus_jmin(e.dim), corpus_jmax(e.dim));
    const ScalarField f = corpus_field(e, pts, box);

    for (int j = bank.j_min(); j <= bank.j_max(); ++j) {
      for (auto [p, q] : bern_pq) {
        const auto row = check_bernstein(f, bank, j, p, q);
        if (!row.skipped && row.ratio > bern_max) {
          bern_max = row.ratio;
          std::printf("  bernstein new max %.6f  (%s %s)\n", bern_max,
                      e.name.c_str(), row.params.c_str());
        }
      }
    }

    std::vector<OptSobIndices> configs;
    if (e.dim == 1) {
      configs.push_back({0.0, 1.0, -1.0, 2.0, 2.0});
      configs.push_back({0.5, 1.5, -0.5, 2.0, 4.0});
    } else {
      configs.push_back({0.0, 1.0, -1.0, 2.0, 2.0});
      configs.push_back({0.0, 2.0, -1.0, 2.0, 6.0});
    }
    for (const auto& ix : configs) {
      const auto row = check_opt_sob(f, bank, ix);
      if (!row.skipped && row.ratio > opt_max) {
        opt_max = row.ratio;
        std::printf("  opt_sob new max %.6f  (%s %s)\n", opt_max,
                    e.name.c_str(), row.params.c_str());
      }
    }

    for (double p : {1.0, 1.5, 2.0}) {
      const auto row = check_embedding(f, bank, p);
      if (!row.skipped && row.ratio > emb_max) {
        emb_max = row.ratio;
        std::printf("  embedding new max %.6f  (%s %s)\n", emb_max,
                    e.name.c_str(), row.params.c_str());
      }
    }
  }

  // heat characterization on the canonical low-frequency profiles
  double heat_min = std::numeric_limits<double>::infinity(), heat_max = 0.0;
  const Vec kappa = geometric_nodes(1e-4, 2.0, 480);
  const LPFilterBank rbank = build_lp_filters(-15, 2);
  const Vec tvec = geometric_nodes(1.0, 1e4, 25);
  const std::vector<double> ts(tvec.begin(), tvec.end());
  for (double rho : {0.5, 1.0, 1.5}) {
    RadialMixedField f(3, kappa, nullptr);
    for (Eigen::Index r = 0; r < f.kappa_count(); ++r)
      f.values()(r, 0) =
          f.kappa()(r) <= 1.0 ? std::pow(f.kappa()(r), rho - 1.5) : 0.0;
    const auto rep = check_heat_char(f, rbank, rho, ts);
    std::printf("  heat rho=%.1f equivalence=%.6f plateau-dev=%.6f\n", rho,
                rep.equivalence.ratio, rep.plateau.ratio);
    heat_min = std::min(heat_min, rep.equivalence.ratio);
    heat_max = std::max(heat_max, rep.equivalence.ratio);
  }

  std::printf("\nmeasured extremes:\n");
  std::printf("  bernstein max ratio : %.6f  -> freeze %.6f\n", bern_max,
              2.0 * bern_max);
  std::printf("  opt_sob max ratio   : %.6f  -> freeze %.6f\n", opt_max,
              2.0 * opt_max);
  std::printf("  embedding max ratio : %.6f  -> freeze %.6f\n", emb_max,
              2.0 * emb_max);
  std::printf("  heat equivalence    : [%.6f, %.6f]  -> freeze [%.6f, %.6f]\n",
              heat_min, heat_max, 0.5 * heat_min, 2.0 * heat_max);
  return 0;
}
