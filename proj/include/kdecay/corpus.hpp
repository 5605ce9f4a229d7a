#pragma once

#include <string>
#include <vector>

#include "kdecay/fields.hpp"

namespace kdecay {

// Synthetic test-function descriptor.  The shipped set lives in
// data/corpus.json; the calibration constants in calibration.hpp were
// measured on exactly that set and are only meaningful against it.
struct CorpusEntry {
  std::string name;
  std::string type;  // gaussian | ring | power_cut | power_low | random_phase | mode | mix
  int dim = 1;
  unsigned seed = 0;
  double amplitude = 1.0;
  double width = 1.0;   // spectral gaussian width
  double width2 = 1.0;  // second component of a mix
  double amp2 = 0.0;
  double inner = 0.0;   // band edges for ring / power_cut
  double outer = 1.0;
  double exponent = 0.0;  // power-law slope
  int mode_k = 1;       // axis-0 lattice index of a pure mode
};

std::vector<CorpusEntry> load_corpus(const std::string& path);

// Realizes the descriptor as spectral coefficients on a periodic grid.
ScalarField corpus_field(const CorpusEntry& entry, int pts, double box);

// Canonical suite grids: every calibrated constant was measured here.
inline constexpr int corpus_pts(int dim) { return dim == 1 ? 1024 : 32; }
inline constexpr double corpus_box(int dim) {
  return dim == 1 ? 32.0 * pi : 4.0 * pi;
}
inline constexpr int corpus_jmin(int dim) { return dim == 1 ? -7 : -5; }
inline constexpr int corpus_jmax(int dim) { return dim == 1 ? 3 : 2; }

}  // namespace kdecay
