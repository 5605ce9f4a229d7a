#include "kdecay/corpus.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <set>

#include <json.hpp>

namespace kdecay {

namespace {

const std::set<std::string> kTypes = {"gaussian",     "ring", "power_cut",
                                      "power_low",    "mode", "random_phase",
                                      "mix"};

const std::set<std::string> kParamKeys = {"amplitude", "width",  "width2",
                                          "amp2",      "inner",  "outer",
                                          "exponent",  "mode_k"};

double smooth_ring(double r, double a, double b) {
  const double u = (2.0 * r - (a + b)) / (b - a);
  if (std::abs(u) >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - u * u));
}

}  // namespace

std::vector<CorpusEntry> load_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw input_error("corpus: cannot open " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw input_error("corpus: parse failure in " + path + ": " + e.what());
  }
  if (!doc.is_array() || doc.empty())
    throw input_error("corpus: expected a non-empty array");

  std::vector<CorpusEntry> out;
  std::set<std::string> names;
  for (const auto& item : doc) {
    CorpusEntry e;
    for (const auto& [key, value] : item.items()) {
      if (key == "name") {
        e.name = value.get<std::string>();
      } else if (key == "type") {
        e.type = value.get<std::string>();
      } else if (key == "dim") {
        e.dim = value.get<int>();
      } else if (key == "seed") {
        e.seed = value.get<unsigned>();
      } else if (key == "params") {
        for (const auto& [pk, pv] : value.items()) {
          if (!kParamKeys.count(pk))
            throw input_error("corpus: unknown parameter '" + pk + "' in " +
                              e.name);
          const double d = pv.get<double>();
          if (pk == "amplitude") e.amplitude = d;
          if (pk == "width") e.width = d;
          if (pk == "width2") e.width2 = d;
          if (pk == "amp2") e.amp2 = d;
          if (pk == "inner") e.inner = d;
          if (pk == "outer") e.outer = d;
          if (pk == "exponent") e.exponent = d;
          if (pk == "mode_k") e.mode_k = pv.get<int>();
        }
      } else {
        throw input_error("corpus: unknown key '" + key + "'");
      }
    }
    if (e.name.empty() || !kTypes.count(e.type) || e.dim < 1 || e.dim > 3)
      throw input_error("corpus: invalid entry '" + e.name + "'");
    if (!names.insert(e.name).second)
      throw input_error("corpus: duplicate name '" + e.name + "'");
    out.push_back(e);
  }
  return out;
}

ScalarField corpus_field(const CorpusEntry& e, int pts, double box) {
  if (e.type == "gaussian") {
    const double w = e.width, a = e.amplitude;
    return scalar_from_profile(e.dim, pts, box, [w, a](double r) {
      return a * std::exp(-0.5 * r * r / (w * w));
    });
  }
  if (e.type == "ring") {
    const double a = e.inner, b = e.outer, amp = e.amplitude;
    if (!(0.0 <= a && a < b)) throw input_error("corpus: bad ring band");
    return scalar_from_profile(e.dim, pts, box, [a, b, amp](double r) {
      return amp * smooth_ring(r, a, b);
    });
  }
  if (e.type == "power_cut") {
    const double a = e.inner, b = e.outer, amp = e.amplitude, ex = e.exponent;
    if (!(0.0 < a && a < b)) throw input_error("corpus: bad power band");
    return scalar_from_profile(e.dim, pts, box, [a, b, amp, ex](double r) {
      return (r >= a && r <= b) ? amp * std::pow(r, ex) : 0.0;
    });
  }
  if (e.type == "power_low") {
    const double b = e.outer, amp = e.amplitude, ex = e.exponent;
    if (!(b > 0.0)) throw input_error("corpus: bad cutoff");
    return scalar_from_profile(e.dim, pts, box, [b, amp, ex](double r) {
      return (r > 0.0 && r <= b) ? amp * std::pow(r, ex) : 0.0;
    });
  }
  if (e.type == "mix") {
    const double w1 = e.width, w2 = e.width2, a1 = e.amplitude, a2 = e.amp2;
    return scalar_from_profile(e.dim, pts, box, [w1, w2, a1, a2](double r) {
      return a1 * std::exp(-0.5 * r * r / (w1 * w1)) +
             a2 * std::exp(-0.5 * r * r / (w2 * w2));
    });
  }

  ScalarField f(e.dim, pts, box);
  CVec coeff = CVec::Zero(f.size());
  if (e.type == "mode") {
    std::vector<int> k(e.dim);
    bool placed = false;
    for (Eigen::Index flat = 0; flat < f.size(); ++flat) {
      f.freq_index(flat, k.data());
      bool hit = (k[0] == e.mode_k);
      for (int d = 1; d < e.dim; ++d) hit = hit && (k[d] == 0);
      if (hit) {
        coeff(flat) = e.amplitude;
        placed = true;
        break;
      }
    }
    if (!placed) throw input_error("corpus: mode index outside the grid");
  } else {  // random_phase
    std::mt19937_64 gen(e.seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double w = e.width;
    for (Eigen::Index flat = 0; flat < f.size(); ++flat) {
      const double r = f.freq_norm(flat);
      const double theta = u(gen);
      if (r == 0.0) continue;
      const double env = e.amplitude * std::exp(-0.5 * r * r / (w * w));
      coeff(flat) = env * std::exp(Complex(0.0, 2.0 * pi * theta));
    }
  }
  f.set_spectral(coeff);
  return f;
}

}  // namespace kdecay
