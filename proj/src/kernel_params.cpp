#include "kdecay/kernel_params.hpp"

#include <cmath>
#include <sstream>

namespace kdecay {

KernelParams::KernelParams(int n_, double gamma_, double s_)
    : n(n_), gamma(gamma_), s(s_) {
  if (n < 1) throw input_error("KernelParams: dimension must be >= 1");
  if (!(s > 0.0 && s < 1.0))
    throw input_error("KernelParams: s must lie in (0,1)");
  if (!std::isfinite(gamma)) throw input_error("KernelParams: gamma not finite");

  const double p = gamma + 2.0 * s;
  if (gamma >= -2.0 * s) {
    regime_ = Regime::hard;
  } else if (gamma > -static_cast<double>(n) && p > -0.5 * n) {
    regime_ = Regime::soft;
  } else {
    std::ostringstream os;
    os << "KernelParams: (gamma=" << gamma << ", s=" << s << ", n=" << n
       << ") lies in neither admissible regime";
    throw input_error(os.str());
  }
}

}  // namespace kdecay
