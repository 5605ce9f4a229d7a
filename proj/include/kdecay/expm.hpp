#pragma once

#include "kdecay/common.hpp"

namespace kdecay {

// Dense matrix exponential by Pade approximation with scaling and squaring.
// Order (3/5/7/9/13) is selected from the 1-norm of the argument; the order
// 13 branch scales by a power of two first and squares back.
CMat expm(const CMat& a);

}  // namespace kdecay
