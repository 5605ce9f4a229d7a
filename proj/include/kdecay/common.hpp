#pragma once

#include <Eigen/Dense>
#include <atomic>
#include <complex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace kdecay {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using Complex = std::complex<double>;

inline constexpr double pi = 3.141592653589793238462643383279502884;

// Thrown when a constructed grid or quadrature fails its quality gates.
class grid_error : public std::runtime_error {
 public:
  explicit grid_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Thrown on invalid arguments or incompatible operands.
class input_error : public std::invalid_argument {
 public:
  explicit input_error(const std::string& msg) : std::invalid_argument(msg) {}
};

// Thrown when an algorithm fails to reach its accuracy contract.
class numeric_error : public std::runtime_error {
 public:
  explicit numeric_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Thrown on malformed run configuration input.
class config_error : public std::runtime_error {
 public:
  explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Runs body(i) for i in [0, count) on a small thread pool.  Each index owns
// its output slot, so the result is identical to the serial loop regardless
// of scheduling.
template <class Body>
void parallel_for_index(int count, Body&& body) {
  int threads = static_cast<int>(std::thread::hardware_concurrency());
  if (threads < 2 || count < 2) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  threads = std::min(threads, count);
  std::vector<std::thread> pool;
  pool.reserve(threads);
  std::atomic<int> next{0};
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&]() {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= count) return;
        body(i);
      }
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace kdecay
