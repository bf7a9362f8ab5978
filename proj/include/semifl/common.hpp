#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace semifl {

using Index = Eigen::Index;
using cplx = std::complex<double>;
using Rng = std::mt19937_64;

enum class ErrorCode {
  InvalidArgument,
  UnservableDevice,
  InfeasibleUpload,
  InfeasibleMse,
  PowerBudgetExceeded,
  LatencyInfeasible,
  GapInfeasible,
  FrequencyCapExceeded,
  LpInfeasible,
  NoFeasibleStart,
  InnerSolverFailure,
  NonContractive,
  InsufficientData,
  ConfigError,
};

const char* error_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}

  ErrorCode code() const { return code_; }

  // Outer iteration (BCD) or training round the error surfaced in; -1 when unset.
  int iteration = -1;
  int round = -1;

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, const std::string& what) {
  if (!cond) fail(ErrorCode::InvalidArgument, what);
}

// Independent stream for (seed, purpose, index) so that unrelated draws never shift each other.
inline Rng make_rng(std::uint64_t seed, std::uint64_t purpose, std::uint64_t index = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(purpose), static_cast<std::uint32_t>(index),
                    static_cast<std::uint32_t>(index >> 32)};
  return Rng(seq);
}

enum class Region { NonStable, Stable };

inline const char* region_name(Region r) { return r == Region::Stable ? "s" : "ns"; }

}  // namespace semifl
