#pragma once

#include <functional>
#include <string>
#include <vector>

#include "tdslab/nn.hpp"

namespace tdslab {

struct FdEntry {
  std::string param;
  size_t index = 0;
  double analytic = 0.0;
  double fd = 0.0;
  double rel_err = 0.0;
};

struct FdReport {
  double max_rel_err = 0.0;
  size_t coords_checked = 0;
  double tol = 0.0;
  FdEntry worst;

  bool pass() const { return max_rel_err <= tol; }
};

// Central-difference check of analytic gradients already stored in `params`.
// `loss` must be a pure function of the current parameter values (fixed data,
// fixed noise). Relative error per coordinate:
//   |g - g_fd| / max(1e-12, |g| + |g_fd|)
FdReport finite_diff_check(const std::function<double()>& loss, ParamStore& params,
                           double h, double tol);

}  // namespace tdslab
