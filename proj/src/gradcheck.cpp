#include "tdslab/gradcheck.hpp"

#include <cmath>

#include "tdslab/error.hpp"

namespace tdslab {

FdReport finite_diff_check(const std::function<double()>& loss, ParamStore& params,
                           double h, double tol) {
  FdReport report;
  report.tol = tol;
  for (auto& p : params.all()) {
    for (size_t i = 0; i < p->value.data.size(); ++i) {
      const double saved = p->value.data[i];
      p->value.data[i] = saved + h;
      const double lp = loss();
      p->value.data[i] = saved - h;
      const double lm = loss();
      p->value.data[i] = saved;
      if (!std::isfinite(lp) || !std::isfinite(lm)) {
        throw NumericError("finite_diff_check: non-finite loss at " + p->name);
      }
      const double fd = (lp - lm) / (2.0 * h);
      const double g = p->grad.data[i];
      const double rel = std::fabs(g - fd) / std::max(1e-12, std::fabs(g) + std::fabs(fd));
      ++report.coords_checked;
      if (rel > report.max_rel_err) {
        report.max_rel_err = rel;
        report.worst = FdEntry{p->name, i, g, fd, rel};
      }
    }
  }
  return report;
}

}  // namespace tdslab
