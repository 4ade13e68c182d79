#include "waz/report.hpp"

#include <string>

namespace waz {

void summarize(CertReport& r) {
  r.flags.clear();
  // Refutations come from sampled witnesses too, so every flag says so.
  const auto add = [&r](std::string flag) { r.flags.push_back(std::move(flag) + " (certificate (sampled))"); };
  if (r.criterion) {
    add(r.criterion->violations.empty()
                          ? "star criterion nonnegative on all samples of the ball"
                          : "star criterion violated on the ball: injectivity with star-shaped images refuted");
  }
  if (r.growth) {
    switch (r.growth->verdict) {
      case GrowthVerdict::AffineBoundHolds:
        add("inverse Jacobian norm within an affine bound");
        break;
      case GrowthVerdict::SuperlinearGrowth:
        add("inverse Jacobian norm grows superlinearly: affine growth test gives no conclusion");
        break;
      case GrowthVerdict::Inconclusive:
        add("growth test inconclusive");
        break;
    }
  }
  if (r.coercivity) {
    switch (r.coercivity->verdict) {
      case CoercivityVerdict::Coercive: add("sphere minima increase: coercive"); break;
      case CoercivityVerdict::NotCoercive: add("sphere minima decay: not coercive"); break;
      case CoercivityVerdict::Inconclusive: add("coercivity inconclusive"); break;
    }
  }
  if (r.box_sup) {
    add(r.box_sup->singular_points.empty()
                          ? "inverse Jacobian norm bounded on the box"
                          : "singular Jacobian on the box: bounded inverse refuted");
  }
  if (!r.lyapunov.empty()) {
    bool all = true;
    for (const auto& l : r.lyapunov) all = all && l.monotone;
    add(all ? "Lyapunov candidate nonincreasing on all tested trajectories"
                          : "Lyapunov candidate increases along a tested trajectory");
  }
}

}  // namespace waz
