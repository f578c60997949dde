#include "hricausal/stats/types.hpp"

#include <string>

#include "hricausal/error.hpp"

namespace hricausal::stats {

std::string_view to_string(CITestKind kind) {
  return kind == CITestKind::ParCorr ? "parcorr" : "kridge-dcor";
}

CITestKind parse_ci_test(std::string_view name) {
  if (name == "parcorr") return CITestKind::ParCorr;
  if (name == "kridge-dcor" || name == "kridge_dcor") return CITestKind::KRidgeDcor;
  throw ValidationError("unknown CI test '" + std::string(name) + "' (parcorr|kridge-dcor)");
}

void KernelRegParams::validate() const {
  if (!(ridge > 0.0)) throw ValidationError("kernel ridge must be positive");
  if (permutations < 50) throw ValidationError("permutations must be >= 50");
}

void TEParams::validate() const {
  if (history < 1) throw ValidationError("TE history must be >= 1");
  if (bins < 2) throw ValidationError("TE bins must be >= 2");
  if (shuffles < 1) throw ValidationError("TE shuffles must be >= 1");
  if (!(quantile > 0.0 && quantile < 1.0)) throw ValidationError("TE quantile must lie in (0, 1)");
}

}  // namespace hricausal::stats
