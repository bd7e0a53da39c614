#include "srpca/types.hpp"

namespace srpca {

const char* to_string(Algorithm a) {
  switch (a) {
    case Algorithm::srpca: return "srpca";
    case Algorithm::fast_srpca: return "fast-srpca";
    case Algorithm::svt: return "svt";
    case Algorithm::als: return "als";
  }
  return "unknown";
}

const char* to_string(Termination t) {
  switch (t) {
    case Termination::converged: return "converged";
    case Termination::max_iter: return "max-iter";
    case Termination::fast_fixpoint: return "fast-fixpoint";
  }
  return "unknown";
}

std::optional<Algorithm> algorithm_from_string(const std::string& name) {
  if (name == "srpca") return Algorithm::srpca;
  if (name == "fast-srpca") return Algorithm::fast_srpca;
  if (name == "svt") return Algorithm::svt;
  if (name == "als") return Algorithm::als;
  return std::nullopt;
}

}  // namespace srpca
