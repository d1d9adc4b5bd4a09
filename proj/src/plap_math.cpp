#include "plapreg/plap_math.hpp"

#include <sstream>

namespace plapreg {

TheoremMode parse_theorem_mode(const std::string& name) {
  if (name.empty() || name == "none") return TheoremMode::kNone;
  if (name == "thm2" || name == "degenerate") return TheoremMode::kDegenerate;
  if (name == "thm3" || name == "subcubic") return TheoremMode::kSubcubic;
  throw InvalidArgument("unknown theorem mode '" + name + "' (expected none, thm2 or thm3)");
}

std::string to_string(TheoremMode mode) {
  switch (mode) {
    case TheoremMode::kNone: return "none";
    case TheoremMode::kDegenerate: return "thm2";
    case TheoremMode::kSubcubic: return "thm3";
  }
  return "none";
}

bool in_theorem_range(double p, double s) {
  if (p >= 3.0) return s > 0.5 * (p - 1.0) && s <= 0.5 * p;
  if (p >= 2.0) return s >= 1.0 && s <= 0.5 * p;
  return false;
}

void validate(const PLapParams& params, TheoremMode mode) {
  std::ostringstream msg;
  const double p = params.p;
  const double s = params.s;
  if (!std::isfinite(p) || p < 2.0) msg << "p must be >= 2 (got " << p << "); ";
  if (!std::isfinite(params.eps) || params.eps < 0.0) msg << "eps must be >= 0; ";
  if (!(params.q_nik >= 1.0)) msg << "q must be >= 1; ";
  if (mode == TheoremMode::kDegenerate) {
    if (p < 3.0) msg << "thm2 mode requires p >= 3 (got " << p << "); ";
    else if (!(s > 0.5 * (p - 1.0) && s <= 0.5 * p))
      msg << "thm2 mode requires (p-1)/2 < s <= p/2 (got s = " << s << "); ";
  } else if (mode == TheoremMode::kSubcubic) {
    if (!(p >= 2.0 && p < 3.0)) msg << "thm3 mode requires 2 <= p < 3 (got " << p << "); ";
    else if (!(s >= 1.0 && s <= 0.5 * p))
      msg << "thm3 mode requires 1 <= s <= p/2 (got s = " << s << "); ";
  }
  if (params.theta_used && p > 2.0) {
    const double lo = 2.0 / p;
    const double hi = 2.0 / (p - 1.0);
    if (!(params.theta >= lo && params.theta < hi))
      msg << "theta must lie in [2/p, 2/(p-1)) = [" << lo << ", " << hi << "); ";
  }
  const std::string errors = msg.str();
  if (!errors.empty()) throw InvalidArgument("invalid parameters: " + errors.substr(0, errors.size() - 2));
}

double coercivity_constant(double p, double q) {
  if (!(p >= 2.0)) throw InvalidArgument("coercivity_constant: need p >= 2");
  if (!(q >= 2.0 && q < 3.0))
    throw InvalidArgument("coercivity_constant: need 2 <= q < 3, otherwise (p-1)(3-q) is not positive");
  return std::min(1.0, (p - 1.0) * (3.0 - q));
}

}  // namespace plapreg
