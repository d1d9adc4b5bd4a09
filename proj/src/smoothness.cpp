#include "plapreg/smoothness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "plapreg/calculus.hpp"
#include "plapreg/error.hpp"
#include "plapreg/plap_math.hpp"

namespace plapreg {

namespace {

struct FieldView {
  const Grid& grid;
  int components;
  std::span<const double> values;
};

FieldView view(const ScalarField& u) { return {u.grid(), 1, u.values()}; }
FieldView view(const VectorField& u) { return {u.grid(), u.components(), u.values()}; }

double difference_norm(const FieldView& u, const Shift& v, double q) {
  if (!(q >= 1.0)) throw InvalidArgument("shift_difference_norm: need q >= 1");
  if (!(v.length > 0.0)) throw InvalidArgument("shift_difference_norm: shift must be nonzero");
  const Grid& grid = u.grid;
  const InteriorMask mask = interior_mask(grid, v.length);
  if (mask.empty()) throw InvalidArgument("shift_difference_norm: interior of radius |v| is empty");
  const auto nc = static_cast<std::size_t>(u.components);
  const double w = grid.cell_volume();
  const bool sup = std::isinf(q);
  double acc = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (!mask[k]) continue;
    const auto ij = grid.multi_index(k);
    const auto i = static_cast<long>(ij[0]) + v.steps[0];
    const auto j = static_cast<long>(ij[1]) + v.steps[1];
    const std::size_t target = grid.index(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
    double d2 = 0.0;
    for (std::size_t c = 0; c < nc; ++c) {
      const double d = u.values[target * nc + c] - u.values[k * nc + c];
      d2 += d * d;
    }
    const double d = std::sqrt(d2);
    if (sup) acc = std::max(acc, d);
    else acc += w * std::pow(d, q);
  }
  return sup ? acc : std::pow(acc, 1.0 / q);
}

double seminorm(const FieldView& u, double q, double theta, const std::vector<Shift>& shifts) {
  if (shifts.empty()) throw InvalidArgument("nikolskii_seminorm: empty shift family");
  if (!(theta >= 0.0 && theta <= 1.0)) throw InvalidArgument("nikolskii_seminorm: need 0 <= theta <= 1");
  double best = 0.0;
  for (const auto& v : shifts) best = std::max(best, difference_norm(u, v, q) / std::pow(v.length, theta));
  return best;
}

SeminormReport fit(const FieldView& u, double q, const std::vector<Shift>& shifts, const FitWindow& window) {
  SeminormReport report;
  report.q = q;
  report.window = window;
  report.shifts = shifts;
  std::sort(report.shifts.begin(), report.shifts.end(),
            [](const Shift& a, const Shift& b) { return a.length < b.length; });
  report.delta = report.shifts.empty() ? 0.0 : report.shifts.back().length;
  report.per_shift_norm.reserve(report.shifts.size());
  for (const auto& v : report.shifts) report.per_shift_norm.push_back(difference_norm(u, v, q));

  std::vector<double> xs, ys;
  std::vector<double> lengths_in_window;
  bool any_nonzero = false;
  for (std::size_t k = 0; k < report.shifts.size(); ++k) {
    const double len = report.shifts[k].length;
    const double slack = 1e-9 * len;
    if (len < window.min_length - slack || len > window.max_length + slack) continue;
    lengths_in_window.push_back(len);
    if (report.per_shift_norm[k] > 0.0) {
      any_nonzero = true;
      xs.push_back(std::log(len));
      ys.push_back(std::log(report.per_shift_norm[k]));
    }
  }
  const bool all_zero = std::all_of(report.per_shift_norm.begin(), report.per_shift_norm.end(),
                                    [](double x) { return x == 0.0; });
  if (!any_nonzero && all_zero && lengths_in_window.size() >= 3) {
    report.fitted_theta = 1.0;
    report.raw_slope = 1.0;
    report.fitted_A = 0.0;
    report.fit_r2 = 1.0;
    report.flag = "constant-like";
    return report;
  }
  std::vector<double> distinct = xs;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end(),
                             [](double a, double b) { return std::abs(a - b) < 1e-12; }),
                 distinct.end());
  if (distinct.size() < 3)
    throw InvalidArgument("fit_smoothness_exponent: fewer than 3 usable shift lengths in the fit window");

  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    mx += xs[k];
    my += ys[k];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    sxx += (xs[k] - mx) * (xs[k] - mx);
    sxy += (xs[k] - mx) * (ys[k] - my);
    syy += (ys[k] - my) * (ys[k] - my);
  }
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  double ss_res = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const double r = ys[k] - (intercept + slope * xs[k]);
    ss_res += r * r;
  }
  report.fit_points = xs.size();
  report.raw_slope = slope;
  report.fit_r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  report.fitted_A = std::exp(intercept);
  report.fitted_theta = std::clamp(slope, 0.0, 1.0);
  if (slope > 1.0 || slope < 0.0) report.flag = "clipped";
  return report;
}

}  // namespace

Shift make_shift(const Grid& grid, long steps_x, long steps_y) {
  if (grid.dim() == 1 && steps_y != 0) throw InvalidArgument("make_shift: 1D grid has no second axis");
  Shift s;
  s.steps = {steps_x, steps_y};
  s.vec = {static_cast<double>(steps_x) * grid.spacing(0),
           grid.dim() == 2 ? static_cast<double>(steps_y) * grid.spacing(1) : 0.0};
  s.length = std::hypot(s.vec[0], s.vec[1]);
  return s;
}

std::vector<Shift> dyadic_shifts(const Grid& grid, double delta, bool diagonals) {
  if (!(delta > 0.0)) throw InvalidArgument("dyadic_shifts: delta must be positive");
  std::vector<Shift> out;
  const double slack = 1e-9 * grid.min_spacing();
  for (long k = 1;; k *= 2) {
    bool added = false;
    auto push = [&](long sx, long sy) {
      Shift s = make_shift(grid, sx, sy);
      if (s.length <= delta + slack) {
        out.push_back(s);
        added = true;
      }
    };
    push(k, 0);
    if (grid.dim() == 2) {
      push(0, k);
      if (diagonals) {
        push(k, k);
        push(k, -k);
      }
    }
    if (!added) break;
  }
  std::stable_sort(out.begin(), out.end(), [](const Shift& a, const Shift& b) { return a.length < b.length; });
  return out;
}

double shift_difference_norm(const ScalarField& u, const Shift& v, double q) {
  return difference_norm(view(u), v, q);
}
double shift_difference_norm(const VectorField& u, const Shift& v, double q) {
  return difference_norm(view(u), v, q);
}

double nikolskii_seminorm(const ScalarField& u, double q, double theta, const std::vector<Shift>& shifts) {
  return seminorm(view(u), q, theta, shifts);
}
double nikolskii_seminorm(const VectorField& u, double q, double theta, const std::vector<Shift>& shifts) {
  return seminorm(view(u), q, theta, shifts);
}

FitWindow default_window(const Grid& grid, double delta) {
  return FitWindow{4.0 * grid.min_spacing(), 0.5 * delta};
}

SeminormReport fit_smoothness_exponent(const ScalarField& u, double q, const std::vector<Shift>& shifts,
                                       const FitWindow& window) {
  return fit(view(u), q, shifts, window);
}
SeminormReport fit_smoothness_exponent(const VectorField& u, double q, const std::vector<Shift>& shifts,
                                       const FitWindow& window) {
  return fit(view(u), q, shifts, window);
}

double sobolev_w12_seminorm(const VectorField& V, const InteriorMask& mask) {
  if (V.grid() != mask.grid()) throw InvalidArgument("sobolev_w12_seminorm: grid mismatch");
  if (mask.empty()) throw InvalidArgument("sobolev_w12_seminorm: empty mask");
  const Grid& grid = V.grid();
  const auto d = static_cast<std::size_t>(grid.dim());
  std::vector<double> sq(grid.size(), 0.0);
  for (int c = 0; c < V.components(); ++c) {
    const VectorField dc = gradient(V.component(c));
    for (std::size_t k = 0; k < grid.size(); ++k)
      for (std::size_t a = 0; a < d; ++a) sq[k] += dc.values()[k * d + a] * dc.values()[k * d + a];
  }
  double sum = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k)
    if (mask[k]) sum += sq[k];
  return std::sqrt(grid.cell_volume() * sum);
}

double sobolev_w12_norm(const VectorField& V, const InteriorMask& mask) {
  const double semi = sobolev_w12_seminorm(V, mask);
  double l2 = 0.0;
  for (std::size_t k = 0; k < V.size(); ++k) {
    if (!mask[k]) continue;
    for (int c = 0; c < V.components(); ++c) l2 += V.at(k, c) * V.at(k, c);
  }
  l2 *= V.grid().cell_volume();
  return std::sqrt(l2 + semi * semi);
}

VectorField apply_beta(const VectorField& V, double theta) {
  std::vector<double> out(V.values().size());
  const auto d = static_cast<Eigen::Index>(V.components());
  for (std::size_t k = 0; k < V.size(); ++k) {
    const Eigen::Map<const Eigen::VectorXd> w(V.at(k).data(), d);
    Eigen::Map<Eigen::VectorXd>(out.data() + k * static_cast<std::size_t>(d), d) = beta_theta(w, theta);
  }
  return VectorField(V.grid(), std::move(out));
}

VectorField apply_alpha(const VectorField& W, double eps, double s) {
  std::vector<double> out(W.values().size());
  const auto d = static_cast<Eigen::Index>(W.components());
  for (std::size_t k = 0; k < W.size(); ++k) {
    const Eigen::Map<const Eigen::VectorXd> w(W.at(k).data(), d);
    Eigen::Map<Eigen::VectorXd>(out.data() + k * static_cast<std::size_t>(d), d) = alpha_s(w, eps, s);
  }
  return VectorField(W.grid(), std::move(out));
}

CompositionCheck composition_bound_check(const VectorField& V, double theta, double holder_constant,
                                         const InteriorMask& mask, const std::vector<Shift>& shifts,
                                         double constant) {
  if (!(theta > 0.0 && theta < 1.0)) throw InvalidArgument("composition_bound_check: need 0 < theta < 1");
  CompositionCheck out;
  out.constant = constant;
  out.holder_constant = holder_constant;
  out.lhs = nikolskii_seminorm(apply_beta(V, theta), 2.0 / theta, theta, shifts);
  out.w12_seminorm = sobolev_w12_seminorm(V, mask);
  out.rhs = constant * holder_constant * std::pow(out.w12_seminorm, theta);
  return out;
}

nlohmann::json to_json(const SeminormReport& report) {
  nlohmann::json j;
  if (std::isinf(report.q)) j["q"] = "inf";
  else j["q"] = report.q;
  j["delta"] = report.delta;
  j["fit_window"] = {{"min_length", report.window.min_length},
                     {"max_length", std::isinf(report.window.max_length) ? -1.0 : report.window.max_length}};
  j["fitted_theta"] = report.fitted_theta;
  j["raw_slope"] = report.raw_slope;
  j["fitted_A"] = report.fitted_A;
  j["fit_r2"] = report.fit_r2;
  j["fit_points"] = report.fit_points;
  j["flag"] = report.flag;
  auto& rows = j["shifts"] = nlohmann::json::array();
  for (std::size_t k = 0; k < report.shifts.size(); ++k) {
    const auto& s = report.shifts[k];
    rows.push_back({{"length", s.length}, {"vx", s.vec[0]}, {"vy", s.vec[1]}, {"norm", report.per_shift_norm[k]}});
  }
  return j;
}

std::string per_shift_csv(const SeminormReport& report) {
  std::ostringstream out;
  out << "length,vx,vy,norm\n";
  char buf[128];
  for (std::size_t k = 0; k < report.shifts.size(); ++k) {
    const auto& s = report.shifts[k];
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", s.length, s.vec[0], s.vec[1],
                  report.per_shift_norm[k]);
    out << buf;
  }
  return out.str();
}

}  // namespace plapreg
