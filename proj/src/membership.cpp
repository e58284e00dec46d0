#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "steamreg/anfis.hpp"
#include "steamreg/errors.hpp"

namespace steamreg {
namespace {

constexpr double kMinWidth = 1e-6;
constexpr double kMinBellShape = 1e-3;

double sigmoid(double a, double c, double x) { return 1.0 / (1.0 + std::exp(-a * (x - c))); }

std::size_t expected_params(MfFamily f, std::size_t given) {
  switch (f) {
    case MfFamily::gaussian: return given == 4 ? 4 : 2;
    case MfFamily::bell:
    case MfFamily::triangular: return 3;
    default: return 4;
  }
}

// S-curve rising from 0 at a to 1 at b, and its (d/da, d/db).
double s_curve(double a, double b, double x, double* da, double* db) {
  if (da) *da = 0.0;
  if (db) *db = 0.0;
  if (x <= a) return 0.0;
  if (x >= b) return 1.0;
  const double w = b - a;
  if (x <= 0.5 * (a + b)) {
    const double u = (x - a) / w;
    if (da) *da = 4.0 * u * (x - b) / (w * w);
    if (db) *db = 4.0 * u * (-(x - a) / (w * w));
    return 2.0 * u * u;
  }
  const double v = (x - b) / w;
  if (da) *da = -4.0 * v * (x - b) / (w * w);
  if (db) *db = -4.0 * v * (-(x - a) / (w * w));
  return 1.0 - 2.0 * v * v;
}

// Z-curve falling from 1 at c to 0 at d, and its (d/dc, d/dd).
double z_curve(double c, double d, double x, double* dc, double* dd) {
  if (dc) *dc = 0.0;
  if (dd) *dd = 0.0;
  if (x <= c) return 1.0;
  if (x >= d) return 0.0;
  const double w = d - c;
  if (x <= 0.5 * (c + d)) {
    const double u = (x - c) / w;
    if (dc) *dc = -4.0 * u * (x - d) / (w * w);
    if (dd) *dd = -4.0 * u * (-(x - c) / (w * w));
    return 1.0 - 2.0 * u * u;
  }
  const double v = (x - d) / w;
  if (dc) *dc = 4.0 * v * (x - d) / (w * w);
  if (dd) *dd = 4.0 * v * (-(x - c) / (w * w));
  return 2.0 * v * v;
}

// Rising ramp from a to b; writes partials for x strictly inside (a, b).
double ramp_up(double a, double b, double x, double* da, double* db) {
  const double w = b - a;
  if (da) *da = (x - b) / (w * w);
  if (db) *db = -(x - a) / (w * w);
  return (x - a) / w;
}

double ramp_down(double c, double d, double x, double* dc, double* dd) {
  const double w = d - c;
  if (dc) *dc = (d - x) / (w * w);
  if (dd) *dd = (x - c) / (w * w);
  return (d - x) / w;
}

double eval_impl(const MembershipFunction& mf, double x, double* g) {
  const auto& p = mf.params;
  switch (mf.family) {
    case MfFamily::gaussian: {
      if (p.size() == 2) {
        const double c = p[0], s = p[1];
        const double mu = std::exp(-(x - c) * (x - c) / (2.0 * s * s));
        if (g) {
          g[0] = mu * (x - c) / (s * s);
          g[1] = mu * (x - c) * (x - c) / (s * s * s);
        }
        return mu;
      }
      const double c1 = p[0], s1 = p[1], c2 = p[2], s2 = p[3];
      const double left = x < c1 ? std::exp(-(x - c1) * (x - c1) / (2.0 * s1 * s1)) : 1.0;
      const double right = x > c2 ? std::exp(-(x - c2) * (x - c2) / (2.0 * s2 * s2)) : 1.0;
      if (g) {
        std::fill(g, g + 4, 0.0);
        if (x < c1) {
          g[0] = right * left * (x - c1) / (s1 * s1);
          g[1] = right * left * (x - c1) * (x - c1) / (s1 * s1 * s1);
        }
        if (x > c2) {
          g[2] = left * right * (x - c2) / (s2 * s2);
          g[3] = left * right * (x - c2) * (x - c2) / (s2 * s2 * s2);
        }
      }
      return left * right;
    }
    case MfFamily::bell: {
      const double a = p[0], b = p[1], c = p[2];
      const double u = (x - c) / a;
      const double au = std::abs(u);
      const double t = std::pow(au, 2.0 * b);
      const double mu = 1.0 / (1.0 + t);
      if (g) {
        const double mu2 = mu * mu;
        // dt/du = 2b |u|^(2b-1) sign(u)
        const double dtdu = au > 0.0 ? 2.0 * b * std::pow(au, 2.0 * b - 1.0) * (u > 0 ? 1.0 : -1.0) : 0.0;
        g[0] = -mu2 * dtdu * (-u / a);
        g[1] = au > 0.0 ? -mu2 * t * 2.0 * std::log(au) : 0.0;
        g[2] = -mu2 * dtdu * (-1.0 / a);
      }
      return mu;
    }
    case MfFamily::triangular: {
      const double a = p[0], b = p[1], c = p[2];
      if (g) std::fill(g, g + 3, 0.0);
      if (x == b) return 1.0;
      if (x <= a || x >= c) return 0.0;
      if (x < b) return ramp_up(a, b, x, g ? &g[0] : nullptr, g ? &g[1] : nullptr);
      return ramp_down(b, c, x, g ? &g[1] : nullptr, g ? &g[2] : nullptr);
    }
    case MfFamily::trapezoidal: {
      const double a = p[0], b = p[1], c = p[2], d = p[3];
      if (g) std::fill(g, g + 4, 0.0);
      if (x >= b && x <= c) return 1.0;
      if (x <= a || x >= d) return 0.0;
      if (x < b) return ramp_up(a, b, x, g ? &g[0] : nullptr, g ? &g[1] : nullptr);
      return ramp_down(c, d, x, g ? &g[2] : nullptr, g ? &g[3] : nullptr);
    }
    case MfFamily::sigmoid_difference:
    case MfFamily::sigmoid_product: {
      const double a1 = p[0], c1 = p[1], a2 = p[2], c2 = p[3];
      const double s1 = sigmoid(a1, c1, x);
      const double s2 = sigmoid(a2, c2, x);
      // ds/da = s(1-s)(x-c), ds/dc = -a s(1-s)
      const double d1a = s1 * (1.0 - s1) * (x - c1), d1c = -a1 * s1 * (1.0 - s1);
      const double d2a = s2 * (1.0 - s2) * (x - c2), d2c = -a2 * s2 * (1.0 - s2);
      if (mf.family == MfFamily::sigmoid_product) {
        if (g) {
          g[0] = s2 * d1a;
          g[1] = s2 * d1c;
          g[2] = s1 * d2a;
          g[3] = s1 * d2c;
        }
        return s1 * s2;
      }
      const double diff = s1 - s2;
      if (g) {
        const double sign = diff > 0.0 ? 1.0 : (diff < 0.0 ? -1.0 : 0.0);
        g[0] = sign * d1a;
        g[1] = sign * d1c;
        g[2] = -sign * d2a;
        g[3] = -sign * d2c;
      }
      return std::min(std::abs(diff), 1.0);
    }
    case MfFamily::pi_curve: {
      double sa = 0, sb = 0, zc = 0, zd = 0;
      const double s = s_curve(p[0], p[1], x, &sa, &sb);
      const double z = z_curve(p[2], p[3], x, &zc, &zd);
      if (g) {
        g[0] = z * sa;
        g[1] = z * sb;
        g[2] = s * zc;
        g[3] = s * zd;
      }
      return s * z;
    }
  }
  return 0.0;
}

}  // namespace

std::string_view mf_family_name(MfFamily family) {
  switch (family) {
    case MfFamily::gaussian: return "gaussian";
    case MfFamily::bell: return "bell";
    case MfFamily::triangular: return "triangular";
    case MfFamily::trapezoidal: return "trapezoidal";
    case MfFamily::sigmoid_difference: return "sigmoid_difference";
    case MfFamily::sigmoid_product: return "sigmoid_product";
    case MfFamily::pi_curve: return "pi_curve";
  }
  return "unknown";
}

MfFamily parse_mf_family(std::string_view name) {
  for (auto f : {MfFamily::gaussian, MfFamily::bell, MfFamily::triangular, MfFamily::trapezoidal,
                 MfFamily::sigmoid_difference, MfFamily::sigmoid_product, MfFamily::pi_curve}) {
    if (mf_family_name(f) == name) return f;
  }
  throw InvalidArgument("unknown membership function family '" + std::string(name) + "'");
}

bool membership_valid(const MembershipFunction& mf) {
  const auto& p = mf.params;
  if (p.size() != expected_params(mf.family, p.size())) return false;
  for (double v : p) {
    if (!std::isfinite(v)) return false;
  }
  switch (mf.family) {
    case MfFamily::gaussian:
      if (p.size() == 2) return p[1] > 0.0;
      return p[1] > 0.0 && p[3] > 0.0 && p[0] <= p[2];
    case MfFamily::bell: return p[0] > 0.0 && p[1] > 0.0;
    case MfFamily::triangular: return p[0] <= p[1] && p[1] <= p[2] && p[0] < p[2];
    case MfFamily::trapezoidal:
    case MfFamily::pi_curve: return std::is_sorted(p.begin(), p.end()) && p[0] < p[3];
    case MfFamily::sigmoid_difference:
    case MfFamily::sigmoid_product: return true;
  }
  return false;
}

double membership_eval(const MembershipFunction& mf, double x) {
  if (!membership_valid(mf)) {
    throw InvalidArgument("invalid parameters for " + std::string(mf_family_name(mf.family)) +
                          " membership function");
  }
  return eval_impl(mf, x, nullptr);
}

std::vector<double> membership_param_grad(const MembershipFunction& mf, double x) {
  if (!membership_valid(mf)) {
    throw InvalidArgument("invalid parameters for " + std::string(mf_family_name(mf.family)) +
                          " membership function");
  }
  std::vector<double> g(mf.params.size(), 0.0);
  eval_impl(mf, x, g.data());
  return g;
}

bool membership_clamp(MembershipFunction& mf) {
  const auto before = mf.params;
  auto& p = mf.params;
  switch (mf.family) {
    case MfFamily::gaussian:
      p[1] = std::max(std::abs(p[1]), kMinWidth);
      if (p.size() == 4) {
        p[3] = std::max(std::abs(p[3]), kMinWidth);
        if (p[0] > p[2]) p[0] = p[2] = 0.5 * (p[0] + p[2]);
      }
      break;
    case MfFamily::bell:
      p[0] = std::max(std::abs(p[0]), kMinWidth);
      p[1] = std::max(p[1], kMinBellShape);
      break;
    case MfFamily::triangular:
    case MfFamily::trapezoidal:
    case MfFamily::pi_curve:
      std::sort(p.begin(), p.end());
      if (p.back() - p.front() < kMinWidth) p.back() = p.front() + kMinWidth;
      break;
    case MfFamily::sigmoid_difference:
    case MfFamily::sigmoid_product: break;
  }
  return p != before;
}

double rule_firing(std::span<const double> memberships) {
  double w = 1.0;
  for (double m : memberships) w *= m;
  return w;
}

std::vector<double> normalize_firing(std::span<const double> strengths) {
  const double total = std::accumulate(strengths.begin(), strengths.end(), 0.0);
  if (!(total > 0.0)) throw NoFiringError("input outside all membership supports");
  std::vector<double> out(strengths.begin(), strengths.end());
  for (double& w : out) w /= total;
  return out;
}

double consequent_eval(std::span<const double> coeffs, std::span<const double> x) {
  if (coeffs.size() != x.size() + 1) {
    throw DimensionError("consequent_eval: expected " + std::to_string(x.size() + 1) +
                         " coefficients, got " + std::to_string(coeffs.size()));
  }
  double z = coeffs.back();
  for (std::size_t i = 0; i < x.size(); ++i) z += coeffs[i] * x[i];
  return z;
}

}  // namespace steamreg
