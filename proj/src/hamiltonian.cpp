#include "hjn/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hjn {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double horner(const std::vector<double>& c, double r) {
  double v = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * r + *it;
  return v;
}

std::vector<double> differentiate(const std::vector<double>& c) {
  std::vector<double> d;
  for (std::size_t k = 1; k < c.size(); ++k) d.push_back(static_cast<double>(k) * c[k]);
  if (d.empty()) d.push_back(0.0);
  return d;
}

double cauchy_bound(const std::vector<double>& c) {
  double lead = c.back();
  if (lead == 0.0) return 1.0;
  double m = 0.0;
  for (std::size_t k = 0; k + 1 < c.size(); ++k) m = std::max(m, std::abs(c[k] / lead));
  return 1.0 + m;
}

// sign-changing roots of a polynomial on (0, inf)
std::vector<double> positive_roots(const std::vector<double>& c) {
  std::vector<double> roots;
  if (c.size() < 2) return roots;
  double R = cauchy_bound(c);
  const int n = 4000;
  double a = 0.0, fa = horner(c, 0.0);
  for (int k = 1; k <= n; ++k) {
    double b = R * k / n;
    double fb = horner(c, b);
    if (fa == 0.0 && a > 0.0) {
      roots.push_back(a);
    } else if ((fa < 0 && fb > 0) || (fa > 0 && fb < 0)) {
      double lo = a, hi = b, flo = fa;
      for (int it = 0; it < 200 && hi - lo > 1e-16 * hi; ++it) {
        double m = 0.5 * (lo + hi);
        double fm = horner(c, m);
        if ((fm < 0) == (flo < 0)) {
          lo = m;
          flo = fm;
        } else {
          hi = m;
        }
      }
      roots.push_back(0.5 * (lo + hi));
    }
    a = b;
    fa = fb;
  }
  return roots;
}

}  // namespace

RadialProfile::RadialProfile(std::vector<double> coeffs) : c_(std::move(coeffs)) {
  while (c_.size() > 1 && c_.back() == 0.0) c_.pop_back();
  if (c_.empty()) c_.push_back(0.0);
  crit_ = positive_roots(differentiate(c_));
  crit2_ = positive_roots(differentiate(differentiate(c_)));
}

double RadialProfile::operator()(double r) const { return horner(c_, r); }

double RadialProfile::derivative(double r) const {
  double v = 0.0;
  for (std::size_t k = c_.size(); k-- > 1;) v = v * r + static_cast<double>(k) * c_[k];
  return v;
}

double RadialProfile::second_derivative(double r) const {
  double v = 0.0;
  for (std::size_t k = c_.size(); k-- > 2;) v = v * r + static_cast<double>(k * (k - 1)) * c_[k];
  return v;
}

double RadialProfile::min_on(double lo, double hi) const {
  double m = std::min((*this)(lo), (*this)(hi));
  for (double r : crit_)
    if (r > lo && r < hi) m = std::min(m, (*this)(r));
  return m;
}

double RadialProfile::max_on(double lo, double hi) const {
  double m = std::max((*this)(lo), (*this)(hi));
  for (double r : crit_)
    if (r > lo && r < hi) m = std::max(m, (*this)(r));
  return m;
}

double RadialProfile::max_slope(double R) const {
  double m = std::max(std::abs(derivative(0.0)), std::abs(derivative(R)));
  for (double r : crit2_)
    if (r < R) m = std::max(m, std::abs(derivative(r)));
  return m;
}

double RadialProfile::conjugate_domain() const {
  if (degree() >= 2) return c_.back() > 0 ? kInf : -kInf;
  return degree() == 1 ? c_[1] : 0.0;
}

double RadialProfile::conjugate(double s) const {
  if (degree() <= 1) {
    double slope = degree() == 1 ? c_[1] : 0.0;
    return s <= slope ? -c_[0] : kInf;
  }
  if (c_.back() < 0) return kInf;
  // phi' is monotone between consecutive roots of phi''; at most one solution of phi' = s per piece
  double best = -c_[0];
  std::vector<double> cuts{0.0};
  for (double r : crit2_) cuts.push_back(r);
  for (std::size_t k = 0; k < cuts.size(); ++k) {
    double a = cuts[k];
    double b;
    if (k + 1 < cuts.size()) {
      b = cuts[k + 1];
    } else {
      b = std::max(2.0 * a, 1.0);
      for (int it = 0; it < 2000 && derivative(b) < s; ++it) b *= 2.0;
    }
    double fa = derivative(a) - s, fb = derivative(b) - s;
    if ((fa > 0) == (fb > 0) && fa != 0.0 && fb != 0.0) continue;
    double lo = a, hi = b;
    for (int it = 0; it < 200 && hi - lo > 1e-16 * std::max(1.0, hi); ++it) {
      double m = 0.5 * (lo + hi);
      double fm = derivative(m) - s;
      if ((fm > 0) == (fa > 0)) {
        lo = m;
        fa = fm;
      } else {
        hi = m;
      }
    }
    for (double r : {lo, hi}) best = std::max(best, s * r - (*this)(r));
  }
  return best;
}

bool RadialProfile::convex_nondecreasing() const {
  if (derivative(0.0) < -1e-12) return false;
  if (degree() >= 2 && c_.back() < 0) return false;
  for (double r : crit2_)
    if (second_derivative(0.5 * r) < -1e-12) return false;
  double R = 2.0 * cauchy_bound(c_);
  for (int k = 0; k <= 2000; ++k)
    if (second_derivative(R * k / 2000.0) < -1e-12) return false;
  return true;
}

Hamiltonian::Hamiltonian(std::string name, RadialProfile profile, Expr potential, double offset)
    : name_(std::move(name)), profile_(std::move(profile)), potential_(std::move(potential)), offset_(offset) {}

Hamiltonian Hamiltonian::quadratic(double a, Expr potential) {
  return Hamiltonian("quadratic", RadialProfile({0.0, 0.0, 0.5 * a}), std::move(potential));
}

Hamiltonian Hamiltonian::eikonal(double speed, Expr f) {
  return Hamiltonian("eikonal", RadialProfile({0.0, speed}), f.negated());
}

Hamiltonian Hamiltonian::double_well() {
  return Hamiltonian("double_well", RadialProfile({1.0, 0.0, -2.0, 0.0, 1.0}), Expr::constant(0.0));
}

Hamiltonian Hamiltonian::polynomial(std::vector<double> coeffs, Expr potential) {
  return Hamiltonian("polynomial", RadialProfile(std::move(coeffs)), std::move(potential));
}

bool Hamiltonian::coercive() const {
  const auto& c = profile_.coeffs();
  return profile_.degree() >= 1 && c.back() > 0;
}

std::optional<double> Hamiltonian::coercivity_radius(double level, double potential_min) const {
  if (!coercive()) return std::nullopt;
  double A = level - (potential_min - offset_);
  const auto& crit = profile_.critical_points();
  std::vector<double> cuts{0.0};
  for (double r : crit) cuts.push_back(r);
  double R = std::max(1.0, cuts.back() * 2.0);
  for (int it = 0; it < 2000 && profile_(R) < A; ++it) R *= 2.0;
  cuts.push_back(R);
  // scan monotone pieces from the right; the answer is the last crossing into {phi >= A}
  for (std::size_t k = cuts.size() - 1; k >= 1; --k) {
    double a = cuts[k - 1], b = cuts[k];
    double fa = profile_(a) - A, fb = profile_(b) - A;
    if (fa >= 0 && fb >= 0) continue;
    if (fb < 0) return b;  // cannot happen on the last piece
    double lo = a, hi = b;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
      double m = 0.5 * (lo + hi);
      if (profile_(m) - A < 0) lo = m;
      else hi = m;
    }
    return hi;
  }
  return 0.0;
}

Hamiltonian Hamiltonian::shifted(double c) const {
  Hamiltonian h = *this;
  h.offset_ += c;
  return h;
}

}  // namespace hjn
