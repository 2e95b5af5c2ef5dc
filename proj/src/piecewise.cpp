#include "mfe/piecewise.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "mfe/errors.hpp"

namespace mfe {

namespace {

double ipow(double t, int m) {
  double r = 1.0;
  for (int i = 0; i < m; ++i) r *= t;
  return r;
}

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// e^{kt} * sum_j (-1)^j m!/(m-j)! t^{m-j} / k^{j+1}
double primitive(double k, int m, double t) {
  double sum = 0.0, factor = 1.0 / k;
  for (int j = 0; j <= m; ++j) {
    sum += factor * ipow(t, m - j);
    factor *= -static_cast<double>(m - j) / k;
  }
  return std::exp(k * t) * sum;
}

[[noreturn]] void diverges() {
  throw DivergentMomentError("integral of a non-decaying power term diverges", -1,
                             std::numeric_limits<double>::quiet_NaN());
}

}  // namespace

double integrate_exp_poly(double k, int m, double t0, double t1) {
  if (t0 == t1) return 0.0;
  const bool inf0 = std::isinf(t0), inf1 = std::isinf(t1);
  if (std::abs(k) < kDegenerateExponent) {
    if (inf0 || inf1) diverges();
    return (ipow(t1, m + 1) - ipow(t0, m + 1)) / (m + 1);
  }
  if ((inf1 && !(k < 0.0)) || (inf0 && !(k > 0.0))) diverges();
  if (inf0 || inf1) {
    const double upper = inf1 ? 0.0 : primitive(k, m, t1);
    const double lower = inf0 ? 0.0 : primitive(k, m, t0);
    return upper - lower;
  }
  if (m == 0) return std::exp(k * t0) * std::expm1(k * (t1 - t0)) / k;
  const double reach = std::abs(k) * std::max(std::abs(t0), std::abs(t1));
  if (reach < 1e-3) {
    // Taylor series of exp(kt); the closed form cancels badly here.
    double sum = 0.0, coeff = 1.0;
    for (int n = 0; n < 40; ++n) {
      const int p = m + n + 1;
      const double term = coeff * (ipow(t1, p) - ipow(t0, p)) / p;
      sum += term;
      if (n > 2 && std::abs(term) <= 1e-18 * std::abs(sum)) break;
      coeff *= k / (n + 1);
    }
    return sum;
  }
  return primitive(k, m, t1) - primitive(k, m, t0);
}

double LogPowerSum::operator()(double x) const {
  const double t = std::log(x / scale_);
  double sum = 0.0;
  for (const auto& term : terms_) {
    if (term.coef == 0.0) continue;
    sum += term.coef * std::exp(term.expo * t) * ipow(t, term.log_power);
  }
  return sum;
}

LogPowerSum LogPowerSum::derivative() const {
  LogPowerSum out(scale_);
  for (const auto& term : terms_) {
    if (term.expo != 0.0) {
      out.terms_.push_back({term.coef * term.expo / scale_, term.expo - 1.0, term.log_power});
    }
    if (term.log_power > 0) {
      out.terms_.push_back(
          {term.coef * term.log_power / scale_, term.expo - 1.0, term.log_power - 1});
    }
  }
  return out;
}

LogPowerSum LogPowerSum::antiderivative() const {
  // int c (x/s)^e t^m dx = s c int e^{(e+1) t} t^m dt
  LogPowerSum out(scale_);
  for (const auto& term : terms_) {
    const double k = term.expo + 1.0;
    const double c = term.coef * scale_;
    const int m = term.log_power;
    if (std::abs(k) < kDegenerateExponent) {
      out.terms_.push_back({c / (m + 1), 0.0, m + 1});
      continue;
    }
    double factor = c / k;
    for (int j = 0; j <= m; ++j) {
      out.terms_.push_back({factor, k, m - j});
      factor *= -static_cast<double>(m - j) / k;
    }
  }
  return out;
}

LogPowerSum LogPowerSum::rescaled(double new_scale) const {
  if (new_scale == scale_) return *this;
  // t_old = t_new + d
  const double d = std::log(new_scale / scale_);
  LogPowerSum out(new_scale);
  for (const auto& term : terms_) {
    const double base = term.coef * std::exp(term.expo * d);
    for (int j = 0; j <= term.log_power; ++j) {
      out.terms_.push_back({base * binomial(term.log_power, j) * ipow(d, term.log_power - j),
                            term.expo, j});
    }
  }
  return out;
}

LogPowerSum LogPowerSum::times_power(double k) const {
  LogPowerSum out(scale_);
  const double factor = std::pow(scale_, k);
  for (const auto& term : terms_) {
    out.terms_.push_back({term.coef * factor, term.expo + k, term.log_power});
  }
  return out;
}

LogPowerSum& LogPowerSum::operator+=(const LogPowerSum& other) {
  const LogPowerSum g = other.rescaled(scale_);
  terms_.insert(terms_.end(), g.terms_.begin(), g.terms_.end());
  return *this;
}

LogPowerSum& LogPowerSum::operator*=(double factor) {
  for (auto& term : terms_) term.coef *= factor;
  return *this;
}

LogPowerSum operator*(const LogPowerSum& f, const LogPowerSum& g) {
  const LogPowerSum h = g.rescaled(f.scale_);
  LogPowerSum out(f.scale_);
  out.terms_.reserve(f.terms_.size() * h.terms_.size());
  for (const auto& a : f.terms_) {
    for (const auto& b : h.terms_) {
      if (a.coef == 0.0 || b.coef == 0.0) continue;
      out.terms_.push_back({a.coef * b.coef, a.expo + b.expo, a.log_power + b.log_power});
    }
  }
  return out;
}

double LogPowerSum::integral(double lo, double hi) const {
  if (lo == hi) return 0.0;
  const double t0 = lo > 0.0 ? std::log(lo / scale_) : -std::numeric_limits<double>::infinity();
  const double t1 = std::isinf(hi) ? std::numeric_limits<double>::infinity()
                                   : std::log(hi / scale_);
  double sum = 0.0;
  for (const auto& term : terms_) {
    if (term.coef == 0.0) continue;
    sum += term.coef * scale_ * integrate_exp_poly(term.expo + 1.0, term.log_power, t0, t1);
  }
  return sum;
}

PiecewiseLogPower::PiecewiseLogPower(std::vector<Piece> pieces) : pieces_(std::move(pieces)) {
  if (pieces_.empty()) throw DomainError("piecewise function needs at least one piece");
  for (std::size_t i = 1; i < pieces_.size(); ++i) {
    if (pieces_[i].lo != pieces_[i - 1].hi || pieces_[i].lo > pieces_[i].hi) {
      throw DomainError("pieces must be contiguous and ordered");
    }
  }
}

const Piece& PiecewiseLogPower::piece_at(double x) const {
  if (!(x > 0.0)) throw DomainError("evaluation point must be positive");
  for (const auto& p : pieces_) {
    if (x <= p.hi) return p;
  }
  return pieces_.back();
}

double PiecewiseLogPower::operator()(double x) const { return piece_at(x).f(x); }

double PiecewiseLogPower::right_derivative(double x) const {
  if (!(x > 0.0)) throw DomainError("evaluation point must be positive");
  for (const auto& p : pieces_) {
    if (x < p.hi) return p.f.derivative()(x);
  }
  return pieces_.back().f.derivative()(x);
}

PiecewiseLogPower PiecewiseLogPower::derivative() const {
  std::vector<Piece> out;
  for (const auto& p : pieces_) out.push_back({p.lo, p.hi, p.f.derivative()});
  return PiecewiseLogPower(std::move(out));
}

PiecewiseLogPower PiecewiseLogPower::times_power(double k) const {
  std::vector<Piece> out;
  for (const auto& p : pieces_) out.push_back({p.lo, p.hi, p.f.times_power(k)});
  return PiecewiseLogPower(std::move(out));
}

PiecewiseLogPower PiecewiseLogPower::antiderivative(double anchor, double value) const {
  const std::size_t n = pieces_.size();
  std::vector<LogPowerSum> prim(n);
  for (std::size_t i = 0; i < n; ++i) prim[i] = pieces_[i].f.antiderivative();

  std::size_t home = 0;
  while (home + 1 < n && anchor > pieces_[home].hi) ++home;
  std::vector<double> shift(n, 0.0);
  shift[home] = value - prim[home](anchor);
  for (std::size_t i = home + 1; i < n; ++i) {
    const double x = pieces_[i].lo;
    shift[i] = prim[i - 1](x) + shift[i - 1] - prim[i](x);
  }
  for (std::size_t i = home; i-- > 0;) {
    const double x = pieces_[i].hi;
    shift[i] = prim[i + 1](x) + shift[i + 1] - prim[i](x);
  }
  std::vector<Piece> out;
  for (std::size_t i = 0; i < n; ++i) {
    LogPowerSum f = prim[i];
    f += LogPowerSum::constant(shift[i], f.scale());
    out.push_back({pieces_[i].lo, pieces_[i].hi, std::move(f)});
  }
  return PiecewiseLogPower(std::move(out));
}

double PiecewiseLogPower::integral(double lo, double hi) const {
  double sum = 0.0;
  for (const auto& p : pieces_) {
    const double u = std::max(lo, p.lo), v = std::min(hi, p.hi);
    if (u < v) sum += p.f.integral(u, v);
  }
  return sum;
}

double integral_of_product(const PiecewiseLogPower& f, const PiecewiseLogPower& g, double lo,
                           double hi) {
  std::set<double> cuts{lo, hi};
  for (const auto* h : {&f, &g}) {
    for (const auto& p : h->pieces()) {
      if (p.lo > lo && p.lo < hi) cuts.insert(p.lo);
      if (p.hi > lo && p.hi < hi) cuts.insert(p.hi);
    }
  }
  auto pick = [](const PiecewiseLogPower& h, double x) -> const LogPowerSum& {
    for (const auto& p : h.pieces()) {
      if (x <= p.hi) return p.f;
    }
    return h.pieces().back().f;
  };
  double sum = 0.0;
  for (auto it = cuts.begin(); std::next(it) != cuts.end(); ++it) {
    const double u = *it, v = *std::next(it);
    if (!(u < v)) continue;
    const double mid = std::isinf(v) ? 2.0 * u + 1.0 : 0.5 * (u + v);
    sum += (pick(f, mid) * pick(g, mid)).integral(u, v);
  }
  return sum;
}

}  // namespace mfe
