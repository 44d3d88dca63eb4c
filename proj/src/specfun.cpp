#include "starbdi/specfun.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <limits>

namespace starbdi::specfun {

namespace {

bool nonpositive_integer(double v) {
  return v <= 0.0 && v == std::floor(v) && v > -9.0e15;
}

}  // namespace

double pochhammer(double d, unsigned n) {
  double p = 1.0;
  for (unsigned i = 0; i < n; ++i) p *= d + static_cast<double>(i);
  return p;
}

double hyp2f1(double a, double b, double c, double z, const SeriesControl& ctl) {
  ctl.validate();

  // Termination order: smallest m with a = -m or b = -m.
  long m = -1;
  if (nonpositive_integer(a)) m = static_cast<long>(-a);
  if (nonpositive_integer(b)) {
    long mb = static_cast<long>(-b);
    if (m < 0 || mb < m) m = mb;
  }

  if (m >= 0) {
    if (nonpositive_integer(c) && static_cast<long>(-c) < m)
      throw DomainError("hyp2f1: c is a nonpositive integer reached before the series terminates");
    double term = 1.0;
    CompensatedSum<double> sum;
    sum.add(1.0);
    for (long i = 0; i < m; ++i) {
      term *= (a + i) * (b + i) / ((c + i) * (i + 1)) * z;
      sum.add(term);
    }
    return sum.value();
  }

  if (nonpositive_integer(c))
    throw DomainError("hyp2f1: c is a nonpositive integer and the series does not terminate");
  if (!(std::abs(z) < 1.0))
    throw DomainError("hyp2f1: |z| >= 1 for a nonterminating series");
  if (z == 0.0) return 1.0;

  double term = 1.0;
  CompensatedSum<double> sum;
  sum.add(1.0);
  StopRule stop(ctl);
  for (int i = 0; i < ctl.max_terms; ++i) {
    term *= (a + i) * (b + i) / ((c + i) * (i + 1)) * z;
    sum.add(term);
    stop.update(std::abs(term), std::abs(sum.value()));
    if (stop.done()) return sum.value();
  }
  throw NonConvergence("hyp2f1: max_terms reached before the stopping rule");
}

double polylog(int k, double z, const SeriesControl& ctl) {
  if (k < 1) throw DomainError("polylog: integer order k >= 1 required");
  if (k == 1) {
    if (!(z < 1.0)) throw DomainError("polylog: z < 1 required for k = 1");
    return -std::log1p(-z);
  }
  if (!(std::abs(z) < 1.0)) throw DomainError("polylog: |z| < 1 required");
  return detail::polylog_series(k, z, ctl);
}

Polynomial eulerian_polynomial(unsigned n) {
  // Eulerian-number triangle T(m,j) = (j+1) T(m-1,j) + (m-j) T(m-1,j-1).
  std::vector<BigInt> row{1};  // A_0 = 1
  for (unsigned m = 1; m <= n; ++m) {
    std::vector<BigInt> next(m, 0);
    for (unsigned j = 0; j < m; ++j) {
      BigInt v = 0;
      if (j < row.size()) v += BigInt(j + 1) * row[j];
      if (j >= 1 && j - 1 < row.size()) v += BigInt(m - j) * row[j - 1];
      next[j] = v;
    }
    row = std::move(next);
  }
  return Polynomial(std::move(row));
}

double gen_exp_integral(double nu, double z) {
  if (!(z > 0.0)) throw DomainError("gen_exp_integral: z > 0 required");
  // u = 1/t maps the integral to int_0^1 e^{-z/u} u^{nu-2} du; the
  // exponential kills the u -> 0 endpoint before any power can blow up.
  auto f = [nu, z](double u) {
    double w = z / u;
    if (w > 700.0) return 0.0;
    return std::exp(-w) * std::pow(u, nu - 2.0);
  };
  double err = 0.0;
  double v = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
      f, 0.0, 1.0, 12, 1e-13, &err);
  return v;
}

namespace detail {

double polylog_series(int k, double z, const SeriesControl& ctl) {
  ctl.validate();
  if (z == 0.0) return 0.0;
  CompensatedSum<double> sum;
  StopRule stop(ctl);
  double zj = 1.0;
  for (int j = 1; j <= ctl.max_terms; ++j) {
    zj *= z;
    double term = zj / std::pow(static_cast<double>(j), k);
    sum.add(term);
    stop.update(std::abs(term), std::abs(sum.value()));
    if (stop.done()) return sum.value();
  }
  throw NonConvergence("polylog: max_terms reached before the stopping rule");
}

std::vector<long double> eulerian_scaled_values(unsigned n_max, long double x) {
  std::vector<long double> out(n_max + 1);
  out[0] = 1.0L;
  // a(m,j) = T(m,j)/m!; entries stay in (0,1], so the forward
  // recurrence is stable.
  std::vector<long double> row{1.0L};  // a(0,0)
  for (unsigned m = 1; m <= n_max; ++m) {
    std::vector<long double> next(m, 0.0L);
    for (unsigned j = 0; j < m; ++j) {
      long double v = 0.0L;
      if (j < row.size()) v += static_cast<long double>(j + 1) * row[j];
      if (j >= 1 && j - 1 < row.size())
        v += static_cast<long double>(m - j) * row[j - 1];
      next[j] = v / static_cast<long double>(m);
    }
    row = std::move(next);
    long double acc = 0.0L;
    for (unsigned j = row.size(); j-- > 0;) acc = acc * x + row[j];
    out[m] = acc;
  }
  return out;
}

long double eulerian_value_scaled_exact(unsigned n, const BigRat& x) {
  Polynomial a = eulerian_polynomial(n);
  BigRat v = a.eval(x);
  BigInt fact = 1;
  for (unsigned i = 2; i <= n; ++i) fact *= i;
  BigInt num = boost::multiprecision::numerator(v);
  BigInt den = boost::multiprecision::denominator(v) * fact;
  return big_ratio(num, den);
}

long double big_ratio(const BigInt& num, const BigInt& den) {
  if (num == 0) return 0.0L;
  if (den == 0) return std::numeric_limits<long double>::quiet_NaN();
  BigInt a = boost::multiprecision::abs(num);
  BigInt b = boost::multiprecision::abs(den);
  long double sign = ((num < 0) != (den < 0)) ? -1.0L : 1.0L;
  long sa = static_cast<long>(boost::multiprecision::msb(a));
  long sb = static_cast<long>(boost::multiprecision::msb(b));
  // Keep the top 64 bits of each operand and track the shifts.
  long ea = sa > 63 ? sa - 63 : 0;
  long eb = sb > 63 ? sb - 63 : 0;
  if (ea > 0) a >>= ea;
  if (eb > 0) b >>= eb;
  long double r = static_cast<long double>(a.convert_to<std::uint64_t>()) /
                  static_cast<long double>(b.convert_to<std::uint64_t>());
  return sign * std::ldexp(r, static_cast<int>(ea - eb));
}

}  // namespace detail

}  // namespace starbdi::specfun
