#include "starbdi/combinatorics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <string>

#include "starbdi/specfun.hpp"

namespace starbdi::combinatorics {

BigInt factorial(unsigned n) {
  BigInt f = 1;
  for (unsigned i = 2; i <= n; ++i) f *= i;
  return f;
}

BigInt binomial(unsigned n, unsigned k) {
  if (k > n) return 0;
  if (k > n - k) k = n - k;
  BigInt b = 1;
  for (unsigned i = 0; i < k; ++i) {
    b *= n - i;
    b /= i + 1;
  }
  return b;
}

PermutationComponentTable::PermutationComponentTable(unsigned n_max) : n_max_(n_max) {
  if (n_max < 1) throw DomainError("PermutationComponentTable: n_max >= 1 required");
  rows_.resize(n_max);
  std::vector<BigInt> fact(n_max + 1);
  fact[0] = 1;
  for (unsigned i = 1; i <= n_max; ++i) fact[i] = fact[i - 1] * i;

  for (unsigned n = 1; n <= n_max; ++n) {
    auto& row = rows_[n - 1];
    row.resize(n);
    // t_{n,1} = n! - sum_{j=1}^{n-1} (n-j)! t_{j,1}
    BigInt t1 = fact[n];
    for (unsigned j = 1; j < n; ++j) t1 -= fact[n - j] * rows_[j - 1][0];
    row[0] = t1;
    // t_{n,k} = sum_{j=1}^{n-k+1} t_{j,1} t_{n-j,k-1}
    for (unsigned k = 2; k <= n; ++k) {
      BigInt s = 0;
      for (unsigned j = 1; j <= n - k + 1; ++j)
        s += rows_[j - 1][0] * rows_[n - j - 1][k - 2];
      row[k - 1] = s;
    }
  }
}

const BigInt& PermutationComponentTable::at(unsigned n, unsigned k) const {
  static const BigInt zero{0};
  if (n < 1 || n > n_max_ || k < 1)
    throw DomainError("PermutationComponentTable: index out of range");
  if (k > n) return zero;
  return rows_[n - 1][k - 1];
}

BigInt PermutationComponentTable::row_sum(unsigned n) const {
  if (n < 1 || n > n_max_) throw DomainError("PermutationComponentTable: n out of range");
  BigInt s = 0;
  for (const auto& v : rows_[n - 1]) s += v;
  return s;
}

BigInt PermutationComponentTable::weighted_row_sum(unsigned n, unsigned d) const {
  if (n < 1 || n > n_max_) throw DomainError("PermutationComponentTable: n out of range");
  BigInt s = 0;
  BigInt dk = 1;
  for (unsigned k = 1; k <= n; ++k) {
    dk *= d;
    s += rows_[n - 1][k - 1] * dk;
  }
  return s;
}

PermutationComponentTable t_table_recursive(unsigned n_max) {
  return PermutationComponentTable(n_max);
}

namespace {

// sum over compositions (s_1,...,s_j), s_i >= 2, s_1+...+s_j = m, of
// 1 / multinomial(m; s_1,...,s_j), as an exact rational.
BigRat inverse_multinomial_sum(unsigned j, unsigned m) {
  if (m < 2 * j) return BigRat(0);
  BigInt m_fact = factorial(m);
  BigRat total = 0;
  std::vector<unsigned> parts(j);
  std::function<void(unsigned, unsigned, BigInt)> rec =
      [&](unsigned idx, unsigned rem, BigInt prod) {
        if (idx == j - 1) {
          // last part is forced
          if (rem >= 2) total += BigRat(prod * factorial(rem), m_fact);
          return;
        }
        unsigned max_part = rem - 2 * (j - 1 - idx);
        for (unsigned s = 2; s <= max_part; ++s)
          rec(idx + 1, rem - s, prod * factorial(s));
      };
  rec(0, m, BigInt(1));
  return total;
}

}  // namespace

BigInt t_closed_form(unsigned n, unsigned k) {
  if (n < 2) throw DomainError("t_closed_form: n >= 2 required (n = 1 is covered by the recursion)");
  if (k < 1 || k > n) throw DomainError("t_closed_form: k in [1, n] required");
  if (k == n) return 1;

  BigRat acc = 0;
  auto neg_pow = [](unsigned e) { return (e % 2 == 0) ? 1 : -1; };

  if (k == 1) {
    acc += BigRat(factorial(n));
    acc += BigRat(neg_pow(n - 1));
    for (unsigned kk = 1; kk <= n - 2; ++kk) {
      BigRat inner = 0;
      for (unsigned j = 1; j <= n - kk - 1; ++j) {
        unsigned m = n - kk - 1 + j;
        inner += BigRat(binomial(kk + 1, j) * factorial(m)) * inverse_multinomial_sum(j, m);
      }
      acc += BigRat(neg_pow(kk)) * inner;
    }
  } else {
    acc += BigRat(binomial(n - 1, k - 1) * neg_pow(n - k));
    for (unsigned r = k - 1; r <= n - 2; ++r) {
      BigRat inner = 0;
      for (unsigned j = 1; j <= n - r - 1; ++j) {
        unsigned m = n - r - 1 + j;
        inner += BigRat(binomial(r + 1, j) * factorial(m)) * inverse_multinomial_sum(j, m);
      }
      acc += BigRat(binomial(r, k - 1)) * BigRat(neg_pow(r - k + 1)) * inner;
    }
  }

  if (boost::multiprecision::denominator(acc) != 1)
    throw IntegralityError("t_closed_form: non-integral result at n=" + std::to_string(n) +
                           ", k=" + std::to_string(k));
  return boost::multiprecision::numerator(acc);
}

BigInt t_bruteforce(unsigned n, unsigned k) {
  if (n < 1 || n > 9) throw DomainError("t_bruteforce: n in [1, 9] required");
  std::vector<unsigned> perm(n);
  std::iota(perm.begin(), perm.end(), 1u);
  long long count = 0;
  do {
    // component boundary wherever the prefix {1..j} occupies the first
    // j positions, i.e. the running maximum equals the position
    unsigned components = 0;
    unsigned prefix_max = 0;
    for (unsigned j = 0; j < n; ++j) {
      prefix_max = std::max(prefix_max, perm[j]);
      if (prefix_max == j + 1) ++components;
    }
    if (components == k) ++count;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return BigInt(count);
}

namespace {

// A_s(ratio)/s! for s = 0..m_max; exact rational evaluation while the
// coefficient sizes allow it, factorially scaled triangle beyond.
std::vector<long double> scaled_eulerian_at(const BigRat& ratio, unsigned m_max) {
  constexpr unsigned kExactLimit = 64;
  std::vector<long double> a =
      specfun::detail::eulerian_scaled_values(m_max, specfun::detail::big_ratio(
          boost::multiprecision::numerator(ratio), boost::multiprecision::denominator(ratio)));
  for (unsigned s = 0; s <= std::min(m_max, kExactLimit); ++s)
    a[s] = specfun::detail::eulerian_value_scaled_exact(s, ratio);
  return a;
}

QTable build_q_table(const BigRat& ratio, double ratio_d, unsigned j_max, unsigned m_max) {
  if (j_max < 1) throw DomainError("q_table: j_max >= 1 required");
  if (m_max < 2) throw DomainError("q_table: m_max >= 2 required");
  if (!(ratio_d > 0.0)) throw DomainError("q_table: ratio > 0 required");

  std::vector<long double> a_scaled = scaled_eulerian_at(ratio, m_max);
  std::vector<long double> fact(m_max + 1);
  fact[0] = 1.0L;
  for (unsigned i = 1; i <= m_max; ++i) fact[i] = fact[i - 1] * i;

  // B_s = A_s(ratio), s >= 2
  std::vector<long double> B(m_max + 1, 0.0L);
  for (unsigned s = 2; s <= m_max; ++s) B[s] = a_scaled[s] * fact[s];

  QTable qt;
  qt.ratio = ratio_d;
  qt.j_max = j_max;
  qt.m_max = m_max;
  qt.q.assign(j_max, std::vector<long double>(m_max + 1, 0.0L));
  for (unsigned m = 2; m <= m_max; ++m) qt.q[0][m] = B[m];
  for (unsigned j = 2; j <= j_max; ++j) {
    for (unsigned m = 2 * j; m <= m_max; ++m) {
      long double s = 0.0L;
      for (unsigned p = 2; p + 2 * (j - 1) <= m; ++p) s += B[p] * qt.q[j - 2][m - p];
      qt.q[j - 1][m] = s;
    }
  }
  return qt;
}

}  // namespace

QTable q_table(const BigRat& ratio, unsigned j_max, unsigned m_max) {
  return build_q_table(ratio, static_cast<double>(ratio), j_max, m_max);
}

QTable q_table(double ratio, unsigned j_max, unsigned m_max) {
  return build_q_table(BigRat(ratio), ratio, j_max, m_max);
}

ThetaCoefficients theta_coefficients(const ModelParams& params, unsigned n_max) {
  params.validate();
  if (params.lambda == params.mu)
    throw DomainError("theta_coefficients: lambda != mu required (equal rates use the t_{n,k} route)");
  if (n_max < 2) throw DomainError("theta_coefficients: n_max >= 2 required");

  BigRat ratio = BigRat(params.mu) / BigRat(params.lambda);
  unsigned m_max = std::max(2 * n_max - 4, n_max);
  std::vector<long double> a_scaled = scaled_eulerian_at(ratio, m_max);

  std::vector<long double> fact(m_max + 1);
  fact[0] = 1.0L;
  for (unsigned i = 1; i <= m_max; ++i) fact[i] = fact[i - 1] * i;

  QTable qt;
  if (n_max >= 3 && params.d > 1)
    qt = build_q_table(ratio, static_cast<double>(ratio), n_max - 2,
                       std::max(2 * n_max - 4, 2u));

  ThetaCoefficients th;
  th.params = params;
  th.n_max = n_max;
  th.theta.assign(n_max + 1, 0.0L);
  th.qsum.assign(n_max + 1, 0.0L);
  th.a_value.assign(n_max + 1, 0.0L);
  th.theta_over_fact.assign(n_max + 1, 0.0L);
  th.qsum_over_fact.assign(n_max + 1, 0.0L);

  long double dm1 = static_cast<long double>(params.d - 1);
  for (unsigned n = 2; n <= n_max; ++n) {
    long double a_n = a_scaled[n] * fact[n];
    long double qs = 0.0L;
    if (params.d > 1) {
      long double dpow = 1.0L;
      for (unsigned i = 1; i + 2 <= n; ++i) {
        dpow *= dm1;
        long double inner = 0.0L;
        for (unsigned j = 1; j <= n - i - 1 && j <= i + 1; ++j) {
          unsigned m = j + n - i - 1;
          long double bin = specfun::detail::big_ratio(binomial(i + 1, j), BigInt(1));
          inner += bin * qt.at(j, m);
        }
        qs += dpow * inner;
      }
    }
    long double dpow_top = 1.0L;
    for (unsigned i = 1; i + 1 <= n; ++i) dpow_top *= dm1;  // (d-1)^{n-1}
    th.a_value[n] = a_n;
    th.qsum[n] = qs;
    th.theta[n] = qs + a_n + dpow_top;
    th.theta_over_fact[n] = th.theta[n] / fact[n];
    th.qsum_over_fact[n] = qs / fact[n];
  }
  return th;
}

}  // namespace starbdi::combinatorics
