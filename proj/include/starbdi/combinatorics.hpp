#ifndef STARBDI_COMBINATORICS_HPP
#define STARBDI_COMBINATORICS_HPP

#include <vector>

#include "starbdi/model.hpp"
#include "starbdi/polynomial.hpp"

namespace starbdi::combinatorics {

// Exact triangular table of t_{n,k}, the number of permutations of
// {1,...,n} with exactly k components.  t_{n,k} ~ n! overflows 64-bit
// integers at n = 21, so entries are big integers.
class PermutationComponentTable {
 public:
  static constexpr unsigned kDefaultNMax = 30;

  explicit PermutationComponentTable(unsigned n_max);

  unsigned n_max() const { return n_max_; }

  // t_{n,k}; zero for k > n.
  const BigInt& at(unsigned n, unsigned k) const;

  BigInt row_sum(unsigned n) const;

  // sum_k t_{n,k} d^k, the coefficient block of the equal-rates series.
  BigInt weighted_row_sum(unsigned n, unsigned d) const;

 private:
  unsigned n_max_;
  std::vector<std::vector<BigInt>> rows_;  // rows_[n-1][k-1]
};

// Recursive construction (the implicit recursion for t_{n,k}).
PermutationComponentTable t_table_recursive(unsigned n_max);

// Closed form in terms of inverse multinomial coefficients, evaluated
// with exact rationals; throws IntegralityError if the result is not an
// integer (which would signal an implementation bug).  Requires n >= 2.
BigInt t_closed_form(unsigned n, unsigned k);

// Enumeration oracle: counts components of all n! permutations
// directly from the indecomposability definition.  n <= 9.
BigInt t_bruteforce(unsigned n, unsigned k);

// Q_{j,m}: sum over compositions of m into j parts >= 2 of products of
// Eulerian polynomial values A_s(ratio).  Entries grow like m! times a
// geometric factor and are held in extended precision.
struct QTable {
  double ratio = 1.0;
  unsigned j_max = 0;
  unsigned m_max = 0;
  std::vector<std::vector<long double>> q;  // q[j-1][m], m = 0..m_max

  long double at(unsigned j, unsigned m) const {
    if (j < 1 || j > j_max || m > m_max) throw DomainError("QTable: index out of range");
    return q[j - 1][m];
  }
};

QTable q_table(double ratio, unsigned j_max, unsigned m_max);
QTable q_table(const BigRat& ratio, unsigned j_max, unsigned m_max);

// theta_n series coefficients combining Q-sums, Eulerian values and
// powers of (d-1); defined for 2 <= n <= n_max.  The raw values and the
// /n! scalings are kept side by side: the transient series only ever
// consumes theta_n/n!, and the unscaled values overflow double near
// n ~ 170.
struct ThetaCoefficients {
  ModelParams params;
  unsigned n_max = 0;
  std::vector<long double> theta;           // [n], n = 2..n_max
  std::vector<long double> qsum;            // inner (d-1)^i double sum alone
  std::vector<long double> a_value;         // A_n(mu/lambda)
  std::vector<long double> theta_over_fact; // theta_n / n!
  std::vector<long double> qsum_over_fact;  // qsum_n / n!

  long double theta_at(unsigned n) const {
    if (n < 2 || n > n_max) throw DomainError("ThetaCoefficients: n out of range");
    return theta[n];
  }
};

// Requires lambda != mu (the Eulerian ratio must be well defined; the
// equal-rates regime uses the t_{n,k} route instead).
ThetaCoefficients theta_coefficients(const ModelParams& params, unsigned n_max);

// n! and binomial helpers shared by the closed forms.
BigInt factorial(unsigned n);
BigInt binomial(unsigned n, unsigned k);

}  // namespace starbdi::combinatorics

#endif
