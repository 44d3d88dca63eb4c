#ifndef STARBDI_POLYNOMIAL_HPP
#define STARBDI_POLYNOMIAL_HPP

#include <boost/multiprecision/cpp_int.hpp>

#include <cstddef>
#include <vector>

namespace starbdi {

using BigInt = boost::multiprecision::cpp_int;
using BigRat = boost::multiprecision::cpp_rational;

// Dense integer-coefficient polynomial, lowest degree first.  Exact
// coefficients: the Eulerian polynomials stored here grow factorially
// and are evaluated at rational arguments, so floating coefficients
// would lose the cancellation structure of the series they feed.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<BigInt> coeffs) : c_(std::move(coeffs)) {
    normalize();
  }

  const std::vector<BigInt>& coefficients() const { return c_; }
  bool is_zero() const { return c_.empty(); }
  std::size_t degree() const { return c_.empty() ? 0 : c_.size() - 1; }

  const BigInt& coeff(std::size_t i) const {
    static const BigInt zero{0};
    return i < c_.size() ? c_[i] : zero;
  }

  // Exact Horner evaluation at a rational point.
  BigRat eval(const BigRat& x) const {
    BigRat v = 0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) v = v * x + BigRat(*it);
    return v;
  }

  BigInt eval_int(const BigInt& x) const {
    BigInt v = 0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) v = v * x + *it;
    return v;
  }

  // Sum of coefficients, i.e. value at 1.
  BigInt coeff_sum() const {
    BigInt s = 0;
    for (const auto& a : c_) s += a;
    return s;
  }

 private:
  void normalize() {
    while (!c_.empty() && c_.back() == 0) c_.pop_back();
  }
  std::vector<BigInt> c_;
};

}  // namespace starbdi

#endif
