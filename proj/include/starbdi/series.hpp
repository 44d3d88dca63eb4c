#ifndef STARBDI_SERIES_HPP
#define STARBDI_SERIES_HPP

#include <cmath>
#include <cstddef>

#include "starbdi/errors.hpp"

namespace starbdi {

// Uniform truncation policy for the infinite series in this library.
// A series stops once `consecutive_small` successive terms satisfy
// |term| < rel_tol * |partial sum|.  Several of the series here are
// alternating or mixed-sign, so a single small term is not a safe stop
// signal.
struct SeriesControl {
  double rel_tol = 1e-12;
  int max_terms = 2000;
  int consecutive_small = 3;

  void validate() const {
    if (!(rel_tol > 0.0)) throw DomainError("SeriesControl: rel_tol must be > 0");
    if (max_terms < 1) throw DomainError("SeriesControl: max_terms must be >= 1");
    if (consecutive_small < 1)
      throw DomainError("SeriesControl: consecutive_small must be >= 1");
  }
};

// Neumaier-compensated accumulator.  The equal-rates series of Prop-3.1
// type alternate with partially cancelling terms, so plain summation
// loses digits.
template <typename T = double>
class CompensatedSum {
 public:
  void add(T x) {
    T t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  T value() const { return sum_ + comp_; }

 private:
  T sum_ = 0;
  T comp_ = 0;
};

// Helper implementing the SeriesControl stopping rule.  Feed |term| and
// the current |sum|; done() turns true after `consecutive_small` hits.
class StopRule {
 public:
  explicit StopRule(const SeriesControl& ctl) : ctl_(ctl) { ctl_.validate(); }

  void update(double abs_term, double abs_sum) {
    if (abs_term < ctl_.rel_tol * std::abs(abs_sum))
      ++small_;
    else
      small_ = 0;
  }
  bool done() const { return small_ >= ctl_.consecutive_small; }

 private:
  SeriesControl ctl_;
  int small_ = 0;
};

}  // namespace starbdi

#endif
