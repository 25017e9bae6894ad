#pragma once

#include <cstdint>
#include <vector>

#include "lexvec/cooc.hpp"

namespace lexvec {

// PPMI with context distribution smoothing, evaluated lazily from marginals:
//
//   PPMI(w,c) = max(0, log( (M(w,c)/M(*,*)) /
//                           ((M(w,*)/M(*,*)) * (M(*,c)^a / sum_c' M(*,c')^a)) ))
//
// Only the context marginal is smoothed. With a = 1 this is plain PPMI and is
// evaluated in exact integer arithmetic up to the final logarithm.
class Ppmi {
 public:
  Ppmi(const Marginals& marginals, double cds_alpha = 0.75);

  double cds_alpha() const noexcept { return alpha_; }
  const Marginals& marginals() const noexcept { return marginals_; }
  double smoothed_total() const noexcept { return smoothed_total_; }
  double smoothed_context(ContextId c) const { return smoothed_context_.at(raw(c)); }

  // Value for a pair with corpus count pair_count. Returns 0 when
  // pair_count == 0. Throws IntegrityError if the count cannot come from the
  // marginals this object was built with.
  double value(WordId w, ContextId c, std::uint64_t pair_count) const;

 private:
  Marginals marginals_;
  double alpha_;
  std::vector<double> smoothed_context_;
  double smoothed_total_ = 0.0;
};

double ppmi_value(const CoocStats& stats, const Ppmi& ppmi, WordId w, ContextId c);

}  // namespace lexvec
