#include "lexvec/ppmi.hpp"

#include <cmath>

#include "lexvec/error.hpp"

namespace lexvec {

Ppmi::Ppmi(const Marginals& marginals, double cds_alpha)
    : marginals_(marginals), alpha_(cds_alpha) {
  if (!(cds_alpha > 0.0 && cds_alpha <= 1.0)) throw ConfigError("cds exponent must be in (0, 1]");
  smoothed_context_.resize(marginals.context.size());
  for (std::size_t i = 0; i < smoothed_context_.size(); ++i) {
    const auto n = static_cast<double>(marginals.context[i]);
    smoothed_context_[i] = alpha_ == 1.0 ? n : std::pow(n, alpha_);
    smoothed_total_ += smoothed_context_[i];
  }
}

double Ppmi::value(WordId w, ContextId c, std::uint64_t pair_count) const {
  if (pair_count == 0) return 0.0;
  const auto& m = marginals_;
  if (w >= m.word.size() || raw(c) >= m.context.size()) {
    throw IntegrityError("pair outside the marginal tables");
  }
  const std::uint64_t row = m.word[w];
  const std::uint64_t col = m.context[raw(c)];
  if (pair_count > row || pair_count > col || row > m.total) {
    throw IntegrityError("pair count exceeds its marginals");
  }

  if (alpha_ == 1.0) {
    using u128 = unsigned __int128;
    const u128 num = static_cast<u128>(pair_count) * m.total;
    const u128 den = static_cast<u128>(row) * col;
    if (num <= den) return 0.0;
    // log(num/den) = log1p((num-den)/den); the difference is exact.
    return std::log1p(static_cast<double>(num - den) / static_cast<double>(den));
  }

  const double num = static_cast<double>(pair_count) * smoothed_total_;
  const double den = static_cast<double>(row) * smoothed_context_[raw(c)];
  if (num <= den) return 0.0;
  return std::log1p((num - den) / den);
}

double ppmi_value(const CoocStats& stats, const Ppmi& ppmi, WordId w, ContextId c) {
  return ppmi.value(w, c, stats.count(w, c));
}

}  // namespace lexvec
