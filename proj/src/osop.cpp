#include "seedshift/osop.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "seedshift/error.hpp"

namespace seedshift {

namespace {

void check_domain(std::size_t I, double r) {
  if (I < 1) throw invalid_argument("instance count I must be at least 1");
  if (!(r > 0.0 && r <= 1.0)) {
    throw invalid_argument("foreground ratio r must lie in (0, 1]");
  }
}

}  // namespace

void OsopState::validate() const {
  if (!(L >= 1.0 && L <= H)) throw invalid_argument("require 1 <= L <= H");
  if (!(P > 0.0 && P < 1.0)) throw invalid_argument("P must lie in (0, 1)");
  if (N < 1) throw invalid_argument("seed count N must be at least 1");
  if (N_initial < 1) throw invalid_argument("N_initial must be at least 1");
}

OsopState OsopState::initial(std::size_t n_initial, double L, double H,
                             double P, bool has_background) {
  OsopState s;
  s.N = n_initial;
  s.N_initial = n_initial;
  s.L = L;
  s.H = H;
  s.P = P;
  s.has_background = has_background;
  s.validate();
  return s;
}

double p_success(std::size_t N, std::size_t I, double r) {
  check_domain(I, r);
  if (N == 0) return 0.0;
  const double share = r / static_cast<double>(I);
  // Probability that one given cluster receives no seed.
  const double miss =
      share >= 1.0 ? 0.0
                   : std::exp(static_cast<double>(N) * std::log1p(-share));
  if (miss >= 1.0) return 0.0;
  return std::exp(static_cast<double>(I) * std::log1p(-miss));
}

std::size_t n_min(double P, std::size_t I, double r) {
  check_domain(I, r);
  if (!(P > 0.0 && P < 1.0)) throw invalid_argument("P must lie in (0, 1)");
  const double share = r / static_cast<double>(I);
  std::size_t N = 1;
  if (share < 1.0) {
    // 1 - P^(1/I), evaluated as -expm1(ln P / I).
    const double numer = std::log(-std::expm1(std::log(P) / static_cast<double>(I)));
    const double denom = std::log1p(-share);
    N = static_cast<std::size_t>(std::max(1.0, std::ceil(numer / denom)));
  }
  // The closed form can land one off where the bound is met with equality
  // in floating point; settle against p_success itself.
  while (p_success(N, I, r) < P) ++N;
  while (N > 1 && p_success(N - 1, I, r) >= P) --N;
  return N;
}

std::optional<Observation> estimate_observation(
    std::span<const std::uint32_t> labels, bool has_background) {
  if (labels.empty()) return std::nullopt;
  std::map<std::uint32_t, std::size_t> sizes;
  for (std::uint32_t l : labels) ++sizes[l];
  if (!has_background) return Observation{sizes.size(), 1.0};

  std::size_t background = 0;
  for (const auto& [label, count] : sizes) background = std::max(background, count);
  if (sizes.size() < 2) return std::nullopt;
  const double n = static_cast<double>(labels.size());
  return Observation{sizes.size() - 1,
                     1.0 - static_cast<double>(background) / n};
}

std::size_t apply_seed_rule(std::size_t N, std::size_t N_min, double L,
                            double H, std::size_t n) {
  const double lower = L * static_cast<double>(N_min);
  const double upper = H * static_cast<double>(N_min);
  if (static_cast<double>(N) < lower) return std::max<std::size_t>(1, std::min(2 * N, n));
  if (static_cast<double>(N) > upper) return std::max(N - N_min, N_min);
  return N;
}

OsopState update_seed_count(const OsopState& state, std::size_t I, double r,
                            std::size_t n) {
  if (I < 1 || !(r > 0.0 && r <= 1.0) || n < 1) return state;
  OsopState next = state;
  next.I = I;
  next.r = r;
  next.N_min = n_min(state.P, I, r);
  next.N = apply_seed_rule(state.N, next.N_min, state.L, state.H, n);
  return next;
}

std::vector<CurvePoint> probability_curve(std::size_t I, double r,
                                          std::span<const std::size_t> N_values) {
  check_domain(I, r);
  std::vector<CurvePoint> out;
  out.reserve(N_values.size());
  for (std::size_t N : N_values) out.push_back({N, p_success(N, I, r)});
  return out;
}

}  // namespace seedshift
