#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "gmd/core_model.hpp"
#include "gmd/special_functions.hpp"

namespace gmd {

inline constexpr const char* kPrngName = "philox4x32-10";
inline constexpr const char* kNormalMethod = "inverse-cdf (Acklam rational, unrefined)";
inline constexpr const char* kChiSquareMethod = "marsaglia-tsang gamma";

/// Philox4x32-10 counter-based generator. Stream `stream` of key `seed`
/// occupies the upper 64 counter bits, so every (seed, stream) pair is an
/// independent, reproducible sequence.
class Philox4x32 {
public:
  Philox4x32(std::uint64_t seed, std::uint64_t stream)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        stream_(stream) {}

  std::uint64_t next_u64() {
    if (used_ >= 2) refill();
    const std::uint64_t hi = buffer_[2 * used_ + 1];
    const std::uint64_t lo = buffer_[2 * used_];
    ++used_;
    return (hi << 32) | lo;
  }

  /// Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

  static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> ctr,
                                            std::array<std::uint32_t, 2> key) {
    constexpr std::uint32_t m0 = 0xD2511F53u;
    constexpr std::uint32_t m1 = 0xCD9E8D57u;
    constexpr std::uint32_t w0 = 0x9E3779B9u;
    constexpr std::uint32_t w1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
      const std::uint64_t p0 = static_cast<std::uint64_t>(m0) * ctr[0];
      const std::uint64_t p1 = static_cast<std::uint64_t>(m1) * ctr[2];
      ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
             static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
      key[0] += w0;
      key[1] += w1;
    }
    return ctr;
  }

private:
  void refill() {
    buffer_ = block({static_cast<std::uint32_t>(counter_), static_cast<std::uint32_t>(counter_ >> 32),
                     static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)},
                    key_);
    ++counter_;
    used_ = 0;
  }

  std::array<std::uint32_t, 2> key_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int used_ = 2;
};

namespace detail {

inline double standard_normal(Philox4x32& rng) { return normal_quantile_rational(rng.uniform()); }

inline double standard_gamma(Philox4x32& rng, double shape) {
  if (shape < 1.0) {
    const double g = standard_gamma(rng, shape + 1.0);
    return g * std::pow(rng.uniform(), 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    const double x = standard_normal(rng);
    double v = 1.0 + c * x;
    if (v <= 0.0) continue;
    v = v * v * v;
    const double u = rng.uniform();
    if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) return d * v;
  }
}

}  // namespace detail

struct MonteCarloConfig {
  std::uint64_t draws = 1'000'000;
  std::uint64_t seed = 20240101;
  unsigned chunks = 16;
  /// 0 = use GMD_THREADS or the hardware concurrency.
  unsigned threads = 0;

  void validate() const {
    if (draws < 1000) throw DomainError("Monte Carlo draws must be at least 1000");
    if (chunks < 1) throw DomainError("Monte Carlo chunks must be at least 1");
    if (chunks > draws) throw DomainError("Monte Carlo chunks cannot exceed draws");
  }

  std::uint64_t chunk_begin(unsigned c) const { return draws * c / chunks; }
};

/// Worker count: explicit setting, else GMD_THREADS, else hardware
/// concurrency; never more than `work_items`.
inline unsigned worker_count(unsigned requested, unsigned work_items) {
  unsigned n = requested;
  if (n == 0) {
    if (const char* env = std::getenv("GMD_THREADS")) n = static_cast<unsigned>(std::strtoul(env, nullptr, 10));
  }
  if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
  return std::max(1u, std::min(n, work_items));
}

namespace detail {

template <class Body>
void parallel_chunks(unsigned chunks, unsigned threads, Body body) {
  const unsigned workers = worker_count(threads, chunks);
  if (workers == 1) {
    for (unsigned c = 0; c < chunks; ++c) body(c);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (unsigned c = w; c < chunks; c += workers) body(c);
    });
  }
  for (auto& t : pool) t.join();
}

// Draws one vector X = mu + L Z (normal) or mu + L Z / sqrt(W / nu) (t) into `out`.
class VectorSampler {
public:
  explicit VectorSampler(const ValidatedSpec& spec)
      : spec_(spec), n_(spec.dimension()), z_(n_) {}

  void draw(Philox4x32& rng, std::span<double> out) {
    for (auto& z : z_) z = standard_normal(rng);
    double scale = 1.0;
    if (spec_.family().is_student()) {
      const double nu = spec_.family().nu;
      const double w = 2.0 * standard_gamma(rng, 0.5 * nu);
      scale = 1.0 / std::sqrt(w / nu);
    }
    const Matrix& l = spec_.cholesky();
    for (std::size_t r = 0; r < n_; ++r) {
      double acc = 0.0;
      for (std::size_t k = 0; k <= r; ++k) acc += l(r, k) * z_[k];
      out[r] = spec_.mu()[r] + scale * acc;
    }
  }

private:
  const ValidatedSpec& spec_;
  std::size_t n_;
  std::vector<double> z_;
};

inline Matrix sample(const ValidatedSpec& spec, const MonteCarloConfig& cfg) {
  cfg.validate();
  const std::size_t n = spec.dimension();
  Matrix out(cfg.draws, n);
  parallel_chunks(cfg.chunks, cfg.threads, [&](unsigned c) {
    Philox4x32 rng(cfg.seed, c);
    VectorSampler sampler(spec);
    std::vector<double> row(n);
    for (std::uint64_t d = cfg.chunk_begin(c); d < cfg.chunk_begin(c + 1); ++d) {
      sampler.draw(rng, row);
      for (std::size_t k = 0; k < n; ++k) out(d, k) = row[k];
    }
  });
  return out;
}

}  // namespace detail

/// draws x n matrix of multivariate normal vectors.
inline Matrix sample_mvn(const ValidatedSpec& spec, const MonteCarloConfig& cfg) {
  if (!spec.family().is_normal()) throw DomainError("sample_mvn: spec is not of the normal family");
  return detail::sample(spec, cfg);
}

/// draws x n matrix of multivariate Student-t vectors.
inline Matrix sample_mvt(const ValidatedSpec& spec, const MonteCarloConfig& cfg) {
  if (!spec.family().is_student()) throw DomainError("sample_mvt: spec is not of the Student-t family");
  return detail::sample(spec, cfg);
}

inline Matrix sample_spec(const ValidatedSpec& spec, const MonteCarloConfig& cfg) {
  return detail::sample(spec, cfg);
}

struct GmdEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::uint64_t draws = 0;
  std::vector<PairContribution> pair_means;
};

namespace detail {

// Running sums for the per-draw statistic s_d = avg_{i<j} |x_i - x_j|.
struct PairAccumulator {
  std::uint64_t count = 0;
  double mean = 0.0;
  double m2 = 0.0;
  std::vector<double> pair_sums;

  explicit PairAccumulator(std::size_t pairs = 0) : pair_sums(pairs, 0.0) {}

  void add(std::span<const double> x) {
    const std::size_t n = x.size();
    double s = 0.0;
    std::size_t k = 0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j, ++k) {
        const double a = std::fabs(x[i] - x[j]);
        pair_sums[k] += a;
        s += a;
      }
    }
    s /= static_cast<double>(pair_sums.size());
    ++count;
    const double delta = s - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta * (s - mean);
  }

  // Chan et al. pairwise combination.
  void merge(const PairAccumulator& o) {
    if (o.count == 0) return;
    const double na = static_cast<double>(count);
    const double nb = static_cast<double>(o.count);
    const double delta = o.mean - mean;
    const double total = na + nb;
    mean += delta * nb / total;
    m2 += o.m2 + delta * delta * na * nb / total;
    count += o.count;
    for (std::size_t k = 0; k < pair_sums.size(); ++k) pair_sums[k] += o.pair_sums[k];
  }

  GmdEstimate finish(std::size_t n) const {
    GmdEstimate e;
    e.draws = count;
    e.value = mean;
    const double var = count > 1 ? m2 / static_cast<double>(count - 1) : 0.0;
    e.std_error = std::sqrt(var / static_cast<double>(count));
    std::size_t k = 0;
    for_each_pair(n, [&](std::size_t i, std::size_t j) {
      e.pair_means.push_back({i, j, pair_sums[k++] / static_cast<double>(count)});
    });
    return e;
  }
};

}  // namespace detail

/// Sample-mean estimate of GMD_n from a draws x n matrix. The standard error
/// comes from the per-draw pair average, so pairs are not treated as
/// independent. Rows are accumulated in `chunks` blocks merged in order, the
/// same grouping estimate_gmd uses, so a dumped sample reproduces its estimate
/// bit for bit.
inline GmdEstimate empirical_gmd(const Matrix& samples, unsigned chunks = 1) {
  const std::size_t n = samples.cols();
  const std::size_t m = samples.rows();
  if (n < 2) throw DomainError("empirical_gmd: need at least 2 columns");
  if (m < 2) throw DomainError("empirical_gmd: need at least 2 draws");
  if (chunks < 1 || chunks > m) throw DomainError("empirical_gmd: chunks must lie in 1..draws");
  const auto pairs = static_cast<std::size_t>(binomial2(n));
  detail::PairAccumulator total(pairs);
  std::vector<double> row(n);
  for (unsigned c = 0; c < chunks; ++c) {
    detail::PairAccumulator acc(pairs);
    for (std::size_t d = m * c / chunks; d < m * (c + 1) / chunks; ++d) {
      for (std::size_t k = 0; k < n; ++k) row[k] = samples(d, k);
      acc.add(row);
    }
    total.merge(acc);
  }
  return total.finish(n);
}

/// Streaming estimate: samples chunk by chunk without storing the matrix.
/// Identical (draws, seed, chunks) give bit-identical results for any thread
/// count; chunks are reduced in index order.
inline GmdEstimate estimate_gmd(const ValidatedSpec& spec, const MonteCarloConfig& cfg) {
  cfg.validate();
  if (spec.family().is_student()) spec.family().dof().require_mean();
  const std::size_t n = spec.dimension();
  const auto pairs = static_cast<std::size_t>(binomial2(n));
  std::vector<detail::PairAccumulator> partial(cfg.chunks, detail::PairAccumulator(pairs));
  detail::parallel_chunks(cfg.chunks, cfg.threads, [&](unsigned c) {
    Philox4x32 rng(cfg.seed, c);
    detail::VectorSampler sampler(spec);
    std::vector<double> row(n);
    auto& acc = partial[c];
    for (std::uint64_t d = cfg.chunk_begin(c); d < cfg.chunk_begin(c + 1); ++d) {
      sampler.draw(rng, row);
      acc.add(row);
    }
  });
  detail::PairAccumulator total(pairs);
  for (const auto& p : partial) total.merge(p);
  return total.finish(n);
}

inline GmdResult to_gmd_result(const GmdEstimate& e) {
  GmdResult r = GmdResult::from_pairs(Method::MonteCarlo, e.pair_means);
  // The per-draw mean is the reference value; the pair average agrees up to rounding.
  r.value = e.value;
  r.diagnostics["std_error"] = e.std_error;
  r.diagnostics["sample_count"] = static_cast<double>(e.draws);
  r.labels["prng"] = kPrngName;
  r.labels["normal_variates"] = kNormalMethod;
  r.labels["chi_square_variates"] = kChiSquareMethod;
  return r;
}

/// U-statistic (1/C(m,2)) sum_{a<b} |x_a - x_b| in O(m log m): after sorting,
/// the k-th order statistic (0-based) enters with weight 2k - (m - 1).
inline double classic_empirical_gmd(std::span<const double> x) {
  const std::size_t m = x.size();
  if (m < 2) throw DomainError("classic_empirical_gmd: need at least 2 observations");
  std::vector<double> sorted(x.begin(), x.end());
  std::sort(sorted.begin(), sorted.end());
  long double acc = 0.0L;
  for (std::size_t k = 0; k < m; ++k) {
    const long double w = 2.0L * static_cast<long double>(k) - static_cast<long double>(m - 1);
    acc += w * static_cast<long double>(sorted[k]);
  }
  return static_cast<double>(acc / (0.5L * static_cast<long double>(m) * static_cast<long double>(m - 1)));
}

}  // namespace gmd
