#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <thread>
#include <vector>

#include "cibound/config.hpp"
#include "cibound/rng.hpp"
#include "cibound/smoothing.hpp"
#include "cibound/width.hpp"

namespace cibound {

struct McEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::uint64_t n = 0;
};

namespace detail {

/// Box-Muller pairs from mt19937_64; portable bit-for-bit across platforms.
struct NormalPairRng {
    std::mt19937_64 eng;
    explicit NormalPairRng(std::uint64_t seed) : eng(seed) {}
    void next(double& z1, double& z2) {
        const double u1 = to_unit_double(eng());
        const double u2 = to_unit_double(eng());
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * M_PI * u2;
        z1 = r * std::cos(a);
        z2 = r * std::sin(a);
    }
};

inline constexpr std::uint64_t kMcChunk = 1u << 20;

struct ChunkSums {
    double sum = 0.0;
    double sumsq = 0.0;
    std::uint64_t count = 0;  // indicator count for coverage
};

/// Run `body(chunk_index, chunk_size, out_slot)` over ceil(n/kMcChunk) chunks,
/// possibly in parallel; slots are merged in index order so results do not
/// depend on scheduling.
template <class Body>
std::vector<ChunkSums> run_chunks(std::uint64_t n, int threads, Body&& body) {
    const std::uint64_t nchunks = (n + kMcChunk - 1) / kMcChunk;
    std::vector<ChunkSums> slots(static_cast<std::size_t>(nchunks));
    auto work = [&](std::uint64_t c) {
        const std::uint64_t size = std::min<std::uint64_t>(kMcChunk, n - c * kMcChunk);
        body(c, size, slots[static_cast<std::size_t>(c)]);
    };
    int nt = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
    nt = std::max(1, std::min<int>(nt, static_cast<int>(nchunks)));
    if (nt == 1) {
        for (std::uint64_t c = 0; c < nchunks; ++c) work(c);
    } else {
        std::atomic<std::uint64_t> next{0};
        std::vector<std::thread> pool;
        for (int t = 0; t < nt; ++t)
            pool.emplace_back([&] {
                for (std::uint64_t c = next.fetch_add(1); c < nchunks; c = next.fetch_add(1))
                    work(c);
            });
        for (auto& th : pool) th.join();
    }
    return slots;
}

}  // namespace detail

/// Monte-Carlo coverage of CI(s) at parameter gamma: draws (G, gamma_hat)
/// bivariate normal with means (0, gamma), unit variances and correlation
/// rho, and estimates P(b(gamma_hat) - s(gamma_hat) <= G <= b(gamma_hat) + s(gamma_hat)).
template <class W>
McEstimate mc_coverage(const W& s, double gamma, const ProblemConfig& cfg, std::uint64_t n,
                       std::uint64_t seed, int threads = 0) {
    if (n < 10000) throw std::domain_error("mc_coverage: n must be >= 1e4");
    const double rho = cfg.rho();
    const double tau = std::sqrt(1.0 - rho * rho);
    auto slots = detail::run_chunks(n, threads, [&](std::uint64_t c, std::uint64_t size,
                                                    detail::ChunkSums& out) {
        detail::NormalPairRng rng(split_seed(seed, c));
        std::uint64_t hits = 0;
        for (std::uint64_t i = 0; i < size; ++i) {
            double z1, z2;
            rng.next(z1, z2);
            const double g = rho * z1 + tau * z2;
            const double gh = gamma + z1;
            const double sh = s(gh);
            const double bh = bias(gh, cfg);
            if (bh - sh <= g && g <= bh + sh) ++hits;
        }
        out.count = hits;
    });
    std::uint64_t hits = 0;
    for (const auto& sl : slots) hits += sl.count;
    McEstimate e;
    e.n = n;
    e.mean = static_cast<double>(hits) / static_cast<double>(n);
    e.std_error = std::sqrt(e.mean * (1.0 - e.mean) / static_cast<double>(n));
    return e;
}

/// Monte-Carlo scaled expected length: draws gamma_hat ~ N(gamma, 1) and
/// estimates E[s(gamma_hat)] / z_alpha with the plug-in standard error.
template <class W>
McEstimate mc_sel(const W& s, double z_alpha, double gamma, std::uint64_t n,
                  std::uint64_t seed, int threads = 0) {
    if (n < 10000) throw std::domain_error("mc_sel: n must be >= 1e4");
    auto slots = detail::run_chunks(n, threads, [&](std::uint64_t c, std::uint64_t size,
                                                    detail::ChunkSums& out) {
        detail::NormalPairRng rng(split_seed(seed, c));
        double sum = 0.0, sumsq = 0.0;
        std::uint64_t i = 0;
        while (i < size) {
            double z1, z2;
            rng.next(z1, z2);
            double v = s(gamma + z1) / z_alpha;
            sum += v;
            sumsq += v * v;
            if (++i >= size) break;
            v = s(gamma + z2) / z_alpha;
            sum += v;
            sumsq += v * v;
            ++i;
        }
        out.sum = sum;
        out.sumsq = sumsq;
    });
    double sum = 0.0, sumsq = 0.0;
    for (const auto& sl : slots) {
        sum += sl.sum;
        sumsq += sl.sumsq;
    }
    McEstimate e;
    e.n = n;
    const double dn = static_cast<double>(n);
    e.mean = sum / dn;
    const double var = std::max(0.0, sumsq / dn - e.mean * e.mean);
    e.std_error = std::sqrt(var / dn);
    return e;
}

/// WidthFunction overload: the class-D tail is z(alpha) by construction.
inline McEstimate mc_sel(const WidthFunction& s, double gamma, std::uint64_t n,
                         std::uint64_t seed, int threads = 0) {
    return mc_sel(s, s.tail(), gamma, n, seed, threads);
}

}  // namespace cibound
