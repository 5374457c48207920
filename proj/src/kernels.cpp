#include "ltm/kernels.hpp"

#include <algorithm>
#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ltm::kernels {

namespace {

int g_threads = 0;

bool use_parallel(std::size_t n, ExecPolicy policy) {
#ifdef _OPENMP
    switch (policy) {
        case ExecPolicy::Serial: return false;
        case ExecPolicy::Parallel: return true;
        case ExecPolicy::Auto: return n >= kParallelCutover;
    }
    return false;
#else
    (void)n;
    (void)policy;
    return false;
#endif
}

#ifdef _OPENMP
struct ThreadGuard {
    // Scopes an explicit thread count to one kernel call.
    explicit ThreadGuard(int requested) : prev_(omp_get_max_threads()) {
        if (requested > 0) omp_set_num_threads(requested);
    }
    ~ThreadGuard() { omp_set_num_threads(prev_); }
    int prev_;
};
#endif

__attribute__((noinline)) double cosine_one(const double* v, const double* q,
                                            std::size_t dim) {
    const double d = dot(v, q, dim);
    const double nv = l2_norm(v, dim);
    const double nq = l2_norm(q, dim);
    return d / (nv * nq);
}

__attribute__((noinline)) double recency_one(double delta_days, double stability_days) {
    return std::exp(-delta_days / stability_days);
}

__attribute__((noinline)) double normalize_one(double value, double min, double max) {
    if (max == min) return 1.0;
    return (value - min) / (max - min);
}

__attribute__((noinline)) double gamma_one(double recency_n, double relevancy_n,
                                           double bonus, double wr, double wv,
                                           double wi, double importance) {
    return 100.0 * (wr * recency_n + wv * relevancy_n + wi * importance) + bonus;
}

} // namespace

void set_threads(int n) { g_threads = n; }

bool parallel_available() {
#ifdef _OPENMP
    return true;
#else
    return false;
#endif
}

__attribute__((noinline)) double dot(const double* a, const double* b, std::size_t dim) {
    double acc = 0.0;
    for (std::size_t i = 0; i < dim; ++i) acc += a[i] * b[i];
    return acc;
}

__attribute__((noinline)) double l2_norm(const double* a, std::size_t dim) {
    return std::sqrt(dot(a, a, dim));
}

void cosine_batch(const double* const* vecs, std::size_t n, std::size_t dim,
                  const double* query, double* out, ExecPolicy policy) {
    if (use_parallel(n, policy)) {
#ifdef _OPENMP
        ThreadGuard guard(g_threads);
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
            out[i] = cosine_one(vecs[i], query, dim);
        }
#endif
    } else {
        for (std::size_t i = 0; i < n; ++i) out[i] = cosine_one(vecs[i], query, dim);
    }
}

void recency_batch(const double* delta_days, std::size_t n, double stability_days,
                   double* out, ExecPolicy policy) {
    if (use_parallel(n, policy)) {
#ifdef _OPENMP
        ThreadGuard guard(g_threads);
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
            out[i] = recency_one(delta_days[i], stability_days);
        }
#endif
    } else {
        for (std::size_t i = 0; i < n; ++i) out[i] = recency_one(delta_days[i], stability_days);
    }
}

std::pair<double, double> min_max(const double* values, std::size_t n, ExecPolicy policy) {
    double lo = values[0];
    double hi = values[0];
    if (use_parallel(n, policy)) {
#ifdef _OPENMP
        ThreadGuard guard(g_threads);
#pragma omp parallel for schedule(static) reduction(min : lo) reduction(max : hi)
        for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
            lo = std::min(lo, values[i]);
            hi = std::max(hi, values[i]);
        }
#endif
    } else {
        for (std::size_t i = 1; i < n; ++i) {
            lo = std::min(lo, values[i]);
            hi = std::max(hi, values[i]);
        }
    }
    return {lo, hi};
}

void normalize_batch(const double* values, std::size_t n, double min, double max,
                     double* out, ExecPolicy policy) {
    if (use_parallel(n, policy)) {
#ifdef _OPENMP
        ThreadGuard guard(g_threads);
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
            out[i] = normalize_one(values[i], min, max);
        }
#endif
    } else {
        for (std::size_t i = 0; i < n; ++i) out[i] = normalize_one(values[i], min, max);
    }
}

void gamma_batch(const double* recency_n, const double* relevancy_n, const double* bonus,
                 std::size_t n, double weight_recency, double weight_relevancy,
                 double weight_importance, double importance, double* out,
                 ExecPolicy policy) {
    if (use_parallel(n, policy)) {
#ifdef _OPENMP
        ThreadGuard guard(g_threads);
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
            out[i] = gamma_one(recency_n[i], relevancy_n[i], bonus[i], weight_recency,
                               weight_relevancy, weight_importance, importance);
        }
#endif
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            out[i] = gamma_one(recency_n[i], relevancy_n[i], bonus[i], weight_recency,
                               weight_relevancy, weight_importance, importance);
        }
    }
}

} // namespace ltm::kernels
