#pragma once
#include <cstddef>
#include <utility>

namespace ltm::kernels {

// Batch scoring kernels over memory cohorts. Every kernel has a serial
// reference implementation and an OpenMP variant; both run the same
// per-element arithmetic (no cross-element floating-point reductions except
// exact min/max), so their outputs are bit-identical. The serial path stays
// in the build as the oracle for the parallel one and for small cohorts,
// where thread fan-out costs more than the loop.
enum class ExecPolicy {
    Serial,
    Parallel,
    Auto, // parallel from kParallelCutover elements, serial below
};

inline constexpr std::size_t kParallelCutover = 2048;

// Threads used by the parallel variants; 0 means the OpenMP default.
void set_threads(int n);
bool parallel_available();

// out[i] = dot(vecs[i], query) / (||vecs[i]|| * ||query||)
void cosine_batch(const double* const* vecs, std::size_t n, std::size_t dim,
                  const double* query, double* out, ExecPolicy policy = ExecPolicy::Auto);

// out[i] = exp(-delta_days[i] / stability_days)
void recency_batch(const double* delta_days, std::size_t n, double stability_days,
                   double* out, ExecPolicy policy = ExecPolicy::Auto);

// {min, max} over values; n must be > 0.
std::pair<double, double> min_max(const double* values, std::size_t n,
                                  ExecPolicy policy = ExecPolicy::Auto);

// out[i] = (values[i] - min) / (max - min); all 1.0 when max == min.
void normalize_batch(const double* values, std::size_t n, double min, double max,
                     double* out, ExecPolicy policy = ExecPolicy::Auto);

// out[i] = 100*(wr*recency_n[i] + wv*relevancy_n[i] + wi*importance) + bonus[i]
void gamma_batch(const double* recency_n, const double* relevancy_n,
                 const double* bonus, std::size_t n, double weight_recency,
                 double weight_relevancy, double weight_importance, double importance,
                 double* out, ExecPolicy policy = ExecPolicy::Auto);

// Shared per-element primitives (noinline so both drivers run identical code).
double dot(const double* a, const double* b, std::size_t dim);
double l2_norm(const double* a, std::size_t dim);

} // namespace ltm::kernels
