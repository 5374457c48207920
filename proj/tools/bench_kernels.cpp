// Compares the serial reference kernels against the OpenMP variants on
// synthetic cohorts and checks the outputs stay bit-identical.

#include <chrono>
#include <cstdio>
#include <cstring>
#include <functional>
#include <string>
#include <vector>

#include "ltm/kernels.hpp"
#include "ltm/rng.hpp"

using ltm::kernels::ExecPolicy;

namespace {

using Clock = std::chrono::steady_clock;

double time_once(const std::function<void()>& fn) {
    const auto start = Clock::now();
    fn();
    const auto stop = Clock::now();
    return std::chrono::duration<double, std::milli>(stop - start).count();
}

double best_of(int reps, const std::function<void()>& fn) {
    double best = 1e300;
    for (int i = 0; i < reps; ++i) best = std::min(best, time_once(fn));
    return best;
}

struct Cohort {
    std::size_t n;
    std::size_t dim;
    std::vector<double> storage;
    std::vector<const double*> vecs;
    std::vector<double> query;
    std::vector<double> deltas;
    std::vector<double> bonus;
};

Cohort make_cohort(std::size_t n, std::size_t dim, std::uint64_t seed) {
    Cohort c;
    c.n = n;
    c.dim = dim;
    c.storage.resize(n * dim);
    c.vecs.resize(n);
    ltm::Rng rng(seed);
    for (double& v : c.storage) v = rng.uniform(-1.0, 1.0);
    for (std::size_t i = 0; i < n; ++i) c.vecs[i] = &c.storage[i * dim];
    c.query.resize(dim);
    for (double& v : c.query) v = rng.uniform(-1.0, 1.0);
    c.deltas.resize(n);
    for (double& v : c.deltas) v = rng.uniform(0.0, 400.0);
    c.bonus.resize(n);
    for (double& v : c.bonus) v = 5.0 * static_cast<double>(rng.uniform_int(0, 4));
    return c;
}

bool bitwise_equal(const std::vector<double>& a, const std::vector<double>& b) {
    return a.size() == b.size() &&
           std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

} // namespace

int main(int argc, char** argv) {
    const bool quick = argc > 1 && std::string(argv[1]) == "--quick";
    const int reps = quick ? 3 : 7;
    const std::vector<std::size_t> sizes =
        quick ? std::vector<std::size_t>{4096, 32768}
              : std::vector<std::size_t>{4096, 32768, 262144};
    const std::size_t dim = 256;

    if (!ltm::kernels::parallel_available()) {
        std::printf("OpenMP not compiled in; serial numbers only.\n");
    }
    std::printf("%-10s %-16s %12s %12s %9s %9s\n", "n", "kernel", "serial(ms)", "omp(ms)",
                "speedup", "equal");

    bool all_equal = true;
    for (std::size_t n : sizes) {
        Cohort c = make_cohort(n, dim, 7);
        std::vector<double> serial_out(n);
        std::vector<double> parallel_out(n);

        struct Case {
            const char* name;
            std::function<void(double*, ExecPolicy)> run;
        };
        std::vector<Case> cases;
        cases.push_back({"cosine", [&](double* out, ExecPolicy p) {
                             ltm::kernels::cosine_batch(c.vecs.data(), c.n, c.dim,
                                                        c.query.data(), out, p);
                         }});
        cases.push_back({"recency", [&](double* out, ExecPolicy p) {
                             ltm::kernels::recency_batch(c.deltas.data(), c.n, 90.0, out, p);
                         }});
        cases.push_back({"gamma", [&](double* out, ExecPolicy p) {
                             const auto mm = ltm::kernels::min_max(c.deltas.data(), c.n, p);
                             std::vector<double> norm(c.n);
                             ltm::kernels::normalize_batch(c.deltas.data(), c.n, mm.first,
                                                           mm.second, norm.data(), p);
                             ltm::kernels::gamma_batch(norm.data(), norm.data(),
                                                       c.bonus.data(), c.n, 0.5, 0.3, 0.2,
                                                       0.6, out, p);
                         }});

        for (auto& kase : cases) {
            const double serial_ms =
                best_of(reps, [&] { kase.run(serial_out.data(), ExecPolicy::Serial); });
            const double parallel_ms =
                best_of(reps, [&] { kase.run(parallel_out.data(), ExecPolicy::Parallel); });
            const bool equal = bitwise_equal(serial_out, parallel_out);
            all_equal = all_equal && equal;
            std::printf("%-10zu %-16s %12.3f %12.3f %8.2fx %9s\n", n, kase.name, serial_ms,
                        parallel_ms, serial_ms / parallel_ms, equal ? "yes" : "NO");
        }
    }
    if (!all_equal) {
        std::printf("FAIL: serial and parallel outputs diverged\n");
        return 1;
    }
    return 0;
}
