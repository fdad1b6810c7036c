#include "nsf/fft3.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>

namespace nsf {

namespace {

std::mutex& planner_mutex()
{
    static std::mutex m;
    return m;
}

struct PlanPair {
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;
    fftw_complex* buf = nullptr;
    std::size_t size = 0;

    ~PlanPair()
    {
        if (fwd) fftw_destroy_plan(fwd);
        if (bwd) fftw_destroy_plan(bwd);
        if (buf) fftw_free(buf);
    }
};

// One cache per thread: plans are executed on the thread that owns them via
// the new-array interface, so concurrent transforms never share state.
thread_local std::map<int, PlanPair> plan_cache;

PlanPair& plans_for(int n)
{
    auto it = plan_cache.find(n);
    if (it != plan_cache.end()) return it->second;

    PlanPair& p = plan_cache[n];
    p.size = static_cast<std::size_t>(n) * n * n;
    p.buf = fftw_alloc_complex(p.size);
    if (!p.buf) throw std::runtime_error("fft3: allocation failed");
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        // UNALIGNED: plans are executed on caller-owned vectors whose
        // alignment FFTW must not assume.
        const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        p.fwd = fftw_plan_dft_3d(n, n, n, p.buf, p.buf, FFTW_FORWARD, flags);
        p.bwd = fftw_plan_dft_3d(n, n, n, p.buf, p.buf, FFTW_BACKWARD, flags);
    }
    if (!p.fwd || !p.bwd) throw std::runtime_error("fft3: planning failed");
    return p;
}

} // namespace

void dft3(std::complex<double>* data, int n, int sign)
{
    PlanPair& p = plans_for(n);
    auto* raw = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(sign < 0 ? p.fwd : p.bwd, raw, raw);
}

void dft3_cleanup_thread()
{
    plan_cache.clear();
}

} // namespace nsf
