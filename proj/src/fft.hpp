#pragma once

#include <complex>
#include <mutex>
#include <vector>

#include <fftw3.h>

namespace satolab {

// FFTW wrapper; plans are created under a lock (the FFTW planner is not
// thread-safe) with FFTW_ESTIMATE so results are reproducible.
inline void fft_inplace(std::vector<std::complex<double>>& data, bool inverse) {
    static std::mutex planner_mutex;
    auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(planner_mutex);
        plan = fftw_plan_dft_1d(static_cast<int>(data.size()), ptr, ptr,
                                inverse ? FFTW_BACKWARD : FFTW_FORWARD, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(planner_mutex);
        fftw_destroy_plan(plan);
    }
    if (inverse) {
        double scale = 1.0 / static_cast<double>(data.size());
        for (auto& z : data) z *= scale;
    }
}

}  // namespace satolab
