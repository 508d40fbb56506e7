#include "homsim/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>

namespace homsim::fft {
namespace {

std::mutex plan_mutex;

// FFTW_UNALIGNED lets one plan serve every buffer of matching shape;
// FFTW_ESTIMATE keeps planning deterministic (no timing-dependent choices).
fftw_plan get_plan(int nx, int ny, int sign) {
    static std::map<std::tuple<int, int, int>, fftw_plan> cache;
    std::lock_guard<std::mutex> lock(plan_mutex);
    auto key = std::make_tuple(nx, ny, sign);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    fftw_complex* probe = fftw_alloc_complex(static_cast<std::size_t>(nx) * ny);
    fftw_plan p = fftw_plan_dft_2d(ny, nx, probe, probe, sign,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(probe);
    if (!p) throw NumericError("fftw planning failed");
    cache.emplace(key, p);
    return p;
}

}  // namespace

void forward(int nx, int ny, cplx* data) {
    fftw_plan p = get_plan(nx, ny, FFTW_FORWARD);
    fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(data),
                     reinterpret_cast<fftw_complex*>(data));
}

void inverse(int nx, int ny, cplx* data) {
    fftw_plan p = get_plan(nx, ny, FFTW_BACKWARD);
    fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(data),
                     reinterpret_cast<fftw_complex*>(data));
    const double norm = 1.0 / (static_cast<double>(nx) * ny);
    const std::size_t n = static_cast<std::size_t>(nx) * ny;
    for (std::size_t i = 0; i < n; ++i) data[i] *= norm;
}

}  // namespace homsim::fft
