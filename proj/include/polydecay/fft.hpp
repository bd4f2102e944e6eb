#pragma once

// Thin RAII layer over FFTW. Plans are created once per (rank, size, sign),
// guarded by a mutex, and executed on private aligned buffers which makes
// concurrent transforms safe.

#include <fftw3.h>

#include <complex>
#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <tuple>

namespace polydecay::detail {

class AlignedBuffer {
public:
    explicit AlignedBuffer(std::size_t count)
        : size_(count),
          data_(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * count))) {
        if (!data_) throw std::bad_alloc();
    }
    ~AlignedBuffer() { fftw_free(data_); }
    AlignedBuffer(const AlignedBuffer&) = delete;
    AlignedBuffer& operator=(const AlignedBuffer&) = delete;

    fftw_complex* get() noexcept { return data_; }
    std::size_t size() const noexcept { return size_; }

private:
    std::size_t size_;
    fftw_complex* data_;
};

class FftPlanCache {
public:
    static FftPlanCache& instance() {
        static FftPlanCache cache;
        return cache;
    }

    /// In-place unnormalized DFT of `data` (length n^rank, row-major).
    /// sign = FFTW_FORWARD computes sum_j a_j exp(-2 pi i jk/n).
    void execute(int rank, int n, int sign, std::span<std::complex<double>> data) {
        fftw_plan plan = plan_for(rank, n, sign);
        AlignedBuffer buf(data.size());
        auto* aligned = reinterpret_cast<std::complex<double>*>(buf.get());
        std::copy(data.begin(), data.end(), aligned);
        fftw_execute_dft(plan, buf.get(), buf.get());
        std::copy(aligned, aligned + data.size(), data.begin());
    }

    FftPlanCache(const FftPlanCache&) = delete;
    FftPlanCache& operator=(const FftPlanCache&) = delete;

private:
    FftPlanCache() = default;
    ~FftPlanCache() {
        for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
    }

    fftw_plan plan_for(int rank, int n, int sign) {
        std::lock_guard<std::mutex> lock(mutex_);
        auto key = std::make_tuple(rank, n, sign);
        if (auto it = plans_.find(key); it != plans_.end()) return it->second;
        std::size_t count = rank == 1 ? std::size_t(n) : std::size_t(n) * std::size_t(n);
        AlignedBuffer scratch(count);
        fftw_plan plan = rank == 1
            ? fftw_plan_dft_1d(n, scratch.get(), scratch.get(), sign, FFTW_ESTIMATE)
            : fftw_plan_dft_2d(n, n, scratch.get(), scratch.get(), sign, FFTW_ESTIMATE);
        plans_.emplace(key, plan);
        return plan;
    }

    std::mutex mutex_;
    std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

}  // namespace polydecay::detail
