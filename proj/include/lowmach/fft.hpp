#pragma once

#include <fftw3.h>

#include <array>
#include <complex>
#include <cstring>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

namespace lowmach::detail {

using cplx = std::complex<double>;

// fftw_malloc'd buffer; every execution buffer shares the planner's alignment.
class FftwBuffer {
 public:
  explicit FftwBuffer(std::size_t n)
      : n_(n), data_(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n))) {
    if (!data_) throw std::bad_alloc();
  }
  ~FftwBuffer() { fftw_free(data_); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;

  fftw_complex* get() const { return data_; }
  cplx* begin() const { return reinterpret_cast<cplx*>(data_); }
  std::size_t size() const { return n_; }

 private:
  std::size_t n_;
  fftw_complex* data_;
};

class FftPlan {
 public:
  FftPlan(std::vector<int> dims) : dims_(std::move(dims)) {
    std::size_t n = 1;
    for (int d : dims_) n *= std::size_t(d);
    FftwBuffer in(n), out(n);
    const int rank = static_cast<int>(dims_.size());
    forward_ = fftw_plan_dft(rank, dims_.data(), in.get(), out.get(), FFTW_FORWARD, FFTW_ESTIMATE);
    backward_ = fftw_plan_dft(rank, dims_.data(), in.get(), out.get(), FFTW_BACKWARD, FFTW_ESTIMATE);
    size_ = n;
  }
  ~FftPlan() {
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(backward_);
  }
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;

  std::size_t size() const { return size_; }

  // Unnormalized transforms; fftw_execute_dft on distinct buffers is thread safe.
  void forward(std::span<const cplx> in, std::span<cplx> out) const { run(forward_, in, out); }
  void backward(std::span<const cplx> in, std::span<cplx> out) const { run(backward_, in, out); }

 private:
  void run(fftw_plan plan, std::span<const cplx> in, std::span<cplx> out) const {
    // Per-thread scratch, grown on demand.
    thread_local std::unique_ptr<FftwBuffer> a, b;
    if (!a || a->size() < size_) {
      a = std::make_unique<FftwBuffer>(size_);
      b = std::make_unique<FftwBuffer>(size_);
    }
    std::memcpy(a->get(), in.data(), sizeof(cplx) * size_);
    fftw_execute_dft(plan, a->get(), b->get());
    std::memcpy(static_cast<void*>(out.data()), b->get(), sizeof(cplx) * size_);
  }

  std::vector<int> dims_;
  std::size_t size_ = 0;
  fftw_plan forward_ = nullptr;
  fftw_plan backward_ = nullptr;
};

// Planning is not thread safe in FFTW; plans are created once per shape under a lock.
inline const FftPlan& plan_for(std::vector<int> dims) {
  static std::mutex mutex;
  static std::map<std::vector<int>, std::unique_ptr<FftPlan>> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(dims);
  if (it == cache.end()) {
    auto plan = std::make_unique<FftPlan>(dims);
    it = cache.emplace(std::move(dims), std::move(plan)).first;
  }
  return *it->second;
}

}  // namespace lowmach::detail
