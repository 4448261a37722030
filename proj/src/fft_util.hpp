#pragma once

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <memory>
#include <vector>

namespace gfou::detail {

/// In-place-free complex DFT of a fixed size. Plans are created once under a
/// global lock; execute() is safe to call concurrently.
class Fft {
public:
    explicit Fft(std::size_t n);
    ~Fft();
    Fft(const Fft&) = delete;
    Fft& operator=(const Fft&) = delete;

    std::size_t size() const { return n_; }

    /// out = sum_k in[k] e^{-2 pi i jk/n}
    void forward(const std::complex<double>* in, std::complex<double>* out) const;
    /// out = sum_k in[k] e^{+2 pi i jk/n} (unnormalized)
    void backward(const std::complex<double>* in, std::complex<double>* out) const;

private:
    std::size_t n_;
    fftw_plan fwd_ = nullptr;
    fftw_plan bwd_ = nullptr;
};

/// fftw_malloc-backed buffer so arrays meet the plans' alignment.
class ComplexBuffer {
public:
    explicit ComplexBuffer(std::size_t n);
    ~ComplexBuffer();
    ComplexBuffer(const ComplexBuffer&) = delete;
    ComplexBuffer& operator=(const ComplexBuffer&) = delete;

    std::complex<double>* data() { return data_; }
    const std::complex<double>* data() const { return data_; }
    std::complex<double>& operator[](std::size_t i) { return data_[i]; }
    const std::complex<double>& operator[](std::size_t i) const { return data_[i]; }
    std::size_t size() const { return n_; }

private:
    std::size_t n_;
    std::complex<double>* data_;
};

std::size_t next_pow2(std::size_t n);

/// Fast products with a fixed Toeplitz matrix via circulant embedding.
/// T[i][j] = column[i - j] for i >= j and row[j - i] for j > i.
class ToeplitzOperator {
public:
    ToeplitzOperator(std::vector<double> column, std::vector<double> row);

    std::size_t size() const { return n_; }
    std::vector<double> apply(const std::vector<double>& x) const;

private:
    std::size_t n_;
    std::unique_ptr<Fft> fft_;
    std::vector<std::complex<double>> spectrum_;
};

/// Solves T x = b for a symmetric positive definite Toeplitz T given by its
/// first column, by conjugate gradients with T. Chan's circulant preconditioner.
class ToeplitzSolver {
public:
    explicit ToeplitzSolver(std::vector<double> column);

    std::vector<double> solve(const std::vector<double>& b, double rel_tol = 1e-12) const;
    std::vector<double> apply(const std::vector<double>& x) const { return op_.apply(x); }
    std::size_t size() const { return op_.size(); }

private:
    ToeplitzOperator op_;
    std::unique_ptr<Fft> pre_fft_;
    std::vector<double> pre_inverse_eigen_;
};

}  // namespace gfou::detail
