// Circulant embedding (Davies-Harte) for fractional Gaussian noise, plus the
// FFT and Toeplitz helpers shared with the conditioning code.

#include <algorithm>
#include <cmath>
#include <mutex>
#include <stdexcept>

#include "fbm_internal.hpp"
#include "fft_util.hpp"
#include "gfou/errors.hpp"

namespace gfou::detail {

namespace {
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

Fft::Fft(std::size_t n) : n_(n) {
    if (n == 0) throw std::invalid_argument("Fft: zero size");
    std::lock_guard lock(planner_mutex());
    ComplexBuffer a(n);
    ComplexBuffer b(n);
    auto* in = reinterpret_cast<fftw_complex*>(a.data());
    auto* out = reinterpret_cast<fftw_complex*>(b.data());
    fwd_ = fftw_plan_dft_1d(static_cast<int>(n), in, out, FFTW_FORWARD, FFTW_ESTIMATE);
    bwd_ = fftw_plan_dft_1d(static_cast<int>(n), in, out, FFTW_BACKWARD, FFTW_ESTIMATE);
}

Fft::~Fft() {
    std::lock_guard lock(planner_mutex());
    if (fwd_) fftw_destroy_plan(fwd_);
    if (bwd_) fftw_destroy_plan(bwd_);
}

void Fft::forward(const std::complex<double>* in, std::complex<double>* out) const {
    fftw_execute_dft(fwd_, reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in)),
                     reinterpret_cast<fftw_complex*>(out));
}

void Fft::backward(const std::complex<double>* in, std::complex<double>* out) const {
    fftw_execute_dft(bwd_, reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in)),
                     reinterpret_cast<fftw_complex*>(out));
}

ComplexBuffer::ComplexBuffer(std::size_t n)
    : n_(n), data_(reinterpret_cast<std::complex<double>*>(fftw_alloc_complex(n))) {
    if (!data_) throw std::bad_alloc();
    std::fill(data_, data_ + n, std::complex<double>{});
}

ComplexBuffer::~ComplexBuffer() { fftw_free(data_); }

ToeplitzOperator::ToeplitzOperator(std::vector<double> column, std::vector<double> row)
    : n_(column.size()) {
    if (row.size() != n_ || n_ == 0) throw std::invalid_argument("ToeplitzOperator: bad sizes");
    const std::size_t len = next_pow2(2 * n_);
    fft_ = std::make_unique<Fft>(len);
    ComplexBuffer c(len);
    for (std::size_t k = 0; k < n_; ++k) c[k] = column[k];
    for (std::size_t k = 1; k < n_; ++k) c[len - k] = row[k];
    ComplexBuffer spec(len);
    fft_->forward(c.data(), spec.data());
    spectrum_.assign(spec.data(), spec.data() + len);
}

std::vector<double> ToeplitzOperator::apply(const std::vector<double>& x) const {
    const std::size_t len = fft_->size();
    ComplexBuffer buf(len);
    ComplexBuffer freq(len);
    for (std::size_t k = 0; k < n_; ++k) buf[k] = x[k];
    fft_->forward(buf.data(), freq.data());
    for (std::size_t k = 0; k < len; ++k) freq[k] *= spectrum_[k];
    fft_->backward(freq.data(), buf.data());
    std::vector<double> y(n_);
    const double scale = 1.0 / static_cast<double>(len);
    for (std::size_t k = 0; k < n_; ++k) y[k] = buf[k].real() * scale;
    return y;
}

ToeplitzSolver::ToeplitzSolver(std::vector<double> column) : op_(column, column) {
    const std::size_t n = column.size();
    pre_fft_ = std::make_unique<Fft>(n);
    ComplexBuffer c(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double a = static_cast<double>(n - k) * column[k];
        const double b = k == 0 ? 0.0 : static_cast<double>(k) * column[n - k];
        c[k] = (a + b) / static_cast<double>(n);
    }
    ComplexBuffer eig(n);
    pre_fft_->forward(c.data(), eig.data());
    pre_inverse_eigen_.resize(n);
    double max_eig = 0.0;
    for (std::size_t k = 0; k < n; ++k) max_eig = std::max(max_eig, eig[k].real());
    for (std::size_t k = 0; k < n; ++k) {
        const double e = std::max(eig[k].real(), 1e-14 * max_eig);
        pre_inverse_eigen_[k] = 1.0 / e;
    }
}

std::vector<double> ToeplitzSolver::solve(const std::vector<double>& b, double rel_tol) const {
    const std::size_t n = op_.size();
    if (b.size() != n) throw std::invalid_argument("ToeplitzSolver: size mismatch");

    ComplexBuffer buf(n);
    ComplexBuffer freq(n);
    auto precondition = [&](const std::vector<double>& r) {
        for (std::size_t k = 0; k < n; ++k) buf[k] = r[k];
        pre_fft_->forward(buf.data(), freq.data());
        for (std::size_t k = 0; k < n; ++k) freq[k] *= pre_inverse_eigen_[k];
        pre_fft_->backward(freq.data(), buf.data());
        std::vector<double> z(n);
        for (std::size_t k = 0; k < n; ++k) z[k] = buf[k].real() / static_cast<double>(n);
        return z;
    };
    auto dot = [](const std::vector<double>& u, const std::vector<double>& v) {
        double s = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * v[i];
        return s;
    };

    const double bnorm = std::sqrt(dot(b, b));
    std::vector<double> x(n, 0.0);
    if (bnorm == 0.0) return x;
    std::vector<double> r = b;
    std::vector<double> z = precondition(r);
    std::vector<double> p = z;
    double rz = dot(r, z);
    const std::size_t max_iter = std::max<std::size_t>(200, 4 * n);
    for (std::size_t it = 0; it < max_iter; ++it) {
        const std::vector<double> ap = op_.apply(p);
        const double alpha = rz / dot(p, ap);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        if (std::sqrt(dot(r, r)) <= rel_tol * bnorm) return x;
        z = precondition(r);
        const double rz_next = dot(r, z);
        const double beta = rz_next / rz;
        rz = rz_next;
        for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
    throw AccuracyError("Toeplitz conjugate gradients did not converge");
}

CirculantFgn::CirculantFgn(const HurstIndex& h, std::size_t n, double step) : n_(n) {
    if (n == 0) throw std::invalid_argument("CirculantFgn: zero length");
    const std::size_t m = next_pow2(n);
    const std::size_t len = 2 * m;
    fft_ = std::make_unique<Fft>(len);
    ComplexBuffer c(len);
    for (std::size_t k = 0; k <= m; ++k) c[k] = fgn_autocov(h, step, static_cast<long>(k));
    for (std::size_t k = 1; k < m; ++k) c[len - k] = c[k];
    ComplexBuffer eig(len);
    fft_->forward(c.data(), eig.data());
    sqrt_eigen_.resize(len);
    double max_eig = 0.0;
    for (std::size_t k = 0; k < len; ++k) max_eig = std::max(max_eig, eig[k].real());
    for (std::size_t k = 0; k < len; ++k) {
        double e = eig[k].real();
        if (e < 0.0) {
            if (e < -1e-10 * max_eig) {
                throw FactorizationError("circulant embedding is not nonnegative definite");
            }
            e = 0.0;
        }
        sqrt_eigen_[k] = std::sqrt(e / static_cast<double>(len));
    }
}

std::vector<double> CirculantFgn::sample(RandomStream& rng) const {
    const std::size_t len = fft_->size();
    ComplexBuffer z(len);
    ComplexBuffer out(len);
    for (std::size_t k = 0; k < len; ++k) {
        const double re = rng.normal();
        const double im = rng.normal();
        z[k] = std::complex<double>(re, im) * sqrt_eigen_[k];
    }
    fft_->forward(z.data(), out.data());
    std::vector<double> x(n_);
    for (std::size_t k = 0; k < n_; ++k) x[k] = out[k].real();
    return x;
}

}  // namespace gfou::detail

namespace gfou {

std::vector<double> sample_fgn(const HurstIndex& h, std::size_t n, double step, RandomStream& rng) {
    return detail::CirculantFgn(h, n, step).sample(rng);
}

}  // namespace gfou
