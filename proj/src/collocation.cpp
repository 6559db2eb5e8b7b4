#include "imlab/collocation.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "imlab/errors.hpp"

namespace imlab {

namespace {

Eigen::FFT<double>& thread_fft() {
  thread_local Eigen::FFT<double> fft = [] {
    Eigen::FFT<double> f;
    f.SetFlag(Eigen::FFT<double>::Unscaled);
    return f;
  }();
  return fft;
}

}  // namespace

int fft_friendly_size(int n) {
  for (int m = std::max(n, 1);; ++m) {
    int r = m;
    for (int p : {2, 3, 5}) {
      while (r % p == 0) r /= p;
    }
    if (r == 1) return m;
  }
}

Collocation::Collocation(std::shared_ptr<const ModeSet> modes, int grid_size)
    : modes_(std::move(modes)), size_(grid_size) {
  if (modes_->is_shell()) throw CapabilityError("collocation grids exist only for torus fields");
  if (size_ < 2 * modes_->max_component() + 1) {
    throw ShapeError("collocation grid too small to represent the retained modes");
  }
  points_ = 1;
  for (int a = 0; a < dim(); ++a) {
    points_ *= size_;
    if (points_ > kMaxPoints) {
      throw ResourceError("collocation grid of " + std::to_string(size_) + "^" +
                          std::to_string(dim()) + " points exceeds the grid budget");
    }
  }
  offsets_.reserve(static_cast<std::size_t>(modes_->size()));
  for (const Mode& m : modes_->modes()) {
    long flat = 0;
    for (int a = 0; a < dim(); ++a) {
      const int wrapped = ((m[a] % size_) + size_) % size_;
      flat = flat * size_ + wrapped;
    }
    offsets_.push_back(flat);
  }
}

Collocation Collocation::for_products(std::shared_ptr<const ModeSet> modes, int degree) {
  const int r = modes->max_component();
  return Collocation(modes, fft_friendly_size((degree + 1) * r + 1));
}

Collocation Collocation::for_quadrature(std::shared_ptr<const ModeSet> modes, int degree) {
  const int r = modes->max_component();
  return Collocation(modes, fft_friendly_size(std::max(degree * r + 1, 2 * r + 1)));
}

void Collocation::transform(std::vector<std::complex<double>>& data, bool inverse) const {
  auto& fft = thread_fft();
  const long n = size_;
  std::vector<std::complex<double>> line(static_cast<std::size_t>(n));
  std::vector<std::complex<double>> out(static_cast<std::size_t>(n));
  // Axis a has stride n^(d-1-a) in row-major order.
  for (int a = 0; a < dim(); ++a) {
    long stride = 1;
    for (int b = a + 1; b < dim(); ++b) stride *= n;
    const long block = stride * n;
    for (long base = 0; base < points_; base += block) {
      for (long off = 0; off < stride; ++off) {
        const long start = base + off;
        for (long k = 0; k < n; ++k) line[static_cast<std::size_t>(k)] = data[static_cast<std::size_t>(start + k * stride)];
        if (inverse) {
          fft.inv(out, line);
        } else {
          fft.fwd(out, line);
        }
        for (long k = 0; k < n; ++k) data[static_cast<std::size_t>(start + k * stride)] = out[static_cast<std::size_t>(k)];
      }
    }
  }
}

Eigen::ArrayXd Collocation::synthesize(const Eigen::VectorXcd& coeffs) const {
  if (coeffs.size() != modes_->size()) throw ShapeError("coefficient vector does not match mode set");
  std::vector<std::complex<double>> data(static_cast<std::size_t>(points_));
  for (int i = 0; i < modes_->size(); ++i) data[static_cast<std::size_t>(offsets_[static_cast<std::size_t>(i)])] = coeffs(i);
  transform(data, /*inverse=*/true);
  Eigen::ArrayXd values(points_);
  for (long j = 0; j < points_; ++j) values(j) = data[static_cast<std::size_t>(j)].real();
  return values;
}

Eigen::VectorXcd Collocation::analyze(const Eigen::ArrayXd& values) const {
  if (values.size() != points_) throw ShapeError("grid values do not match collocation grid");
  std::vector<std::complex<double>> data(static_cast<std::size_t>(points_));
  for (long j = 0; j < points_; ++j) data[static_cast<std::size_t>(j)] = values(j);
  transform(data, /*inverse=*/false);
  Eigen::VectorXcd coeffs(modes_->size());
  const double norm = 1.0 / static_cast<double>(points_);
  for (int i = 0; i < modes_->size(); ++i) {
    coeffs(i) = data[static_cast<std::size_t>(offsets_[static_cast<std::size_t>(i)])] * norm;
  }
  return coeffs;
}

double Collocation::integral(const Eigen::ArrayXd& values) const {
  return std::pow(2.0 * std::numbers::pi, dim()) * values.mean();
}

}  // namespace imlab
