#ifndef BENSTAT_KERNELS_HPP
#define BENSTAT_KERNELS_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace benstat {

// Execution policy for the data-parallel kernels. Every kernel parallelizes
// over independent output elements only, with a fixed accumulation order per
// element, so Serial and OpenMP produce bit-identical results; the serial
// path is kept as the reference implementation for tests and benchmarks.
enum class Exec { Serial, OpenMP };

void set_worker_count(int n);  // clamps to >= 1; OpenMP only
int worker_count();

template <typename Fn>
void parallel_for(long n, Exec exec, Fn&& fn) {
  if (exec == Exec::OpenMP) {
#pragma omp parallel for schedule(static)
    for (long i = 0; i < n; ++i) fn(i);
  } else {
    for (long i = 0; i < n; ++i) fn(i);
  }
}

// Rank-3 tensor, flat layout data[(k*ni + i)*nj + j] so that contractions over
// (i,j) at fixed output index k run over contiguous memory.
class Tensor3 {
 public:
  Tensor3() = default;
  Tensor3(int ni, int nj, int nk)
      : ni_(ni), nj_(nj), nk_(nk),
        data_(static_cast<std::size_t>(ni) * nj * nk, 0.0) {}

  int ni() const { return ni_; }
  int nj() const { return nj_; }
  int nk() const { return nk_; }

  double& at(int i, int j, int k) {
    return data_[(static_cast<std::size_t>(k) * ni_ + i) * nj_ + j];
  }
  double at(int i, int j, int k) const {
    return data_[(static_cast<std::size_t>(k) * ni_ + i) * nj_ + j];
  }

  const double* slab(int k) const {
    return data_.data() + static_cast<std::size_t>(k) * ni_ * nj_;
  }
  std::vector<double>& raw() { return data_; }
  const std::vector<double>& raw() const { return data_; }

 private:
  int ni_ = 0, nj_ = 0, nk_ = 0;
  std::vector<double> data_;
};

// out[k] = sum_{i,j} T[i,j,k] x[i] y[j]; one thread per output index.
Eigen::VectorXd apply_quadratic(const Tensor3& T, const Eigen::VectorXd& x,
                                const Eigen::VectorXd& y, Exec exec);

// Weighted grid dot product sum_p a[p] b[p] w[p] (fixed order, serial per call).
double weighted_dot(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                    const Eigen::VectorXd& w);

}  // namespace benstat

#endif
