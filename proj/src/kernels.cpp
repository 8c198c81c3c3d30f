#include "benstat/kernels.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

#include <algorithm>

#include "benstat/errors.hpp"

namespace benstat {

void set_worker_count(int n) {
#ifdef _OPENMP
  omp_set_num_threads(std::max(1, n));
#else
  (void)n;
#endif
}

int worker_count() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

Eigen::VectorXd apply_quadratic(const Tensor3& T, const Eigen::VectorXd& x,
                                const Eigen::VectorXd& y, Exec exec) {
  require(T.ni() == x.size() && T.nj() == y.size(), Errc::DimensionMismatch,
          "tensor contraction operands");
  Eigen::VectorXd out(T.nk());
  const int ni = T.ni(), nj = T.nj();
  parallel_for(T.nk(), exec, [&](long k) {
    const double* slab = T.slab(static_cast<int>(k));
    double acc = 0.0;
    for (int i = 0; i < ni; ++i) {
      const double* row = slab + static_cast<std::size_t>(i) * nj;
      double rowacc = 0.0;
      for (int j = 0; j < nj; ++j) rowacc += row[j] * y(j);
      acc += x(i) * rowacc;
    }
    out(k) = acc;
  });
  return out;
}

double weighted_dot(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                    const Eigen::VectorXd& w) {
  double acc = 0.0;
  const long n = a.size();
  for (long p = 0; p < n; ++p) acc += a(p) * b(p) * w(p);
  return acc;
}

}  // namespace benstat
