#include "denjoy/sampling.hpp"

namespace denjoy::sampling {

Matrix random_orthogonal(int k, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix g(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) g(i, j) = gauss(rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < k; ++j) {
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  }
  return q;
}

Matrix random_invertible(int k, std::mt19937_64& rng, double log_spread) {
  std::uniform_real_distribution<double> unit(-log_spread, log_spread);
  Vector s(k);
  for (int i = 0; i < k; ++i) s(i) = std::exp(unit(rng));
  return random_orthogonal(k, rng) * s.asDiagonal() * random_orthogonal(k, rng).transpose();
}

Matrix random_positive_2x2(std::mt19937_64& rng, double min_det) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  Matrix a(2, 2);
  do {
    a << unit(rng), unit(rng), unit(rng), unit(rng);
  } while (!(a.determinant() >= min_det));
  return a;
}

}  // namespace denjoy::sampling
