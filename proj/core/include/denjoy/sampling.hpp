#pragma once

// Random test matrices with controlled conditioning.

#include <random>

#include "denjoy/linalg.hpp"

namespace denjoy::sampling {

// Haar-distributed orthogonal matrix (QR of a Gaussian matrix, sign-fixed).
Matrix random_orthogonal(int k, std::mt19937_64& rng);

// U diag(exp(s)) V^T with U, V random orthogonal and s_i uniform in
// [-log_spread, log_spread]; the condition number is at most exp(2 log_spread).
Matrix random_invertible(int k, std::mt19937_64& rng, double log_spread = 1.5);

// Uniform entries in [-1, 1], resampled until det >= min_det.
Matrix random_positive_2x2(std::mt19937_64& rng, double min_det = 1e-2);

}  // namespace denjoy::sampling
