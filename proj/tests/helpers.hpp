#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "pesel/matrix.hpp"

namespace testing {

inline pesel::Matrix gaussian(pesel::Index n, pesel::Index p, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> z;
  pesel::Matrix m(n, p);
  for (pesel::Index i = 0; i < n; ++i)
    for (pesel::Index j = 0; j < p; ++j) m(i, j) = z(gen);
  return m;
}

inline pesel::Matrix random_orthogonal(pesel::Index d, std::uint64_t seed) {
  Eigen::HouseholderQR<pesel::Matrix> qr(gaussian(d, d, seed));
  return qr.householderQ() * pesel::Matrix::Identity(d, d);
}

/// Oracle: eigenvalues of the explicitly formed (1/divisor) covariance, descending.
inline std::vector<double> explicit_covariance_eigenvalues(const pesel::Matrix& x, bool rows_model) {
  const pesel::Matrix s = rows_model ? x : pesel::Matrix(x.transpose());
  const pesel::Matrix c = s.rowwise() - s.colwise().mean();
  const pesel::Matrix cov = c.transpose() * c / static_cast<double>(s.rows());
  Eigen::SelfAdjointEigenSolver<pesel::Matrix> eig(cov);
  std::vector<double> out(eig.eigenvalues().data(), eig.eigenvalues().data() + eig.eigenvalues().size());
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

inline double rel_diff(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("pesel_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path write(const std::string& name, const std::string& content) const {
    const auto p = path_ / name;
    std::ofstream(p, std::ios::binary) << content;
    return p;
  }

 private:
  std::filesystem::path path_;
};

}  // namespace testing
