#pragma once

#include <filesystem>
#include <vector>

#include <Eigen/Dense>

namespace pesel {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Which axis holds the exchangeable samples.
///
/// RowsModel: rows are samples, the mean is a row of column means and the
/// covariance is p x p. ColumnsModel: columns are samples, the mean is a
/// column of row means and the covariance is n x n.
enum class Orientation { RowsModel, ColumnsModel };

/// Dense n x p data, rows = observations, columns = variables.
///
/// Immutable once built; construction rejects empty shapes and non-finite
/// entries.
class DataMatrix {
 public:
  explicit DataMatrix(Matrix values);

  const Matrix& values() const noexcept { return values_; }
  Index rows() const noexcept { return values_.rows(); }
  Index cols() const noexcept { return values_.cols(); }

  bool operator==(const DataMatrix& other) const { return values_ == other.values_; }

 private:
  Matrix values_;
};

/// Descending eigenvalues of the scaled sample covariance.
struct EigenSpectrum {
  std::vector<double> lambdas;
  Orientation orientation = Orientation::RowsModel;
  Index divisor = 0;      // n for RowsModel, p for ColumnsModel
  Index ambient_dim = 0;  // p for RowsModel, n for ColumnsModel
};

/// Eigenvalues below this fraction of the largest one are clamped to zero.
inline constexpr double kEigenvalueFloor = 1e-12;

struct CsvOptions {
  bool has_header = false;
  char delimiter = ',';
};

DataMatrix load_csv(const std::filesystem::path& path, const CsvOptions& options = {});

/// Writes `values` with full round-trip precision, no header.
void write_csv(const std::filesystem::path& path, const Matrix& values);

DataMatrix center(const DataMatrix& x, Orientation orientation);
DataMatrix transpose(const DataMatrix& x);

/// Spectrum of (1/n) Xc^T Xc (RowsModel) or (1/p) Xc Xc^T (ColumnsModel),
/// obtained from the singular values of the centered matrix.
EigenSpectrum covariance_spectrum(const DataMatrix& x, Orientation orientation);

/// Index of the axis holding the samples, and the ambient dimension.
Index sample_count(Index n, Index p, Orientation orientation);
Index ambient_count(Index n, Index p, Orientation orientation);

}  // namespace pesel
