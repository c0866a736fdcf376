#include <algorithm>
#include <string>

#include <Eigen/SVD>

#include "pesel/errors.hpp"
#include "pesel/matrix.hpp"

namespace pesel {

DataMatrix::DataMatrix(Matrix values) : values_(std::move(values)) {
  if (values_.rows() < 1 || values_.cols() < 1) throw IngestError("data matrix must have at least one row and column");
  if (!values_.allFinite()) throw IngestError("data matrix contains non-finite entries");
}

DataMatrix center(const DataMatrix& x, Orientation orientation) {
  const Matrix& v = x.values();
  if (orientation == Orientation::RowsModel) {
    const Eigen::RowVectorXd means = v.colwise().mean();
    return DataMatrix(v.rowwise() - means);
  }
  const Vector means = v.rowwise().mean();
  return DataMatrix(v.colwise() - means);
}

DataMatrix transpose(const DataMatrix& x) { return DataMatrix(x.values().transpose()); }

Index sample_count(Index n, Index p, Orientation orientation) {
  return orientation == Orientation::RowsModel ? n : p;
}

Index ambient_count(Index n, Index p, Orientation orientation) {
  return orientation == Orientation::RowsModel ? p : n;
}

EigenSpectrum covariance_spectrum(const DataMatrix& x, Orientation orientation) {
  // The columns spectrum is the rows spectrum of the transpose; going through
  // the same code path keeps the two bit-identical.
  if (orientation == Orientation::ColumnsModel) {
    auto spectrum = covariance_spectrum(transpose(x), Orientation::RowsModel);
    spectrum.orientation = Orientation::ColumnsModel;
    return spectrum;
  }

  const Matrix centered = center(x, Orientation::RowsModel).values();
  const Index n = centered.rows();
  const Index p = centered.cols();

  Eigen::BDCSVD<Matrix> svd(centered);
  if (svd.info() != Eigen::Success) throw LinAlgError("singular value decomposition failed");
  const Vector& s = svd.singularValues();

  EigenSpectrum out;
  out.orientation = Orientation::RowsModel;
  out.divisor = n;
  out.ambient_dim = p;
  out.lambdas.assign(static_cast<std::size_t>(p), 0.0);
  for (Index j = 0; j < s.size(); ++j) out.lambdas[static_cast<std::size_t>(j)] = s(j) * s(j) / static_cast<double>(n);

  std::sort(out.lambdas.begin(), out.lambdas.end(), std::greater<>());
  const double floor = kEigenvalueFloor * out.lambdas.front();
  for (auto& l : out.lambdas)
    if (l < floor || l < 0.0) l = 0.0;
  return out;
}

}  // namespace pesel
