#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <string>
#include <vector>

#include "bilex/embedding.hpp"
#include "bilex/error.hpp"
#include "bilex/util.hpp"

namespace bilex {

struct PlotPoint {
  std::string token;
  double x;
  double y;
};

// Mean-centers the rows and projects them onto the two leading principal
// directions. Each direction's sign is fixed so its largest-magnitude
// component is positive.
template <typename Derived>
Eigen::MatrixX2d pca_2d(const Eigen::MatrixBase<Derived>& rows) {
  if (rows.rows() < 3) throw ParameterError("pca_2d needs at least 3 points");
  if (rows.cols() < 1) throw ParameterError("pca_2d needs non-empty vectors");
  const Eigen::MatrixXd data = rows.template cast<double>();
  const Eigen::MatrixXd centered = data.rowwise() - data.colwise().mean();
  const Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(data.rows() - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  if (eig.info() != Eigen::Success) throw NumericError("pca_2d: eigendecomposition failed");
  Eigen::MatrixXd basis(data.cols(), 2);
  basis.setZero();
  const Eigen::Index d = data.cols();
  for (Eigen::Index k = 0; k < std::min<Eigen::Index>(2, d); ++k) {
    Eigen::VectorXd v = eig.eigenvectors().col(d - 1 - k);
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0) v = -v;
    basis.col(k) = v;
  }
  Eigen::MatrixX2d coords = centered * basis;
  // remove rounding drift so each column is centered to machine precision
  coords.rowwise() -= coords.colwise().mean();
  return coords;
}

template <typename Scalar>
std::vector<PlotPoint> export_plot(const EmbeddingMatrix<Scalar>& emb, const std::vector<std::string>& tokens) {
  std::vector<std::string> found;
  std::vector<Eigen::Index> idx;
  for (const auto& t : tokens) {
    if (auto i = emb.index_of(t)) {
      found.push_back(t);
      idx.push_back(*i);
    }
  }
  if (found.size() < 3) {
    throw ParameterError("export_plot: only " + std::to_string(found.size()) + " of the requested tokens are in the embedding; need 3");
  }
  Eigen::MatrixXd rows(static_cast<Eigen::Index>(idx.size()), emb.dim());
  for (std::size_t i = 0; i < idx.size(); ++i)
    rows.row(static_cast<Eigen::Index>(i)) = emb.vectors().row(idx[i]).template cast<double>();
  const Eigen::MatrixX2d coords = pca_2d(rows);
  std::vector<PlotPoint> out;
  for (std::size_t i = 0; i < found.size(); ++i) {
    out.push_back({found[i], coords(static_cast<Eigen::Index>(i), 0), coords(static_cast<Eigen::Index>(i), 1)});
  }
  return out;
}

inline void write_plot(const std::vector<PlotPoint>& points, const std::filesystem::path& path) {
  write_file_atomic(path, [&](std::ostream& out) {
    for (const auto& p : points) out << p.token << '\t' << format_double(p.x) << '\t' << format_double(p.y) << '\n';
  });
}

}  // namespace bilex
