#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>

#include "bilex/embedding.hpp"
#include "bilex/error.hpp"
#include "bilex/lexicon.hpp"
#include "bilex/util.hpp"

namespace bilex {

template <typename Scalar>
using DenseMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

// x (d_src) -> W x (d_tgt), fitted under a ridge penalty gamma.
template <typename Scalar>
struct LinearMap {
  DenseMatrix<Scalar> matrix;  // d_tgt x d_src
  Scalar gamma = Scalar(0);
  std::size_t fitted_on = 0;

  Eigen::Index source_dim() const { return matrix.cols(); }
  Eigen::Index target_dim() const { return matrix.rows(); }
};

enum class FitMethod { closed_form, gradient };

struct GradientOptions {
  double tolerance = 1e-10;  // on ||grad||_F relative to ||Y X^T||_F
  std::size_t max_iterations = 200000;
};

// sum_i ||W x_i - y_i||^2 + gamma ||W||_F^2 with samples as columns of X, Y.
template <typename Scalar>
Scalar ridge_objective(const DenseMatrix<Scalar>& W, const DenseMatrix<Scalar>& X, const DenseMatrix<Scalar>& Y,
                       Scalar gamma) {
  return (W * X - Y).squaredNorm() + gamma * W.squaredNorm();
}

namespace detail {

template <typename Scalar>
Scalar largest_eigenvalue(const DenseMatrix<Scalar>& A) {
  Vector<Scalar> v = Vector<Scalar>::Ones(A.rows()).normalized();
  Scalar lambda = Scalar(0);
  for (int it = 0; it < 500; ++it) {
    Vector<Scalar> w = A * v;
    const Scalar norm = w.norm();
    if (norm == Scalar(0)) return Scalar(0);
    const Scalar next = v.dot(w);
    v = w / norm;
    if (std::abs(next - lambda) <= Scalar(1e-12) * std::abs(next)) return next;
    lambda = next;
  }
  return lambda;
}

}  // namespace detail

// X is d_src x N, Y is d_tgt x N. Closed form solves
// W (X X^T + gamma I) = Y X^T by an LDL^T factorization; gradient runs full-batch descent
// on the same objective with step 1/L.
template <typename Scalar>
LinearMap<Scalar> fit_linear_map(const DenseMatrix<Scalar>& X, const DenseMatrix<Scalar>& Y, Scalar gamma,
                                 FitMethod method = FitMethod::closed_form, const GradientOptions& gd = {}) {
  if (X.cols() < 1) throw ParameterError("fit_linear_map needs at least one pair");
  if (X.cols() != Y.cols()) throw ParameterError("fit_linear_map: X and Y have different pair counts");
  if (X.rows() < 1 || Y.rows() < 1) throw ParameterError("fit_linear_map: empty vectors");
  if (!(gamma >= Scalar(0))) throw ParameterError("gamma must be >= 0");
  if (!X.allFinite() || !Y.allFinite()) throw ParameterError("fit_linear_map: non-finite input");

  const Eigen::Index d_src = X.rows();
  DenseMatrix<Scalar> A = X * X.transpose();
  A.diagonal().array() += gamma;
  const DenseMatrix<Scalar> B = Y * X.transpose();

  // LDL^T needs no square roots, so small hand cases solve exactly
  Eigen::LDLT<DenseMatrix<Scalar>> ldlt(A);
  bool singular = ldlt.info() != Eigen::Success || !ldlt.isPositive();
  if (!singular) {
    const auto diag = ldlt.vectorD();
    const Scalar eps = std::numeric_limits<Scalar>::epsilon();
    singular = diag.minCoeff() <= eps * static_cast<Scalar>(d_src) * diag.maxCoeff();
  }
  if (singular) {
    throw SingularityError("X X^T + gamma I is singular (gamma = " + std::to_string(static_cast<double>(gamma)) +
                           "); use gamma > 0 or more independent pairs");
  }

  LinearMap<Scalar> map;
  map.gamma = gamma;
  map.fitted_on = static_cast<std::size_t>(X.cols());
  if (method == FitMethod::closed_form) {
    map.matrix = ldlt.solve(B.transpose()).transpose();
    return map;
  }

  // gradient of the objective is 2 (W A - B); Lipschitz constant 2 lambda_max(A)
  const Scalar step = Scalar(1) / (Scalar(2) * detail::largest_eigenvalue(A));
  const Scalar scale = std::max(Scalar(1), B.norm());
  DenseMatrix<Scalar> W = DenseMatrix<Scalar>::Zero(Y.rows(), d_src);
  for (std::size_t it = 0; it < gd.max_iterations; ++it) {
    const DenseMatrix<Scalar> grad = Scalar(2) * (W * A - B);
    if (grad.norm() <= static_cast<Scalar>(gd.tolerance) * scale) break;
    W -= step * grad;
  }
  map.matrix = std::move(W);
  return map;
}

template <typename Scalar, typename Derived>
Vector<Scalar> apply_map(const LinearMap<Scalar>& map, const Eigen::MatrixBase<Derived>& x) {
  if (x.size() != map.source_dim()) {
    throw ParameterError("apply_map: vector has dimension " + std::to_string(x.size()) + ", map expects " +
                         std::to_string(map.source_dim()));
  }
  return map.matrix * x.template cast<Scalar>();
}

// Header "d_tgt d_src gamma", then d_tgt rows of d_src values.
template <typename Scalar>
void write_map(const LinearMap<Scalar>& map, const std::filesystem::path& path) {
  write_file_atomic(path, [&](std::ostream& out) {
    out << map.target_dim() << ' ' << map.source_dim() << ' ' << format_double(static_cast<double>(map.gamma)) << '\n';
    for (Eigen::Index i = 0; i < map.target_dim(); ++i) {
      for (Eigen::Index j = 0; j < map.source_dim(); ++j) {
        out << (j ? " " : "") << format_double(static_cast<double>(map.matrix(i, j)));
      }
      out << '\n';
    }
  });
}

template <typename Scalar>
LinearMap<Scalar> read_map(const std::filesystem::path& path) {
  const auto lines = read_lines(path);
  if (lines.empty()) throw FormatError(path.string() + ": missing header");
  const auto head = split(trim(lines[0]), ' ');
  if (head.size() != 3) throw FormatError(path.string() + ": header must be 'd_tgt d_src gamma'");
  const long long rows = parse_int(head[0], "d_tgt");
  const long long cols = parse_int(head[1], "d_src");
  if (rows <= 0 || cols <= 0) throw FormatError(path.string() + ": invalid dimensions");
  if (static_cast<long long>(lines.size()) != rows + 1) throw FormatError(path.string() + ": wrong row count");
  LinearMap<Scalar> map;
  map.gamma = static_cast<Scalar>(parse_double(head[2], "gamma"));
  map.matrix.resize(rows, cols);
  for (long long i = 0; i < rows; ++i) {
    const auto cells = split(trim(lines[static_cast<std::size_t>(i + 1)]), ' ');
    if (static_cast<long long>(cells.size()) != cols) throw FormatError(path.string() + ": wrong row width");
    for (long long j = 0; j < cols; ++j) {
      map.matrix(i, j) = static_cast<Scalar>(parse_double(cells[static_cast<std::size_t>(j)], "map entry"));
    }
  }
  if (!map.matrix.allFinite()) throw FormatError(path.string() + ": non-finite map entry");
  return map;
}

template <typename Scalar>
struct TrainingPairs {
  DenseMatrix<Scalar> X;  // d_src x N
  DenseMatrix<Scalar> Y;  // d_tgt x N
  std::size_t skipped = 0;
};

// Stacks (source vector, target vector) columns for lexicon entries found in
// both embeddings; tokens are looked up as "src_tag:token" / "tgt_tag:token".
// Requires at least max(d_src, 10) surviving pairs.
template <typename Scalar, typename EmbScalar>
TrainingPairs<Scalar> lexicon_pairs(const SeedLexicon& lexicon, const EmbeddingMatrix<EmbScalar>& src_emb,
                                    const std::string& src_tag, const EmbeddingMatrix<EmbScalar>& tgt_emb,
                                    const std::string& tgt_tag) {
  std::vector<std::pair<Eigen::Index, Eigen::Index>> rows;
  std::size_t skipped = 0;
  for (const auto& e : lexicon.entries) {
    const auto s = src_emb.index_of(src_tag + ":" + e.src);
    const auto t = tgt_emb.index_of(tgt_tag + ":" + e.tgt);
    if (s && t) rows.emplace_back(*s, *t);
    else ++skipped;
  }
  const auto needed = static_cast<std::size_t>(std::max<Eigen::Index>(src_emb.dim(), 10));
  if (rows.size() < needed) {
    throw DataInsufficiencyError("only " + std::to_string(rows.size()) + " seed pairs found in both embeddings (" +
                                 std::to_string(skipped) + " skipped); need at least " + std::to_string(needed));
  }
  TrainingPairs<Scalar> out;
  out.skipped = skipped;
  out.X.resize(src_emb.dim(), static_cast<Eigen::Index>(rows.size()));
  out.Y.resize(tgt_emb.dim(), static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.X.col(static_cast<Eigen::Index>(i)) = src_emb.vectors().row(rows[i].first).transpose().template cast<Scalar>();
    out.Y.col(static_cast<Eigen::Index>(i)) = tgt_emb.vectors().row(rows[i].second).transpose().template cast<Scalar>();
  }
  return out;
}

}  // namespace bilex
