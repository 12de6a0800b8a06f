#pragma once

#include <Eigen/Dense>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <type_traits>
#include <unordered_map>
#include <vector>

#include "bilex/error.hpp"
#include "bilex/util.hpp"

namespace bilex {

template <typename Scalar>
using RowMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

// Token -> d-dimensional vectors. `vectors` are the published embeddings
// (skip-gram input vectors); `context` holds the output parameters and is
// empty for embeddings read back from disk.
template <typename Scalar>
class EmbeddingMatrix {
 public:
  using Matrix = RowMatrix<Scalar>;

  EmbeddingMatrix() = default;
  EmbeddingMatrix(std::vector<std::string> vocab, Matrix vectors, Matrix context = Matrix())
      : vocab_(std::move(vocab)), vectors_(std::move(vectors)), context_(std::move(context)) {
    if (static_cast<Eigen::Index>(vocab_.size()) != vectors_.rows()) {
      throw ParameterError("embedding: vocabulary size does not match row count");
    }
    if (context_.size() != 0 && (context_.rows() != vectors_.rows() || context_.cols() != vectors_.cols())) {
      throw ParameterError("embedding: context matrix shape mismatch");
    }
    index_.reserve(vocab_.size());
    for (std::size_t i = 0; i < vocab_.size(); ++i) {
      if (!index_.emplace(vocab_[i], static_cast<Eigen::Index>(i)).second) {
        throw ParameterError("embedding: duplicate token " + vocab_[i]);
      }
    }
  }

  Eigen::Index size() const { return vectors_.rows(); }
  Eigen::Index dim() const { return vectors_.cols(); }
  const std::vector<std::string>& vocab() const { return vocab_; }
  const std::string& token(Eigen::Index i) const { return vocab_[static_cast<std::size_t>(i)]; }

  std::optional<Eigen::Index> index_of(std::string_view token) const {
    if (auto it = index_.find(std::string(token)); it != index_.end()) return it->second;
    return std::nullopt;
  }

  const Matrix& vectors() const { return vectors_; }
  Matrix& vectors() { return vectors_; }
  const Matrix& context() const { return context_; }
  Matrix& context() { return context_; }

  template <typename Other>
  EmbeddingMatrix<Other> cast() const {
    return EmbeddingMatrix<Other>(vocab_, vectors_.template cast<Other>(), context_.template cast<Other>());
  }

 private:
  std::vector<std::string> vocab_;
  Matrix vectors_;
  Matrix context_;
  std::unordered_map<std::string, Eigen::Index> index_;
};

// Text format: "<count> <dim>" header, then "token v1 ... vd" with 9
// significant digits.
template <typename Scalar>
void write_embeddings(const EmbeddingMatrix<Scalar>& emb, const std::filesystem::path& path) {
  write_file_atomic(path, [&](std::ostream& out) {
    out << emb.size() << ' ' << emb.dim() << '\n';
    char buf[32];
    for (Eigen::Index i = 0; i < emb.size(); ++i) {
      out << emb.token(i);
      for (Eigen::Index j = 0; j < emb.dim(); ++j) {
        std::snprintf(buf, sizeof(buf), " %.9g", static_cast<double>(emb.vectors()(i, j)));
        out << buf;
      }
      out << '\n';
    }
  });
}

template <typename Scalar>
EmbeddingMatrix<Scalar> read_embeddings(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw FormatError(path.string() + ": missing header");
  const auto head = split(trim(line), ' ');
  if (head.size() != 2) throw FormatError(path.string() + ": header must be '<count> <dim>'");
  const long long count = parse_int(head[0], "embedding count");
  const long long dim = parse_int(head[1], "embedding dim");
  if (count < 0 || dim <= 0) throw FormatError(path.string() + ": invalid header");
  std::vector<std::string> vocab;
  vocab.reserve(static_cast<std::size_t>(count));
  RowMatrix<Scalar> vectors(count, dim);
  for (long long i = 0; i < count; ++i) {
    if (!std::getline(in, line)) throw FormatError(path.string() + ": truncated at entry " + std::to_string(i));
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto cols = split(line, ' ');
    if (static_cast<long long>(cols.size()) != dim + 1) {
      throw FormatError(path.string() + ": entry " + std::to_string(i) + " has wrong width");
    }
    vocab.push_back(cols[0]);
    for (long long j = 0; j < dim; ++j) {
      const auto& cell = cols[static_cast<std::size_t>(j + 1)];
      if constexpr (std::is_same_v<Scalar, float>) {
        vectors(i, j) = parse_float(cell, "embedding value");
      } else {
        vectors(i, j) = static_cast<Scalar>(parse_double(cell, "embedding value"));
      }
    }
  }
  if (!vectors.allFinite()) throw FormatError(path.string() + ": non-finite embedding value");
  return EmbeddingMatrix<Scalar>(std::move(vocab), std::move(vectors));
}

}  // namespace bilex
