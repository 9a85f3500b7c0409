#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <stdexcept>
#include <string>

namespace kalda {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using MatrixXd = Matrix<double>;
using VectorXd = Vector<double>;

enum class LabelMode { single, multi };

inline const char* to_string(LabelMode mode) {
  return mode == LabelMode::single ? "single" : "multi";
}

// Error hierarchy. Everything derives from Error so the CLI can map a
// failure onto an exit code with a single catch.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed feature file. line/column are 1-based; 0 means "not applicable".
class DataError : public Error {
 public:
  DataError(const std::string& what, std::size_t line, std::size_t column = 0)
      : Error(format(what, line, column)), line_(line), column_(column) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  static std::string format(const std::string& what, std::size_t line,
                            std::size_t column) {
    std::string out = what;
    if (line > 0) out += " (line " + std::to_string(line);
    if (line > 0 && column > 0) out += ", column " + std::to_string(column);
    if (line > 0) out += ")";
    return out;
  }

  std::size_t line_;
  std::size_t column_;
};

class LabelError : public Error {
 public:
  LabelError(const std::string& what, std::size_t line = 0)
      : Error(line > 0 ? what + " (line " + std::to_string(line) + ")" : what),
        line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

// Tr((G^T St G)^2) vanished: the objective is undefined on this subspace.
class DegenerateSubspace : public Error {
 public:
  using Error::Error;
};

class RankDeficient : public Error {
 public:
  using Error::Error;
};

class DegenerateProblem : public Error {
 public:
  using Error::Error;
};

class Unsupported : public Error {
 public:
  using Error::Error;
};

// A cross-validation fold whose training part lost a class.
class FoldError : public Error {
 public:
  FoldError(std::size_t fold, int class_id)
      : Error("fold " + std::to_string(fold) + " has no training sample of class " +
              std::to_string(class_id)),
        fold_(fold),
        class_id_(class_id) {}

  std::size_t fold() const { return fold_; }
  int class_id() const { return class_id_; }

 private:
  std::size_t fold_;
  int class_id_;
};

namespace detail {

inline void require_dims(bool ok, const std::string& what) {
  if (!ok) throw DimensionError(what);
}

}  // namespace detail

// Tr(A * B) without forming the product.
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar trace_of_product(const Eigen::MatrixBase<DerivedA>& a,
                                           const Eigen::MatrixBase<DerivedB>& b) {
  return a.cwiseProduct(b.transpose()).sum();
}

// Tr(M * M), the reading of "Tr(M)^2" used throughout.
template <typename Derived>
typename Derived::Scalar trace_of_square(const Eigen::MatrixBase<Derived>& m) {
  return trace_of_product(m, m);
}

template <typename Derived>
Matrix<typename Derived::Scalar> symmetrized(const Eigen::MatrixBase<Derived>& m) {
  return (m + m.transpose()) / typename Derived::Scalar(2);
}

// ||G^T G - I||_F
template <typename Derived>
typename Derived::Scalar orthonormality_error(const Eigen::MatrixBase<Derived>& g) {
  using Scalar = typename Derived::Scalar;
  const Matrix<Scalar> gram = g.transpose() * g;
  return (gram - Matrix<Scalar>::Identity(gram.rows(), gram.cols())).norm();
}

// Entrywise 1-norm, sum_ij |M_ij|.
template <typename Derived>
typename Derived::Scalar entrywise_l1(const Eigen::MatrixBase<Derived>& m) {
  return m.cwiseAbs().sum();
}

}  // namespace kalda
