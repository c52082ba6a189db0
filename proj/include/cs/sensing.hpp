#ifndef CS_SENSING_HPP
#define CS_SENSING_HPP

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "cs/rng.hpp"
#include "cs/signals.hpp"

namespace cs {

enum class SeedDist { gaussian, bernoulli };

/// Generator vector c = (c_0, ..., c_{N-1}) of a circulant operator.
struct SeedVector {
  Eigen::VectorXd entries;
  SeedDist dist = SeedDist::gaussian;

  int size() const { return static_cast<int>(entries.size()); }
};

enum class RowSelect { first_m, random };

enum class OperatorKind { partial_circulant, dense_random };

/// M x N linear measurement map. Two concrete kinds:
///
///   partial_circulant: M selected rows of the N x N circulant matrix with
///                      entry (i, j) = c[(j - i) mod N]; only the seed and
///                      the row indices are stored, and apply/adjoint_apply
///                      run through an FFT-based circular convolution in
///                      O(N log N).
///   dense_random:      explicit M x N matrix of iid draws.
///
/// `scale` multiplies every output (default 1/sqrt(M) at build time).
/// Operators are immutable after construction; apply and adjoint_apply are
/// pure and safe for concurrent callers.
class SensingOperator {
public:
  struct Circulant {
    SeedVector seed;
    std::vector<int> row_indices;  // strictly increasing, in [0, n)
  };
  struct Dense {
    Eigen::MatrixXd entries;  // unscaled draws
  };

  SensingOperator(Circulant data, double scale);
  SensingOperator(Dense data, double scale);

  OperatorKind kind() const;
  int rows() const { return m_; }
  int cols() const { return n_; }
  double scale() const { return scale_; }

  const Circulant& circulant() const;
  const Dense& dense() const;

  /// Construction-provenance seed, carried for experiment reproducibility.
  std::optional<std::uint64_t> rng_seed;

private:
  std::variant<Circulant, Dense> data_;
  int m_ = 0;
  int n_ = 0;
  double scale_ = 1.0;
};

/// n iid draws from dist (gaussian: N(0,1); bernoulli: +-1 equiprobable).
SeedVector make_seed(Rng& rng, int n, SeedDist dist);

/// Partial circulant operator over the selected rows. The default scale is
/// 1/sqrt(m); pass `scale` to override (e.g. 1 for the unnormalized
/// pattern). `rng` is required for RowSelect::random.
SensingOperator build_circulant(const SeedVector& seed, int m, RowSelect row_select,
                                Rng* rng = nullptr,
                                std::optional<double> scale = std::nullopt);

/// M x N iid matrix scaled by 1/sqrt(m) (overridable).
SensingOperator build_dense_random(Rng& rng, int m, int n, SeedDist dist,
                                   std::optional<double> scale = std::nullopt);

/// y = op * x. The circulant kind uses the FFT path and agrees with the
/// dense product to 1e-10 relative.
Eigen::VectorXd apply(const SensingOperator& op, const Eigen::VectorXd& x);
MeasurementVector apply(const SensingOperator& op, const SparseSignal& s);

/// op^T * y; satisfies <apply(op,x), y> = <x, adjoint_apply(op,y)>.
Eigen::VectorXd adjoint_apply(const SensingOperator& op, const Eigen::VectorXd& y);
Eigen::VectorXd adjoint_apply(const SensingOperator& op, const MeasurementVector& y);

/// Explicit M x N matrix; guarded at m*n <= 10^7 elements.
Eigen::MatrixXd to_dense(const SensingOperator& op);

/// Copies the scaled columns named by `columns` into an M x |columns|
/// matrix. Solver support; no materialization guard beyond the output size.
Eigen::MatrixXd extract_columns(const SensingOperator& op, std::span<const int> columns);

/// Structured-text (JSON) record {kind, n, m, seed or dense entries,
/// row_indices, scale, rng_seed} for experiment reproducibility.
std::string operator_to_json(const SensingOperator& op);
SensingOperator operator_from_json(const std::string& text);
void save_operator(const std::string& path, const SensingOperator& op);
SensingOperator load_operator(const std::string& path);

}  // namespace cs

#endif  // CS_SENSING_HPP
