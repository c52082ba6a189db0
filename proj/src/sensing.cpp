#include "cs/sensing.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <fstream>
#include <map>
#include <mutex>
#include <nlohmann/json.hpp>

#include "cs/errors.hpp"

namespace cs {

namespace {

using Complex = std::complex<double>;

// Process-lifetime FFTW plans, one pair per transform size. Plan creation is
// not thread-safe in FFTW, so it is serialized; fftw_execute_dft on distinct
// arrays is safe, and FFTW_UNALIGNED removes the alignment constraint on the
// per-call buffers. FFTW_ESTIMATE keeps plan creation deterministic.
struct FftPlans {
  fftw_plan fwd = nullptr;
  fftw_plan inv = nullptr;
};

const FftPlans& plans_for(int n) {
  static std::mutex mutex;
  static std::map<int, FftPlans>* cache = new std::map<int, FftPlans>();
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache->find(n);
  if (it == cache->end()) {
    std::vector<Complex> in(n), out(n);
    FftPlans plans;
    plans.fwd = fftw_plan_dft_1d(n, reinterpret_cast<fftw_complex*>(in.data()),
                                 reinterpret_cast<fftw_complex*>(out.data()),
                                 FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans.inv = fftw_plan_dft_1d(n, reinterpret_cast<fftw_complex*>(in.data()),
                                 reinterpret_cast<fftw_complex*>(out.data()),
                                 FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    it = cache->emplace(n, plans).first;
  }
  return it->second;
}

void fft(const FftPlans& plans, bool forward, std::vector<Complex>& in,
         std::vector<Complex>& out) {
  fftw_execute_dft(forward ? plans.fwd : plans.inv,
                   reinterpret_cast<fftw_complex*>(in.data()),
                   reinterpret_cast<fftw_complex*>(out.data()));
}

int mod_index(int j, int i, int n) { return ((j - i) % n + n) % n; }

void check_finite(const Eigen::VectorXd& v, const char* what) {
  if (!v.allFinite()) {
    throw InvalidParameterError(std::string(what) + ": entries must be finite");
  }
}

}  // namespace

SensingOperator::SensingOperator(Circulant data, double scale)
    : data_(std::move(data)), scale_(scale) {
  const auto& c = std::get<Circulant>(data_);
  n_ = c.seed.size();
  m_ = static_cast<int>(c.row_indices.size());
  if (n_ < 1 || m_ < 1 || m_ > n_) {
    throw InvalidDimensionError("SensingOperator: need 1 <= m <= n");
  }
  check_finite(c.seed.entries, "SensingOperator seed");
  int prev = -1;
  for (int idx : c.row_indices) {
    if (idx <= prev || idx >= n_) {
      throw InvalidDimensionError(
          "SensingOperator: row_indices must be strictly increasing in [0, n)");
    }
    prev = idx;
  }
}

SensingOperator::SensingOperator(Dense data, double scale)
    : data_(std::move(data)), scale_(scale) {
  const auto& d = std::get<Dense>(data_);
  m_ = static_cast<int>(d.entries.rows());
  n_ = static_cast<int>(d.entries.cols());
  if (n_ < 1 || m_ < 1 || m_ > n_) {
    throw InvalidDimensionError("SensingOperator: need 1 <= m <= n");
  }
  if (!d.entries.allFinite()) {
    throw InvalidParameterError("SensingOperator: entries must be finite");
  }
}

OperatorKind SensingOperator::kind() const {
  return std::holds_alternative<Circulant>(data_) ? OperatorKind::partial_circulant
                                                  : OperatorKind::dense_random;
}

const SensingOperator::Circulant& SensingOperator::circulant() const {
  return std::get<Circulant>(data_);
}

const SensingOperator::Dense& SensingOperator::dense() const {
  return std::get<Dense>(data_);
}

SeedVector make_seed(Rng& rng, int n, SeedDist dist) {
  if (n < 1) throw InvalidDimensionError("make_seed: n must be >= 1");
  SeedVector seed;
  seed.dist = dist;
  seed.entries.resize(n);
  for (int i = 0; i < n; ++i) {
    seed.entries[i] = dist == SeedDist::gaussian ? rng.gaussian() : rng.pm_one();
  }
  return seed;
}

SensingOperator build_circulant(const SeedVector& seed, int m, RowSelect row_select,
                                Rng* rng, std::optional<double> scale) {
  const int n = seed.size();
  if (m < 1 || m > n) {
    throw InvalidDimensionError("build_circulant: need 1 <= m <= N, got m=" +
                                std::to_string(m) + ", N=" + std::to_string(n));
  }
  SensingOperator::Circulant data;
  data.seed = seed;
  if (row_select == RowSelect::first_m) {
    data.row_indices.resize(m);
    for (int i = 0; i < m; ++i) data.row_indices[i] = i;
  } else {
    if (rng == nullptr) {
      throw InvalidParameterError("build_circulant: random row selection needs an rng");
    }
    data.row_indices = rng->sample_without_replacement(n, m);
  }
  return SensingOperator(std::move(data), scale.value_or(1.0 / std::sqrt(double(m))));
}

SensingOperator build_dense_random(Rng& rng, int m, int n, SeedDist dist,
                                   std::optional<double> scale) {
  if (m < 1 || n < 1 || m > n) {
    throw InvalidDimensionError("build_dense_random: need 1 <= m <= n, got m=" +
                                std::to_string(m) + ", n=" + std::to_string(n));
  }
  SensingOperator::Dense data;
  data.entries.resize(m, n);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      data.entries(i, j) = dist == SeedDist::gaussian ? rng.gaussian() : rng.pm_one();
    }
  }
  return SensingOperator(std::move(data), scale.value_or(1.0 / std::sqrt(double(m))));
}

Eigen::VectorXd apply(const SensingOperator& op, const Eigen::VectorXd& x) {
  if (x.size() != op.cols()) {
    throw InvalidDimensionError("apply: signal length " + std::to_string(x.size()) +
                                " != operator columns " + std::to_string(op.cols()));
  }
  if (op.kind() == OperatorKind::dense_random) {
    return op.scale() * (op.dense().entries * x);
  }
  // Fast path: (M_c x)_i = sum_j c[(j-i) mod N] x_j is the circular
  // cross-correlation of x with c, i.e. IDFT(conj(C) .* X).
  const auto& circ = op.circulant();
  const int n = op.cols();
  const auto& plans = plans_for(n);
  std::vector<Complex> buf(n), c_hat(n), x_hat(n);
  for (int i = 0; i < n; ++i) buf[i] = circ.seed.entries[i];
  fft(plans, true, buf, c_hat);
  for (int i = 0; i < n; ++i) buf[i] = x[i];
  fft(plans, true, buf, x_hat);
  for (int i = 0; i < n; ++i) buf[i] = std::conj(c_hat[i]) * x_hat[i];
  fft(plans, false, buf, x_hat);
  Eigen::VectorXd out(op.rows());
  const double norm = op.scale() / n;
  for (int r = 0; r < op.rows(); ++r) {
    out[r] = norm * x_hat[circ.row_indices[r]].real();
  }
  return out;
}

MeasurementVector apply(const SensingOperator& op, const SparseSignal& s) {
  return MeasurementVector{apply(op, s.values), std::nullopt};
}

Eigen::VectorXd adjoint_apply(const SensingOperator& op, const Eigen::VectorXd& y) {
  if (y.size() != op.rows()) {
    throw InvalidDimensionError("adjoint_apply: vector length " +
                                std::to_string(y.size()) + " != operator rows " +
                                std::to_string(op.rows()));
  }
  if (op.kind() == OperatorKind::dense_random) {
    return op.scale() * (op.dense().entries.transpose() * y);
  }
  // (M_c^T y)_j = sum_r c[(j - i_r) mod N] y_r: scatter y onto the selected
  // rows, then circular convolution with c, i.e. IDFT(C .* W).
  const auto& circ = op.circulant();
  const int n = op.cols();
  const auto& plans = plans_for(n);
  std::vector<Complex> buf(n), c_hat(n), w_hat(n);
  for (int i = 0; i < n; ++i) buf[i] = circ.seed.entries[i];
  fft(plans, true, buf, c_hat);
  std::fill(buf.begin(), buf.end(), Complex(0.0, 0.0));
  for (int r = 0; r < op.rows(); ++r) buf[circ.row_indices[r]] = y[r];
  fft(plans, true, buf, w_hat);
  for (int i = 0; i < n; ++i) buf[i] = c_hat[i] * w_hat[i];
  fft(plans, false, buf, w_hat);
  Eigen::VectorXd out(n);
  const double norm = op.scale() / n;
  for (int j = 0; j < n; ++j) out[j] = norm * w_hat[j].real();
  return out;
}

Eigen::VectorXd adjoint_apply(const SensingOperator& op, const MeasurementVector& y) {
  return adjoint_apply(op, y.values);
}

Eigen::MatrixXd to_dense(const SensingOperator& op) {
  const long long elements = 1ll * op.rows() * op.cols();
  if (elements > 10'000'000ll) {
    throw ResourceLimitError("to_dense: " + std::to_string(elements) +
                             " elements exceeds the 1e7 guard");
  }
  if (op.kind() == OperatorKind::dense_random) {
    return op.scale() * op.dense().entries;
  }
  const auto& circ = op.circulant();
  const int n = op.cols();
  Eigen::MatrixXd out(op.rows(), n);
  for (int r = 0; r < op.rows(); ++r) {
    const int i = circ.row_indices[r];
    for (int j = 0; j < n; ++j) {
      out(r, j) = op.scale() * circ.seed.entries[mod_index(j, i, n)];
    }
  }
  return out;
}

Eigen::MatrixXd extract_columns(const SensingOperator& op, std::span<const int> columns) {
  Eigen::MatrixXd out(op.rows(), static_cast<int>(columns.size()));
  if (op.kind() == OperatorKind::dense_random) {
    for (int c = 0; c < static_cast<int>(columns.size()); ++c) {
      out.col(c) = op.scale() * op.dense().entries.col(columns[c]);
    }
    return out;
  }
  const auto& circ = op.circulant();
  const int n = op.cols();
  for (int c = 0; c < static_cast<int>(columns.size()); ++c) {
    const int j = columns[c];
    for (int r = 0; r < op.rows(); ++r) {
      out(r, c) = op.scale() * circ.seed.entries[mod_index(j, circ.row_indices[r], n)];
    }
  }
  return out;
}

std::string operator_to_json(const SensingOperator& op) {
  nlohmann::json j;
  j["n"] = op.cols();
  j["m"] = op.rows();
  j["scale"] = op.scale();
  if (op.rng_seed) {
    j["rng_seed"] = *op.rng_seed;
  } else {
    j["rng_seed"] = nullptr;
  }
  if (op.kind() == OperatorKind::partial_circulant) {
    const auto& circ = op.circulant();
    j["kind"] = "partial_circulant";
    j["seed_entries"] = std::vector<double>(
        circ.seed.entries.data(), circ.seed.entries.data() + circ.seed.size());
    j["seed_dist"] = circ.seed.dist == SeedDist::gaussian ? "gaussian" : "bernoulli";
    j["row_indices"] = circ.row_indices;
  } else {
    const auto& d = op.dense().entries;
    j["kind"] = "dense_random";
    std::vector<std::vector<double>> rows(d.rows());
    for (int i = 0; i < d.rows(); ++i) {
      rows[i].assign(d.row(i).begin(), d.row(i).end());
    }
    j["dense_entries"] = rows;
  }
  return j.dump(2);
}

SensingOperator operator_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  const double scale = j.at("scale").get<double>();
  std::optional<std::uint64_t> rng_seed;
  if (j.contains("rng_seed") && !j["rng_seed"].is_null()) {
    rng_seed = j["rng_seed"].get<std::uint64_t>();
  }
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "partial_circulant") {
    SensingOperator::Circulant data;
    const auto entries = j.at("seed_entries").get<std::vector<double>>();
    data.seed.entries = Eigen::Map<const Eigen::VectorXd>(
        entries.data(), static_cast<Eigen::Index>(entries.size()));
    data.seed.dist = j.at("seed_dist").get<std::string>() == "bernoulli"
                         ? SeedDist::bernoulli
                         : SeedDist::gaussian;
    data.row_indices = j.at("row_indices").get<std::vector<int>>();
    SensingOperator op(std::move(data), scale);
    op.rng_seed = rng_seed;
    return op;
  }
  if (kind != "dense_random") {
    throw InvalidParameterError("operator_from_json: unknown kind '" + kind + "'");
  }
  const auto rows = j.at("dense_entries").get<std::vector<std::vector<double>>>();
  SensingOperator::Dense data;
  data.entries.resize(static_cast<int>(rows.size()),
                      rows.empty() ? 0 : static_cast<int>(rows[0].size()));
  for (int i = 0; i < static_cast<int>(rows.size()); ++i) {
    if (static_cast<int>(rows[i].size()) != data.entries.cols()) {
      throw InvalidParameterError("operator_from_json: ragged dense_entries");
    }
    for (int c = 0; c < data.entries.cols(); ++c) data.entries(i, c) = rows[i][c];
  }
  SensingOperator op(std::move(data), scale);
  op.rng_seed = rng_seed;
  return op;
}

void save_operator(const std::string& path, const SensingOperator& op) {
  std::ofstream file(path);
  if (!file) throw IoError("cannot open for writing", path);
  file << operator_to_json(op) << '\n';
  if (!file) throw IoError("write failed", path);
}

SensingOperator load_operator(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw IoError("cannot open for reading", path);
  std::string text((std::istreambuf_iterator<char>(file)),
                   std::istreambuf_iterator<char>());
  return operator_from_json(text);
}

}  // namespace cs
