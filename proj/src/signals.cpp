#include "cs/signals.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "cs/errors.hpp"

namespace cs {

namespace {

double draw_amplitude(Rng& rng, const AmplitudeSpec& spec) {
  switch (spec.kind) {
    case AmplitudeSpec::Kind::pm_one:
      return rng.pm_one();
    case AmplitudeSpec::Kind::gaussian:
      return rng.gaussian();
    case AmplitudeSpec::Kind::uniform:
      return rng.uniform(spec.lo, spec.hi);
  }
  return 0.0;
}

}  // namespace

SparseSignal generate_spikes(Rng& rng, int n, int k, const AmplitudeSpec& amplitude) {
  if (n < 0 || k < 0 || k > n) {
    throw InvalidSparsityError("generate_spikes: need 0 <= k <= n, got k=" +
                               std::to_string(k) + ", n=" + std::to_string(n));
  }
  SparseSignal s;
  s.n = n;
  s.k = k;
  s.values = Eigen::VectorXd::Zero(n);
  s.true_support = rng.sample_without_replacement(n, k);
  for (int idx : *s.true_support) {
    double v = draw_amplitude(rng, amplitude);
    while (v == 0.0) v = draw_amplitude(rng, amplitude);  // support must be nonzero
    s.values[idx] = v;
  }
  return s;
}

MeasurementVector add_awgn(Rng& rng, const MeasurementVector& clean, double sigma) {
  if (sigma < 0.0) {
    throw InvalidParameterError("add_awgn: sigma must be >= 0, got " +
                                std::to_string(sigma));
  }
  MeasurementVector out;
  out.noise_sigma = sigma;
  if (sigma == 0.0) {
    out.values = clean.values;
    return out;
  }
  out.values = clean.values;
  for (Eigen::Index i = 0; i < out.values.size(); ++i) {
    out.values[i] += sigma * rng.gaussian();
  }
  return out;
}

void write_signal_columns(const std::string& path, const Eigen::VectorXd& values) {
  std::ofstream file(path);
  if (!file) throw IoError("cannot open for writing", path);
  char line[64];
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    std::snprintf(line, sizeof(line), "%lld %.17g\n", static_cast<long long>(i),
                  values[i]);
    file << line;
  }
  if (!file) throw IoError("write failed", path);
}

Eigen::VectorXd read_signal_columns(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw IoError("cannot open for reading", path);
  std::vector<double> entries;
  std::string line;
  while (std::getline(file, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream in(line);
    long long index = 0;
    double value = 0.0;
    if (!(in >> index >> value)) throw IoError("malformed signal line", path);
    entries.push_back(value);
  }
  return Eigen::Map<Eigen::VectorXd>(entries.data(),
                                     static_cast<Eigen::Index>(entries.size()));
}

}  // namespace cs
