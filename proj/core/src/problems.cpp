#include "absaga/problems.hpp"

#include <cmath>
#include <fstream>
#include <mutex>
#include <optional>
#include <sstream>

#include "absaga/errors.hpp"
#include "absaga/rng.hpp"

namespace absaga {

namespace {

double sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  double e = std::exp(t);
  return e / (1.0 + e);
}

double softplus(double t) {
  if (t > 0.0) return t + std::log1p(std::exp(-t));
  return std::log1p(std::exp(t));
}

}  // namespace

struct FiniteSumProblem::OptimumCache {
  std::mutex mutex;
  std::optional<Eigen::VectorXd> value;
};

FiniteSumProblem FiniteSumProblem::quadratic(std::vector<Eigen::MatrixXd> targets) {
  require(!targets.empty(), errc::invalid_argument, "quadratic problem needs at least one node");
  FiniteSumProblem prob;
  prob.kind_ = ProblemKind::quadratic;
  prob.n_ = static_cast<int>(targets.size());
  prob.p_ = static_cast<int>(targets[0].cols());
  for (const auto& t : targets) {
    require(t.rows() >= 1, errc::invalid_argument, "every node needs at least one component");
    require(t.cols() == prob.p_, errc::invalid_argument, "target dimension mismatch");
  }
  prob.data_ = std::move(targets);
  prob.optimum_cache_ = std::make_shared<OptimumCache>();
  return prob;
}

FiniteSumProblem FiniteSumProblem::logistic(std::vector<Eigen::MatrixXd> features,
                                            std::vector<Eigen::VectorXd> labels, double lambda) {
  require(!features.empty(), errc::invalid_argument, "logistic problem needs at least one node");
  require(features.size() == labels.size(), errc::invalid_argument,
          "features/labels node count mismatch");
  require(lambda > 0.0, errc::invalid_argument,
          "logistic problem needs lambda > 0 for strong convexity");
  FiniteSumProblem prob;
  prob.kind_ = ProblemKind::logistic;
  prob.n_ = static_cast<int>(features.size());
  prob.p_ = static_cast<int>(features[0].cols());
  for (std::size_t i = 0; i < features.size(); ++i) {
    require(features[i].rows() >= 1, errc::invalid_argument,
            "every node needs at least one component");
    require(features[i].cols() == prob.p_, errc::invalid_argument, "feature dimension mismatch");
    require(labels[i].size() == features[i].rows(), errc::invalid_argument,
            "labels size mismatch at node " + std::to_string(i));
    for (int j = 0; j < labels[i].size(); ++j)
      require(labels[i](j) == 1.0 || labels[i](j) == -1.0, errc::invalid_argument,
              "labels must be -1 or +1");
  }
  prob.data_ = std::move(features);
  prob.labels_ = std::move(labels);
  prob.lambda_ = lambda;
  prob.optimum_cache_ = std::make_shared<OptimumCache>();
  return prob;
}

int FiniteSumProblem::components(int i) const {
  require(i >= 0 && i < n_, errc::invalid_argument, "node index out of range");
  return static_cast<int>(data_[i].rows());
}

long long FiniteSumProblem::total_components() const {
  long long total = 0;
  for (const auto& d : data_) total += d.rows();
  return total;
}

int FiniteSumProblem::max_components() const {
  int m = 0;
  for (const auto& d : data_) m = std::max(m, static_cast<int>(d.rows()));
  return m;
}

int FiniteSumProblem::min_components() const {
  int m = components(0);
  for (const auto& d : data_) m = std::min(m, static_cast<int>(d.rows()));
  return m;
}

void FiniteSumProblem::check_indices(int i, int j) const {
  require(i >= 0 && i < n_, errc::invalid_argument, "node index out of range");
  require(j >= 0 && j < data_[i].rows(), errc::invalid_argument, "component index out of range");
}

void FiniteSumProblem::component_gradient_into(const Eigen::VectorXd& x, int i, int j,
                                               Eigen::VectorXd& out) const {
  check_indices(i, j);
  if (kind_ == ProblemKind::quadratic) {
    out = x - data_[i].row(j).transpose();
    return;
  }
  double y = labels_[i](j);
  double t = y * data_[i].row(j).dot(x);
  double s = sigmoid(-t);
  out = (-y * s) * data_[i].row(j).transpose() + lambda_ * x;
}

Eigen::VectorXd FiniteSumProblem::component_gradient(const Eigen::VectorXd& x, int i,
                                                     int j) const {
  Eigen::VectorXd out(p_);
  component_gradient_into(x, i, j, out);
  return out;
}

double FiniteSumProblem::component_value(const Eigen::VectorXd& x, int i, int j) const {
  check_indices(i, j);
  if (kind_ == ProblemKind::quadratic)
    return 0.5 * (x - data_[i].row(j).transpose()).squaredNorm();
  double y = labels_[i](j);
  double t = y * data_[i].row(j).dot(x);
  return softplus(-t) + 0.5 * lambda_ * x.squaredNorm();
}

void FiniteSumProblem::local_full_gradient_into(const Eigen::VectorXd& x, int i,
                                                Eigen::VectorXd& out) const {
  check_indices(i, 0);
  const int m = static_cast<int>(data_[i].rows());
  Eigen::VectorXd comp(p_);
  out.setZero(p_);
  for (int j = 0; j < m; ++j) {
    component_gradient_into(x, i, j, comp);
    out += comp;
  }
  out /= static_cast<double>(m);
}

Eigen::VectorXd FiniteSumProblem::local_full_gradient(const Eigen::VectorXd& x, int i) const {
  Eigen::VectorXd out(p_);
  local_full_gradient_into(x, i, out);
  return out;
}

double FiniteSumProblem::local_value(const Eigen::VectorXd& x, int i) const {
  check_indices(i, 0);
  const int m = static_cast<int>(data_[i].rows());
  double acc = 0.0;
  for (int j = 0; j < m; ++j) acc += component_value(x, i, j);
  return acc / static_cast<double>(m);
}

std::pair<double, Eigen::VectorXd> FiniteSumProblem::global_value_and_gradient(
    const Eigen::VectorXd& x) const {
  double value = 0.0;
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(p_);
  Eigen::VectorXd local(p_);
  for (int i = 0; i < n_; ++i) {
    value += local_value(x, i);
    local_full_gradient_into(x, i, local);
    grad += local;
  }
  value /= static_cast<double>(n_);
  grad /= static_cast<double>(n_);
  return {value, std::move(grad)};
}

double FiniteSumProblem::global_value(const Eigen::VectorXd& x) const {
  double value = 0.0;
  for (int i = 0; i < n_; ++i) value += local_value(x, i);
  return value / static_cast<double>(n_);
}

ProblemConstants FiniteSumProblem::constants() const {
  if (kind_ == ProblemKind::quadratic) return {1.0, 1.0, 1.0};
  double max_norm_sq = 0.0;
  for (const auto& f : data_)
    for (int j = 0; j < f.rows(); ++j)
      max_norm_sq = std::max(max_norm_sq, f.row(j).squaredNorm());
  double ell = max_norm_sq / 4.0 + lambda_;
  return {ell, lambda_, ell / lambda_};
}

const Eigen::VectorXd& FiniteSumProblem::optimum() const {
  std::lock_guard<std::mutex> lock(optimum_cache_->mutex);
  if (optimum_cache_->value) return *optimum_cache_->value;

  if (kind_ == ProblemKind::quadratic) {
    // Node-average of per-node target means.
    Eigen::VectorXd x = Eigen::VectorXd::Zero(p_);
    for (int i = 0; i < n_; ++i) x += data_[i].colwise().mean().transpose();
    x /= static_cast<double>(n_);
    optimum_cache_->value = std::move(x);
    return *optimum_cache_->value;
  }

  const double step = 1.0 / constants().ell;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(p_);
  const long long cap = 1000000;
  for (long long it = 0; it < cap; ++it) {
    auto [value, grad] = global_value_and_gradient(x);
    (void)value;
    if (grad.norm() <= 1e-13) {
      optimum_cache_->value = std::move(x);
      return *optimum_cache_->value;
    }
    x -= step * grad;
  }
  fail(errc::numerical_failure, "optimum oracle did not reach ||grad F|| <= 1e-13 in 1e6 steps");
}

FiniteSumProblem FiniteSumProblem::pooled() const {
  long long total = total_components();
  Eigen::MatrixXd data(total, p_);
  Eigen::VectorXd labels(total);
  long long row = 0;
  for (int i = 0; i < n_; ++i) {
    data.middleRows(row, data_[i].rows()) = data_[i];
    if (kind_ == ProblemKind::logistic) labels.segment(row, labels_[i].size()) = labels_[i];
    row += data_[i].rows();
  }
  if (kind_ == ProblemKind::quadratic) return quadratic({std::move(data)});
  return logistic({std::move(data)}, {std::move(labels)}, lambda_);
}

FiniteSumProblem synthetic_logistic(int n, int per_node, int dim, std::uint64_t seed,
                                    double lambda) {
  require(n >= 1 && per_node >= 1 && dim >= 1, errc::invalid_argument,
          "synthetic_logistic requires n, per_node, dim >= 1");
  if (lambda < 0.0) lambda = 1.0 / (static_cast<double>(n) * per_node);
  Rng rng(seed);
  Eigen::VectorXd separator(dim);
  for (int k = 0; k < dim; ++k) separator(k) = rng.next_gaussian();
  separator.normalize();

  std::vector<Eigen::MatrixXd> features(n, Eigen::MatrixXd(per_node, dim));
  std::vector<Eigen::VectorXd> labels(n, Eigen::VectorXd(per_node));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < per_node; ++j) {
      Eigen::VectorXd xi(dim);
      for (int k = 0; k < dim; ++k) xi(k) = rng.next_gaussian();
      double norm = xi.norm();
      if (norm > 1.0) xi /= norm;
      double y = xi.dot(separator) >= 0.0 ? 1.0 : -1.0;
      if (rng.next_bernoulli(0.05)) y = -y;
      features[i].row(j) = xi.transpose();
      labels[i](j) = y;
    }
  }
  return FiniteSumProblem::logistic(std::move(features), std::move(labels), lambda);
}

FiniteSumProblem synthetic_quadratic(int n, int per_node, int dim, std::uint64_t seed) {
  require(n >= 1 && per_node >= 1 && dim >= 1, errc::invalid_argument,
          "synthetic_quadratic requires n, per_node, dim >= 1");
  Rng rng(seed);
  std::vector<Eigen::MatrixXd> targets(n, Eigen::MatrixXd(per_node, dim));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < per_node; ++j)
      for (int k = 0; k < dim; ++k) targets[i](j, k) = rng.next_gaussian();
  return FiniteSumProblem::quadratic(std::move(targets));
}

namespace {

bool parse_double(const std::string& field, double& out) {
  std::size_t pos = 0;
  try {
    out = std::stod(field, &pos);
  } catch (...) {
    return false;
  }
  while (pos < field.size() && std::isspace(static_cast<unsigned char>(field[pos]))) ++pos;
  return pos == field.size();
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

}  // namespace

FiniteSumProblem load_csv(const std::string& path, int n, const std::string& label_column,
                          double lambda) {
  require(n >= 1, errc::invalid_argument, "load_csv requires n >= 1");
  std::ifstream in(path);
  require(in.good(), errc::io, "cannot open for reading: " + path);

  std::string line;
  int line_no = 0;
  std::vector<std::vector<double>> rows;
  std::vector<std::string> header;
  bool header_checked = false;

  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (!header_checked) {
      header_checked = true;
      bool numeric = true;
      double tmp;
      for (const auto& f : fields)
        if (!parse_double(f, tmp)) numeric = false;
      if (!numeric) {
        header = fields;
        continue;
      }
    }
    std::vector<double> row(fields.size());
    for (std::size_t k = 0; k < fields.size(); ++k) {
      if (!parse_double(fields[k], row[k]))
        fail(errc::data_format,
             path + ":" + std::to_string(line_no) + ": cannot parse field " + std::to_string(k));
    }
    if (!rows.empty() && row.size() != rows.front().size())
      fail(errc::data_format, path + ":" + std::to_string(line_no) + ": inconsistent field count");
    rows.push_back(std::move(row));
  }
  require(!rows.empty(), errc::data_format, path + ": no data rows");
  require(static_cast<int>(rows.size()) >= n, errc::invalid_argument,
          "fewer data rows than nodes");

  const int cols = static_cast<int>(rows.front().size());
  int label_idx = -1;
  if (!header.empty()) {
    for (int k = 0; k < static_cast<int>(header.size()); ++k)
      if (header[k] == label_column) label_idx = k;
  }
  if (label_idx < 0) {
    double idx;
    if (parse_double(label_column, idx) && idx >= 0 && idx < cols &&
        idx == std::floor(idx))
      label_idx = static_cast<int>(idx);
  }
  require(label_idx >= 0, errc::invalid_argument,
          "label column '" + label_column + "' not found");

  // Detect the label convention before mapping {0,1} -> {-1,+1}.
  bool zero_one = true, pm_one = true;
  for (const auto& row : rows) {
    double y = row[label_idx];
    if (y != 0.0 && y != 1.0) zero_one = false;
    if (y != -1.0 && y != 1.0) pm_one = false;
  }
  require(zero_one || pm_one, errc::data_format,
          path + ": label column must hold {-1,+1} or {0,1}");

  const int p = cols - 1;
  require(p >= 1, errc::data_format, path + ": no feature columns");
  Eigen::MatrixXd all_features(rows.size(), p);
  Eigen::VectorXd all_labels(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    int c = 0;
    for (int k = 0; k < cols; ++k) {
      if (k == label_idx) continue;
      all_features(static_cast<int>(r), c++) = rows[r][k];
    }
    double y = rows[r][label_idx];
    all_labels(static_cast<int>(r)) = pm_one ? y : (y == 0.0 ? -1.0 : 1.0);
  }
  double max_norm = all_features.rowwise().norm().maxCoeff();
  if (max_norm > 0.0) all_features /= max_norm;

  // Contiguous, even-as-possible split: the first (rows mod n) nodes get one
  // extra sample.
  const long long total = static_cast<long long>(rows.size());
  std::vector<Eigen::MatrixXd> features(n);
  std::vector<Eigen::VectorXd> labels(n);
  long long start = 0;
  for (int i = 0; i < n; ++i) {
    long long size = total / n + (i < total % n ? 1 : 0);
    features[i] = all_features.middleRows(start, size);
    labels[i] = all_labels.segment(start, size);
    start += size;
  }
  return FiniteSumProblem::logistic(std::move(features), std::move(labels), lambda);
}

}  // namespace absaga
