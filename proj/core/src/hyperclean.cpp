#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "bilevel/errors.hpp"
#include "bilevel/problems.hpp"

namespace bilevel {

namespace {

double sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

// log(1 + exp(-m))
double logistic_loss(double m) { return std::max(-m, 0.0) + std::log1p(std::exp(-std::abs(m))); }

Vector sigmoid(const Vector& x) { return x.unaryExpr([](double t) { return sigmoid(t); }); }

// Per-sample margin m_i = b_i a_i^T w.
Vector margins(const Matrix& A, const Vector& b, const Vector& w) {
  return (b.array() * (A * w).array()).matrix();
}

double weighted_loss(const HypercleanData& d, const Vector& weights, const Vector& w) {
  const Vector m = margins(d.A_train, d.b_train, w);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < m.size(); ++i) sum += weights[i] * logistic_loss(m[i]);
  return sum / static_cast<double>(m.size()) + 0.5 * d.lambda * w.squaredNorm();
}

Vector weighted_grad_w(const HypercleanData& d, const Vector& weights, const Vector& w) {
  const Vector m = margins(d.A_train, d.b_train, w);
  Vector coef(m.size());
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    coef[i] = -weights[i] * d.b_train[i] * sigmoid(-m[i]);
  }
  return d.A_train.transpose() * coef / static_cast<double>(m.size()) + d.lambda * w;
}

Matrix weighted_hess_w(const HypercleanData& d, const Vector& weights, const Vector& w) {
  const Vector m = margins(d.A_train, d.b_train, w);
  Vector curv(m.size());
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    curv[i] = weights[i] * sigmoid(m[i]) * sigmoid(-m[i]);
  }
  const Eigen::Index dim = d.A_train.cols();
  Matrix H = d.A_train.transpose() * curv.asDiagonal() * d.A_train / static_cast<double>(m.size());
  H += d.lambda * Matrix::Identity(dim, dim);
  return H;
}

// Coefficients c_i = sigmoid'(x_i) * (-b_i sigmoid(-m_i)) / n shared by the cross products.
Vector cross_coefficients(const HypercleanData& d, const Vector& x, const Vector& w) {
  const Vector m = margins(d.A_train, d.b_train, w);
  const double n = static_cast<double>(m.size());
  Vector c(m.size());
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    const double s = sigmoid(x[i]);
    c[i] = s * (1.0 - s) * (-d.b_train[i] * sigmoid(-m[i])) / n;
  }
  return c;
}

}  // namespace

Vector hyperclean_fit(const HypercleanData& d, const Vector& sample_weights) {
  if (sample_weights.size() != d.A_train.rows()) throw InvalidArgument("weights size mismatch");
  Vector w = Vector::Zero(d.A_train.cols());
  for (int it = 0; it < 100; ++it) {
    const Vector grad = weighted_grad_w(d, sample_weights, w);
    if (grad.norm() <= 1e-14 * (1.0 + w.norm())) break;
    const Vector step = weighted_hess_w(d, sample_weights, w).ldlt().solve(grad);
    double t = 1.0;
    const double base = weighted_loss(d, sample_weights, w);
    while (t > 1e-10 && weighted_loss(d, sample_weights, w - t * step) > base - 1e-4 * t * grad.dot(step)) {
      t *= 0.5;
    }
    const Vector next = w - t * step;
    if ((next - w).norm() <= 1e-16 * (1.0 + w.norm())) {
      w = next;
      break;
    }
    w = next;
  }
  return w;
}

double hyperclean_validation_accuracy(const HypercleanData& d, const Vector& w) {
  const Vector pred = d.A_val * w;
  int correct = 0;
  for (Eigen::Index j = 0; j < pred.size(); ++j) {
    const double label = pred[j] >= 0.0 ? 1.0 : -1.0;
    if (label == d.b_val[j]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(pred.size());
}

HypercleanInstance make_hyperclean_synthetic(const HypercleanOptions& o) {
  if (o.n_train < 1 || o.n_val < 1 || o.dim < 1) {
    throw InvalidArgument("hyper-cleaning sizes must be positive");
  }
  if (!(o.noise_rate >= 0.0 && o.noise_rate <= 1.0)) {
    throw InvalidArgument("noise rate must lie in [0, 1]");
  }
  if (!(o.lambda_reg > 0.0)) throw InvalidArgument("lambda must be > 0");
  if (o.batch < 1) throw InvalidArgument("batch must be >= 1");

  auto data = std::make_shared<HypercleanData>();
  Rng rng = make_stream(o.seed, Stream::Data, 0);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto gaussian_matrix = [&](int rows, int cols) {
    Matrix M(rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) M(i, j) = normal(rng);
    return M;
  };
  auto labels = [&](const Matrix& A) {
    const Vector s = A * data->teacher;
    return Vector(s.unaryExpr([](double v) { return v >= 0.0 ? 1.0 : -1.0; }));
  };

  data->teacher = gaussian_matrix(o.dim, 1).col(0);
  data->teacher.normalize();
  data->A_train = gaussian_matrix(o.n_train, o.dim);
  data->b_train = labels(data->A_train);
  data->A_val = gaussian_matrix(o.n_val, o.dim);
  data->b_val = labels(data->A_val);
  data->lambda = o.lambda_reg;
  data->batch = o.batch;

  std::vector<int> order(static_cast<std::size_t>(o.n_train));
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  const int n_bad = static_cast<int>(std::lround(o.noise_rate * o.n_train));
  data->corrupted.assign(static_cast<std::size_t>(o.n_train), false);
  for (int i = 0; i < n_bad; ++i) {
    const int idx = order[static_cast<std::size_t>(i)];
    data->corrupted[static_cast<std::size_t>(idx)] = true;
    data->b_train[idx] = -data->b_train[idx];
  }

  std::shared_ptr<const HypercleanData> d = data;
  const Eigen::Index n = o.n_train;
  const Eigen::Index dim = o.dim;

  ProblemSpec p;
  p.name = "hyperclean";
  p.dx = n;
  p.dy = dim;
  p.f_eval = [d](const Vector&, const Vector& w) {
    const Vector m = margins(d->A_val, d->b_val, w);
    double sum = 0.0;
    for (Eigen::Index j = 0; j < m.size(); ++j) sum += logistic_loss(m[j]);
    return sum / static_cast<double>(m.size());
  };
  p.f_grad = [d, n](const Vector&, const Vector& w) {
    const Vector m = margins(d->A_val, d->b_val, w);
    Vector coef(m.size());
    for (Eigen::Index j = 0; j < m.size(); ++j) coef[j] = -d->b_val[j] * sigmoid(-m[j]);
    return join(Vector::Zero(n), d->A_val.transpose() * coef / static_cast<double>(m.size()));
  };
  p.g_eval = [d](const Vector& x, const Vector& w) { return weighted_loss(*d, sigmoid(x), w); };
  p.g_grad = [d](const Vector& x, const Vector& w) {
    const Vector m = margins(d->A_train, d->b_train, w);
    const double nn = static_cast<double>(m.size());
    Vector gx(m.size());
    for (Eigen::Index i = 0; i < m.size(); ++i) {
      const double s = sigmoid(x[i]);
      gx[i] = s * (1.0 - s) * logistic_loss(m[i]) / nn;
    }
    return join(gx, weighted_grad_w(*d, sigmoid(x), w));
  };
  p.g_hvp_yy = [d](const Vector& x, const Vector& w, const Vector& v) {
    return Vector(weighted_hess_w(*d, sigmoid(x), w) * v);
  };
  p.g_hvp_xy = [d](const Vector& x, const Vector& w, const Vector& v) {
    const Vector c = cross_coefficients(*d, x, w);
    return Vector((c.array() * (d->A_train * v).array()).matrix());
  };
  p.g_hvp_yx = [d](const Vector& x, const Vector& w, const Vector& v) {
    const Vector c = cross_coefficients(*d, x, w);
    return Vector(d->A_train.transpose() * (c.array() * v.array()).matrix());
  };
  p.upper_set = ConstraintSet::full_space(n);
  p.lower_set = ConstraintSet::full_space(dim);
  p.analytic_lower_solution = [d](const Vector& x) { return hyperclean_fit(*d, sigmoid(x)); };
  p.analytic_v = [d](const Vector& x) {
    const Vector s = sigmoid(x);
    return weighted_loss(*d, s, hyperclean_fit(*d, s));
  };
  p.g_grad_sample = [d, n](const Vector& x, const Vector& w, Rng& rng) {
    std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
    Vector gx = Vector::Zero(n);
    Vector gw = Vector::Zero(w.size());
    const double B = static_cast<double>(d->batch);
    for (int j = 0; j < d->batch; ++j) {
      const Eigen::Index i = pick(rng);
      const double m = d->b_train[i] * d->A_train.row(i).dot(w);
      const double s = sigmoid(x[i]);
      gx[i] += s * (1.0 - s) * logistic_loss(m) / B;
      gw += (s * (-d->b_train[i]) * sigmoid(-m) / B) * d->A_train.row(i).transpose();
    }
    gw += d->lambda * w;
    return join(gx, gw);
  };
  p.f_grad_sample = [d, n](const Vector&, const Vector& w, Rng& rng) {
    std::uniform_int_distribution<Eigen::Index> pick(0, d->A_val.rows() - 1);
    Vector gw = Vector::Zero(w.size());
    const double B = static_cast<double>(d->batch);
    for (int j = 0; j < d->batch; ++j) {
      const Eigen::Index i = pick(rng);
      const double m = d->b_val[i] * d->A_val.row(i).dot(w);
      gw += (-d->b_val[i] * sigmoid(-m) / B) * d->A_val.row(i).transpose();
    }
    return join(Vector::Zero(n), gw);
  };

  const Matrix gram_train = d->A_train.transpose() * d->A_train / static_cast<double>(n);
  const Matrix gram_val = d->A_val.transpose() * d->A_val / static_cast<double>(o.n_val);
  const double top_train = Eigen::SelfAdjointEigenSolver<Matrix>(gram_train).eigenvalues().maxCoeff();
  const double top_val = Eigen::SelfAdjointEigenSolver<Matrix>(gram_val).eigenvalues().maxCoeff();
  p.constants.L = d->A_val.rowwise().norm().mean();
  p.constants.L_f = 0.25 * top_val;
  p.constants.L_g = o.lambda_reg + 0.25 * top_train;
  p.constants.mu = 2.0 / o.lambda_reg;
  p.constants.rho = 2.0 / o.lambda_reg;

  return {std::move(p), d};
}

}  // namespace bilevel
