#include "nfr/amc.hpp"

#include <cassert>
#include <cmath>

#include "nfr/error.hpp"

namespace nfr {
namespace {

void check_dims(const Policy& policy, const Scenario& s) {
  if (policy.size() != s.size())
    throw InvalidArgument("policy size does not match the catalog size");
  if (policy.is_positional() && policy.matrix_count() != s.slots())
    throw InvalidArgument("positional policy must have N position matrices");
}

Matrix invert_transient(const Matrix& q) {
  const auto k = q.rows();
  const Matrix a = Matrix::Identity(k, k) - q;
  const Eigen::PartialPivLU<Matrix> lu(a);
  // I - Q is strictly diagonally dominant by rows whenever Q's row sums are
  // alpha < 1, so a tiny pivot means the policy was not valid.
  const double min_pivot = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
  if (!(min_pivot > 1e-14))
    throw InvalidPolicy("I - Q is singular; the policy does not define a transient chain");
  Matrix g = lu.solve(Matrix::Identity(k, k));
  assert(((a * g - Matrix::Identity(k, k)).cwiseAbs().rowwise().sum().maxCoeff()) <=
         1e-9 * static_cast<double>(k));
  return g;
}

}  // namespace

Matrix transient_matrix(const Policy& policy, const Scenario& s) {
  check_dims(policy, s);
  if (!policy.is_positional()) return (s.alpha() / s.slots()) * policy.matrix();
  Matrix q = Matrix::Zero(s.size(), s.size());
  for (int n = 0; n < s.slots(); ++n) q += s.clicks()(n) * policy.position(n);
  return s.alpha() * q;
}

Matrix fundamental_matrix(const Policy& policy, const Scenario& s) {
  return invert_transient(transient_matrix(policy, s));
}

double expected_cycle_cost(const Policy& policy, const Scenario& s) {
  const Matrix g = fundamental_matrix(policy, s);
  return s.popularity().dot(g * s.cost());
}

double expected_cycle_length(double alpha) {
  if (!(alpha >= 0.0 && alpha < 1.0)) throw InvalidArgument("alpha must lie in [0,1)");
  return 1.0 / (1.0 - alpha);
}

EvalReport ltec(const Policy& policy, const Scenario& s, double tol) {
  check_dims(policy, s);
  if (const auto v = validate_policy(policy, s, tol); !v.empty())
    throw InvalidPolicy("cannot evaluate an invalid policy: " + v.front().message);

  const Matrix g = fundamental_matrix(policy, s);
  EvalReport rep;
  rep.z = g.transpose() * s.popularity();
  rep.g_row_sums = g.rowwise().sum();
  rep.cycle_length = s.popularity().dot(rep.g_row_sums);
  rep.ltec = (1.0 - s.alpha()) * rep.z.dot(s.cost());
  if (s.binary_costs()) rep.chr = 1.0 - rep.ltec;
  return rep;
}

}  // namespace nfr
