#include "parastab/fem.hpp"

#include <cmath>

namespace parastab {

Mesh build_mesh(int n_nodes, Bc bc) {
  if (n_nodes < 3) {
    throw std::invalid_argument("build_mesh: need at least 3 nodes, got " +
                                std::to_string(n_nodes));
  }
  Mesh m;
  m.n_nodes = n_nodes;
  m.h = 1.0 / static_cast<double>(n_nodes - 1);
  m.bc = bc;
  return m;
}

Field sample(const Mesh& mesh, const std::function<double(double)>& fn) {
  Field f(mesh);
  for (int i = 0; i < mesh.n_nodes; ++i) f[i] = fn(mesh.node(i));
  return f;
}

void check_same_mesh(const Field& f, const Field& g) {
  if (!(f.mesh == g.mesh)) {
    throw MeshMismatchError("fields live on different meshes");
  }
}

Field TriDiagOperator::apply(const Field& x) const {
  Field out(mesh_);
  apply_into(x, out);
  return out;
}

void TriDiagOperator::apply_into(const Field& x, Field& out) const {
  if (!(x.mesh == mesh_)) throw MeshMismatchError("operator/field mesh mismatch");
  const int n = mesh_.n_nodes;
  if (out.size() != n) out = Field(mesh_);
  const double* d = diag_.data();
  const double* e = off_.data();
  const double* v = x.values.data();
  double* o = out.values.data();
  o[0] = d[0] * v[0] + e[0] * v[1];
  for (int i = 1; i < n - 1; ++i) {
    o[i] = e[i - 1] * v[i - 1] + d[i] * v[i] + e[i] * v[i + 1];
  }
  o[n - 1] = e[n - 2] * v[n - 2] + d[n - 1] * v[n - 1];
}

TriDiagOperator TriDiagOperator::axpy(double s, const TriDiagOperator& other) const {
  if (!(other.mesh_ == mesh_)) throw MeshMismatchError("operator mesh mismatch");
  TriDiagOperator out(mesh_);
  for (size_t i = 0; i < diag_.size(); ++i) out.diag_[i] = diag_[i] + s * other.diag_[i];
  for (size_t i = 0; i < off_.size(); ++i) out.off_[i] = off_[i] + s * other.off_[i];
  return out;
}

void TriDiagOperator::constrain_dirichlet() {
  const int n = mesh_.n_nodes;
  diag_[0] = 1.0;
  diag_[static_cast<size_t>(n - 1)] = 1.0;
  off_[0] = 0.0;
  off_[static_cast<size_t>(n - 2)] = 0.0;
}

TriDiagOperator assemble_mass(const Mesh& mesh) {
  TriDiagOperator m(mesh);
  const int n = mesh.n_nodes;
  const double h = mesh.h;
  for (int e = 0; e < n - 1; ++e) {
    m.diag()[e] += h / 3.0;
    m.diag()[e + 1] += h / 3.0;
    m.off()[e] += h / 6.0;
  }
  if (mesh.bc == Bc::DirichletHomogeneous) m.constrain_dirichlet();
  return m;
}

TriDiagOperator assemble_stiffness(const Mesh& mesh) {
  TriDiagOperator k(mesh);
  const int n = mesh.n_nodes;
  const double ih = 1.0 / mesh.h;
  for (int e = 0; e < n - 1; ++e) {
    k.diag()[e] += ih;
    k.diag()[e + 1] += ih;
    k.off()[e] -= ih;
  }
  if (mesh.bc == Bc::DirichletHomogeneous) k.constrain_dirichlet();
  return k;
}

TriDiagOperator assemble_A(const Mesh& mesh, double nu) {
  if (!(nu > 0.0)) throw std::invalid_argument("assemble_A: nu must be positive");
  TriDiagOperator a(mesh);
  const int n = mesh.n_nodes;
  const double h = mesh.h;
  const double ih = nu / mesh.h;
  for (int e = 0; e < n - 1; ++e) {
    a.diag()[e] += ih + h / 3.0;
    a.diag()[e + 1] += ih + h / 3.0;
    a.off()[e] += -ih + h / 6.0;
  }
  if (mesh.bc == Bc::DirichletHomogeneous) a.constrain_dirichlet();
  return a;
}

TriDiagFactorization::TriDiagFactorization(const TriDiagOperator& op)
    : mesh_(op.mesh()),
      d_(op.diag()),
      l_(static_cast<size_t>(op.mesh().n_nodes - 1), 0.0) {
  const int n = mesh_.n_nodes;
  const std::vector<double>& e = op.off();
  if (!(d_[0] > 0.0)) throw NotSpdError("pivot 0 not positive");
  for (int i = 1; i < n; ++i) {
    l_[i - 1] = e[i - 1] / d_[i - 1];
    d_[i] -= l_[i - 1] * e[i - 1];
    if (!(d_[i] > 0.0)) {
      throw NotSpdError("pivot " + std::to_string(i) + " not positive");
    }
  }
}

void TriDiagFactorization::solve_into(const Field& rhs, Field& out) const {
  if (!(rhs.mesh == mesh_)) throw MeshMismatchError("solve: rhs mesh mismatch");
  const int n = mesh_.n_nodes;
  if (out.size() != n) out = Field(mesh_);
  const bool dirichlet = mesh_.bc == Bc::DirichletHomogeneous;
  double* x = out.values.data();
  const double* b = rhs.values.data();
  x[0] = dirichlet ? 0.0 : b[0];
  for (int i = 1; i < n; ++i) {
    const double bi = (dirichlet && i == n - 1) ? 0.0 : b[i];
    x[i] = bi - l_[i - 1] * x[i - 1];
  }
  x[n - 1] /= d_[n - 1];
  for (int i = n - 2; i >= 0; --i) x[i] = x[i] / d_[i] - l_[i] * x[i + 1];
}

Field TriDiagFactorization::solve(const Field& rhs) const {
  Field out(mesh_);
  solve_into(rhs, out);
  return out;
}

Field solve_spd(const TriDiagOperator& op, const Field& rhs) {
  TriDiagFactorization fac(op);
  Field x = fac.solve(rhs);
  // one refinement pass to push the residual to roundoff
  Field r = op.apply(x);
  for (int i = 0; i < x.size(); ++i) r[i] = rhs[i] - r[i];
  Field dx = fac.solve(r);
  for (int i = 0; i < x.size(); ++i) x[i] += dx[i];
  return x;
}

double l2_inner(const Field& f, const Field& g) {
  check_same_mesh(f, g);
  const int n = f.mesh.n_nodes;
  const double h = f.mesh.h;
  const double* a = f.values.data();
  const double* b = g.values.data();
  double acc = 0.0;
  if (f.mesh.bc == Bc::DirichletHomogeneous) {
    // eliminated boundary rows: unit diagonal, no coupling
    double inner = 0.0;
    for (int i = 1; i < n - 1; ++i) {
      const double left = (i == 1) ? 0.0 : a[i - 1];
      const double right = (i == n - 2) ? 0.0 : a[i + 1];
      inner += b[i] * (left + 4.0 * a[i] + right);
    }
    return a[0] * b[0] + a[n - 1] * b[n - 1] + (h / 6.0) * inner;
  }
  acc = b[0] * (2.0 * a[0] + a[1]) + b[n - 1] * (a[n - 2] + 2.0 * a[n - 1]);
  for (int i = 1; i < n - 1; ++i) {
    acc += b[i] * (a[i - 1] + 4.0 * a[i] + a[i + 1]);
  }
  return acc * (h / 6.0);
}

double l2_norm(const Field& f) { return std::sqrt(l2_inner(f, f)); }

double integral(const Field& v) {
  const int n = v.mesh.n_nodes;
  const double h = v.mesh.h;
  const double* a = v.values.data();
  double acc = (h / 2.0) * (a[0] + a[n - 1]);
  for (int i = 1; i < n - 1; ++i) acc += h * a[i];
  return acc;
}

Field pointwise_mul(const Field& f, const Field& g) {
  check_same_mesh(f, g);
  Field out(f.mesh);
  for (int i = 0; i < f.size(); ++i) out[i] = f[i] * g[i];
  return out;
}

Field nodal_gradient(const Field& f) {
  const int n = f.mesh.n_nodes;
  const double h = f.mesh.h;
  Field out(f.mesh);
  out[0] = (f[1] - f[0]) / h;
  for (int i = 1; i < n - 1; ++i) out[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
  out[n - 1] = (f[n - 1] - f[n - 2]) / h;
  return out;
}

}  // namespace parastab
