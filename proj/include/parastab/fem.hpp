#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace parastab {

enum class Bc { NeumannHomogeneous, DirichletHomogeneous };

struct MeshMismatchError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct NotSpdError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Uniform partition of [0,1] with nodes x_i = i*h.
struct Mesh {
  int n_nodes = 0;
  double h = 0.0;
  Bc bc = Bc::NeumannHomogeneous;

  double node(int i) const { return static_cast<double>(i) * h; }
  bool operator==(const Mesh&) const = default;
};

Mesh build_mesh(int n_nodes, Bc bc);

/// Nodal coefficients of a piecewise-linear function on a mesh.
struct Field {
  Mesh mesh;
  std::vector<double> values;

  Field() = default;
  explicit Field(const Mesh& m, double fill = 0.0)
      : mesh(m), values(static_cast<size_t>(m.n_nodes), fill) {}

  int size() const { return mesh.n_nodes; }
  double& operator[](int i) { return values[static_cast<size_t>(i)]; }
  double operator[](int i) const { return values[static_cast<size_t>(i)]; }
};

Field sample(const Mesh& mesh, const std::function<double(double)>& fn);

void check_same_mesh(const Field& f, const Field& g);

/// Symmetric tridiagonal operator (P1 mass, stiffness, or combinations).
/// Under Dirichlet conditions the assembled operators carry eliminated
/// boundary rows/columns with unit diagonal.
class TriDiagOperator {
 public:
  explicit TriDiagOperator(const Mesh& mesh)
      : mesh_(mesh),
        diag_(static_cast<size_t>(mesh.n_nodes), 0.0),
        off_(static_cast<size_t>(mesh.n_nodes - 1), 0.0) {}

  const Mesh& mesh() const { return mesh_; }
  std::vector<double>& diag() { return diag_; }
  std::vector<double>& off() { return off_; }
  const std::vector<double>& diag() const { return diag_; }
  const std::vector<double>& off() const { return off_; }

  Field apply(const Field& x) const;
  void apply_into(const Field& x, Field& out) const;

  /// this + s * other, same mesh.
  TriDiagOperator axpy(double s, const TriDiagOperator& other) const;

  /// Replace boundary rows/columns by the identity.
  void constrain_dirichlet();

 private:
  Mesh mesh_;
  std::vector<double> diag_;
  std::vector<double> off_;
};

TriDiagOperator assemble_mass(const Mesh& mesh);
TriDiagOperator assemble_stiffness(const Mesh& mesh);
TriDiagOperator assemble_A(const Mesh& mesh, double nu);

/// LDL^T factorization of an SPD tridiagonal operator; Thomas-style O(n)
/// solves, reusable across right-hand sides. Throws NotSpdError if a pivot
/// is not strictly positive.
class TriDiagFactorization {
 public:
  explicit TriDiagFactorization(const TriDiagOperator& op);

  Field solve(const Field& rhs) const;
  void solve_into(const Field& rhs, Field& out) const;

  const Mesh& mesh() const { return mesh_; }

 private:
  Mesh mesh_;
  std::vector<double> d_;
  std::vector<double> l_;
};

/// One-shot factor + solve with one step of iterative refinement.
Field solve_spd(const TriDiagOperator& op, const Field& rhs);

/// f^T M_h g with the consistent P1 mass matrix of the shared mesh.
double l2_inner(const Field& f, const Field& g);
double l2_norm(const Field& f);

/// Integral of the P1 interpolant, 1^T M_h v.
double integral(const Field& v);

/// Nodal product (f*g)(x_i) = f_i g_i; the quadrature used for reaction,
/// penalty and other pointwise terms.
Field pointwise_mul(const Field& f, const Field& g);

/// Centered nodal gradient, one-sided at the ends.
Field nodal_gradient(const Field& f);

}  // namespace parastab
