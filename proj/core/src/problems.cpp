#include "ipc/problems.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <memory>
#include <vector>

#include "ipc/errors.hpp"
#include "ipc/rng.hpp"

namespace ipc {

namespace {

Eigen::VectorXd random_vector(int n, std::uint64_t seed, double lo, double hi) {
  Xoshiro256pp rng(seed);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = rng.uniform(lo, hi);
  return v;
}

// Row-major fill order; part of the reproducibility contract.
Eigen::MatrixXd random_matrix(int n, std::uint64_t seed, double lo, double hi) {
  Xoshiro256pp rng(seed);
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = rng.uniform(lo, hi);
  return m;
}

}  // namespace

double spectral_norm(const Eigen::MatrixXd& m, std::uint64_t seed, int max_iters,
                     double rel_tol) {
  if (m.rows() == 0) return 0.0;
  Eigen::VectorXd v = random_vector(static_cast<int>(m.cols()), seed, -1.0, 1.0);
  v.normalize();
  double sigma_sq = 0.0;
  for (int it = 0; it < max_iters; ++it) {
    const Eigen::VectorXd w = m * v;
    const double next = w.squaredNorm();  // Rayleigh quotient of M'M at unit v
    const Eigen::VectorXd u = m.transpose() * w;
    const double u_norm = u.norm();
    if (u_norm == 0.0) return 0.0;  // v in the kernel of M'M
    v = u / u_norm;
    if (it > 0 && std::abs(next - sigma_sq) <= rel_tol * next) {
      sigma_sq = next;
      break;
    }
    sigma_sq = next;
  }
  return std::sqrt(sigma_sq);
}

// ---------------------------------------------------------------------------
// Fractional

FractionalProblem FractionalProblem::generate(int n, std::uint64_t seed) {
  if (n < 1) throw ValidationError("fractional generator requires n >= 1");
  FractionalProblem p;
  p.seed = seed;
  const Eigen::MatrixXd m = random_matrix(n, sub_seed(seed, "fractional/M"), 0.0, 1.0);
  const Eigen::MatrixXd mmT = m * m.transpose();
  p.Q = 0.5 * (mmT + mmT.transpose());  // exactly symmetric
  p.Q.diagonal().array() += 1.0;
  p.c = random_vector(n, sub_seed(seed, "fractional/c"), 0.0, 2.0);
  p.q_const = Xoshiro256pp(sub_seed(seed, "fractional/q")).uniform(1.0, 2.0);
  p.r = random_vector(n, sub_seed(seed, "fractional/r"), 0.0, 2.0);
  p.t_const = 1.0 + 4.0 * n;
  p.x0 = random_vector(n, sub_seed(seed, "fractional/x0"), 1.0, 10.0);
  return p;
}

double FractionalProblem::denom(const Eigen::VectorXd& x) const {
  return r.dot(x) + t_const;
}

double FractionalProblem::f(const Eigen::VectorXd& x) const {
  const double g = 0.5 * x.dot(Q * x) + c.dot(x) + q_const;
  return g / denom(x);
}

Eigen::VectorXd FractionalProblem::grad(const Eigen::VectorXd& x) const {
  const double d = denom(x);
  const Eigen::VectorXd qx_c = Q * x + c;
  const double g = 0.5 * x.dot(qx_c + c) + q_const;  // x'Qx/2 + c'x via one matvec
  const double fval = g / d;
  return (qx_c - fval * r) / d;
}

GradientOracle FractionalProblem::oracle() const {
  auto p = std::make_shared<const FractionalProblem>(*this);
  GradientOracle o;
  o.dim = static_cast<int>(p->x0.size());
  o.eval_f = [p](const Eigen::VectorXd& x) { return p->f(x); };
  o.eval_grad = [p](const Eigen::VectorXd& x) { return p->grad(x); };
  o.convexity_class = ConvexityClass::PseudoConvex;
  o.default_x0 = p->x0;
  o.name = "fractional";
  o.domain_ok = [p](const Eigen::VectorXd& x) { return p->denom(x) > 0.0; };
  return o;
}

GradientOracle make_fractional(int n, std::uint64_t seed) {
  return FractionalProblem::generate(n, seed).oracle();
}

// ---------------------------------------------------------------------------
// Arctan-quadratic

ArctanQuadraticProblem ArctanQuadraticProblem::generate(int n, std::uint64_t seed) {
  if (n < 1) throw ValidationError("arctan-quadratic generator requires n >= 1");
  ArctanQuadraticProblem p;
  p.seed = seed;
  const Eigen::MatrixXd a = random_matrix(n, sub_seed(seed, "arctan/A"), -5.0, 5.0);
  const Eigen::MatrixXd c = random_matrix(n, sub_seed(seed, "arctan/B"), -5.0, 5.0);
  const Eigen::MatrixXd ata = a.transpose() * a;
  p.M = 0.5 * (ata + ata.transpose()) + 0.5 * (c - c.transpose());
  p.q = random_vector(n, sub_seed(seed, "arctan/q"), -500.0, 500.0);
  p.x0 = random_vector(n, sub_seed(seed, "arctan/x0"), 0.0, 1.0);
  p.lipschitz = spectral_norm(p.M, sub_seed(seed, "arctan/power")) + 1.0;
  return p;
}

double ArctanQuadraticProblem::f(const Eigen::VectorXd& x) const {
  const Eigen::ArrayXd xa = x.array();
  return x.dot(xa.atan().matrix()) - 0.5 * (1.0 + xa.square()).log().sum() +
         0.5 * x.dot(M * x) + q.dot(x);
}

Eigen::VectorXd ArctanQuadraticProblem::grad(const Eigen::VectorXd& x) const {
  return x.array().atan().matrix() + M * x + q;
}

GradientOracle ArctanQuadraticProblem::oracle() const {
  auto p = std::make_shared<const ArctanQuadraticProblem>(*this);
  GradientOracle o;
  o.dim = static_cast<int>(p->x0.size());
  o.eval_f = [p](const Eigen::VectorXd& x) { return p->f(x); };
  o.eval_grad = [p](const Eigen::VectorXd& x) { return p->grad(x); };
  o.lipschitz = p->lipschitz;
  o.convexity_class = ConvexityClass::Convex;
  o.default_x0 = p->x0;
  o.name = "arctan-quadratic";
  return o;
}

GradientOracle make_arctan_quadratic(int n, std::uint64_t seed) {
  return ArctanQuadraticProblem::generate(n, seed).oracle();
}

// ---------------------------------------------------------------------------
// Quadratic

QuadraticProblem QuadraticProblem::generate(int n, double cond, std::uint64_t seed) {
  if (n < 1) throw ValidationError("quadratic generator requires n >= 1");
  if (!(cond >= 1.0)) throw ValidationError("quadratic generator requires cond >= 1");
  QuadraticProblem p;
  p.seed = seed;
  p.cond = cond;
  p.h_diag.resize(n);
  for (int i = 0; i < n; ++i)
    p.h_diag[i] = (n == 1) ? cond : std::pow(cond, double(i) / double(n - 1));
  p.x_star = random_vector(n, sub_seed(seed, "quadratic/xstar"), -1.0, 1.0);
  p.x0 = random_vector(n, sub_seed(seed, "quadratic/x0"), -10.0, 10.0);
  return p;
}

double QuadraticProblem::f(const Eigen::VectorXd& x) const {
  const Eigen::ArrayXd d = (x - x_star).array();
  return 0.5 * (h_diag.array() * d * d).sum();
}

Eigen::VectorXd QuadraticProblem::grad(const Eigen::VectorXd& x) const {
  return (h_diag.array() * (x - x_star).array()).matrix();
}

Eigen::VectorXd QuadraticProblem::flow_at(double t) const {
  return x_star.array() + (-h_diag.array() * t).exp() * (x0 - x_star).array();
}

GradientOracle QuadraticProblem::oracle() const {
  auto p = std::make_shared<const QuadraticProblem>(*this);
  GradientOracle o;
  o.dim = static_cast<int>(p->x0.size());
  o.eval_f = [p](const Eigen::VectorXd& x) { return p->f(x); };
  o.eval_grad = [p](const Eigen::VectorXd& x) { return p->grad(x); };
  o.lipschitz = p->cond;
  o.known_solution = p->x_star;
  o.convexity_class = ConvexityClass::Convex;
  o.default_x0 = p->x0;
  o.name = "quadratic";
  return o;
}

GradientOracle make_quadratic(int n, double cond, std::uint64_t seed) {
  return QuadraticProblem::generate(n, cond, seed).oracle();
}

// ---------------------------------------------------------------------------
// Problem files

namespace {

constexpr char kMagic[8] = {'I', 'P', 'C', 'P', 'R', 'O', 'B', '\x01'};

void put_u32(std::ostream& os, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<const char*>(b), 4);
}

void put_u64(std::ostream& os, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<const char*>(b), 8);
}

void put_string(std::ostream& os, const std::string& s) {
  put_u32(os, static_cast<std::uint32_t>(s.size()));
  os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

void put_field(std::ostream& os, const std::string& name, const Eigen::MatrixXd& m) {
  put_string(os, name);
  put_u64(os, static_cast<std::uint64_t>(m.rows()));
  put_u64(os, static_cast<std::uint64_t>(m.cols()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      std::uint64_t bits;
      const double v = m(i, j);
      std::memcpy(&bits, &v, 8);
      put_u64(os, bits);
    }
}

void put_scalar(std::ostream& os, const std::string& name, double v) {
  Eigen::MatrixXd m(1, 1);
  m(0, 0) = v;
  put_field(os, name, m);
}

std::uint32_t get_u32(std::istream& is) {
  unsigned char b[4];
  is.read(reinterpret_cast<char*>(b), 4);
  if (!is) throw IoError("problem file truncated");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return v;
}

std::uint64_t get_u64(std::istream& is) {
  unsigned char b[8];
  is.read(reinterpret_cast<char*>(b), 8);
  if (!is) throw IoError("problem file truncated");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

std::string get_string(std::istream& is) {
  const std::uint32_t len = get_u32(is);
  if (len > (1u << 20)) throw IoError("problem file: implausible string length");
  std::string s(len, '\0');
  is.read(s.data(), len);
  if (!is) throw IoError("problem file truncated");
  return s;
}

struct Field {
  std::string name;
  Eigen::MatrixXd value;
};

Field get_field(std::istream& is) {
  Field f;
  f.name = get_string(is);
  const auto rows = static_cast<Eigen::Index>(get_u64(is));
  const auto cols = static_cast<Eigen::Index>(get_u64(is));
  if (rows < 0 || cols < 0 || rows * cols > (1LL << 28))
    throw IoError("problem file: implausible field shape");
  f.value.resize(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) {
      const std::uint64_t bits = get_u64(is);
      double v;
      std::memcpy(&v, &bits, 8);
      f.value(i, j) = v;
    }
  return f;
}

class FieldMap {
 public:
  explicit FieldMap(std::vector<Field> fields) : fields_(std::move(fields)) {}

  const Eigen::MatrixXd& matrix(const std::string& name) const {
    for (const auto& f : fields_)
      if (f.name == name) return f.value;
    throw IoError("problem file: missing field '" + name + "'");
  }
  Eigen::VectorXd vector(const std::string& name) const {
    const auto& m = matrix(name);
    if (m.cols() != 1) throw IoError("problem file: field '" + name + "' is not a vector");
    return m.col(0);
  }
  double scalar(const std::string& name) const {
    const auto& m = matrix(name);
    if (m.size() != 1) throw IoError("problem file: field '" + name + "' is not a scalar");
    return m(0, 0);
  }

 private:
  std::vector<Field> fields_;
};

}  // namespace

void save_problem(const std::string& path, const AnyProblem& problem) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open '" + path + "' for writing");
  os.write(kMagic, sizeof(kMagic));

  std::visit(
      [&os](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, FractionalProblem>) {
          put_string(os, "fractional");
          put_u64(os, static_cast<std::uint64_t>(p.x0.size()));
          put_u64(os, p.seed);
          put_u32(os, 6);
          put_field(os, "Q", p.Q);
          put_field(os, "c", p.c);
          put_scalar(os, "q", p.q_const);
          put_field(os, "r", p.r);
          put_scalar(os, "t", p.t_const);
          put_field(os, "x0", p.x0);
        } else if constexpr (std::is_same_v<T, ArctanQuadraticProblem>) {
          put_string(os, "arctan-quadratic");
          put_u64(os, static_cast<std::uint64_t>(p.x0.size()));
          put_u64(os, p.seed);
          put_u32(os, 4);
          put_field(os, "M", p.M);
          put_field(os, "q", p.q);
          put_scalar(os, "L", p.lipschitz);
          put_field(os, "x0", p.x0);
        } else {
          put_string(os, "quadratic");
          put_u64(os, static_cast<std::uint64_t>(p.x0.size()));
          put_u64(os, p.seed);
          put_u32(os, 4);
          put_field(os, "h_diag", p.h_diag);
          put_field(os, "x_star", p.x_star);
          put_scalar(os, "cond", p.cond);
          put_field(os, "x0", p.x0);
        }
      },
      problem);
  if (!os) throw IoError("write to '" + path + "' failed");
}

AnyProblem load_problem(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open '" + path + "'");
  char magic[8];
  is.read(magic, 8);
  if (!is || std::memcmp(magic, kMagic, 8) != 0)
    throw IoError("'" + path + "' is not a problem file (bad magic/version)");

  const std::string gen = get_string(is);
  const auto n = static_cast<Eigen::Index>(get_u64(is));
  const std::uint64_t seed = get_u64(is);
  const std::uint32_t nfields = get_u32(is);
  std::vector<Field> fields;
  fields.reserve(nfields);
  for (std::uint32_t i = 0; i < nfields; ++i) fields.push_back(get_field(is));
  const FieldMap map(std::move(fields));

  if (gen == "fractional") {
    FractionalProblem p;
    p.seed = seed;
    p.Q = map.matrix("Q");
    p.c = map.vector("c");
    p.q_const = map.scalar("q");
    p.r = map.vector("r");
    p.t_const = map.scalar("t");
    p.x0 = map.vector("x0");
    if (p.Q.rows() != n || p.x0.size() != n) throw IoError("problem file: inconsistent n");
    return p;
  }
  if (gen == "arctan-quadratic") {
    ArctanQuadraticProblem p;
    p.seed = seed;
    p.M = map.matrix("M");
    p.q = map.vector("q");
    p.lipschitz = map.scalar("L");
    p.x0 = map.vector("x0");
    if (p.M.rows() != n || p.x0.size() != n) throw IoError("problem file: inconsistent n");
    return p;
  }
  if (gen == "quadratic") {
    QuadraticProblem p;
    p.seed = seed;
    p.h_diag = map.vector("h_diag");
    p.x_star = map.vector("x_star");
    p.cond = map.scalar("cond");
    p.x0 = map.vector("x0");
    if (p.h_diag.size() != n || p.x0.size() != n) throw IoError("problem file: inconsistent n");
    return p;
  }
  throw IoError("problem file: unknown generator '" + gen + "'");
}

GradientOracle oracle_of(const AnyProblem& problem) {
  return std::visit([](const auto& p) { return p.oracle(); }, problem);
}

}  // namespace ipc
