#include "cavsol/oracle.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "cavsol/errors.hpp"

namespace cavsol {

QuantumBasis::QuantumBasis(int sites, int photon_cutoff, int atoms, Boundary boundary)
    : sites_(sites), photon_cutoff_(photon_cutoff), atoms_(atoms), boundary_(boundary) {
  if (sites < 1) throw InvalidArgument("quantum basis needs at least one site");
  if (photon_cutoff < 0) throw InvalidArgument("photon cutoff must be >= 0");
  if (atoms < 1) throw InvalidArgument("atoms must be >= 1");
  local_ = static_cast<std::size_t>(photon_cutoff + 1) * static_cast<std::size_t>(atoms + 1);
  dim_ = 1;
  for (int j = 0; j < sites; ++j) {
    stride_.push_back(dim_);
    dim_ *= local_;
    if (dim_ > kMaxDimension) {
      std::ostringstream os;
      os << "quantum basis dimension exceeds " << kMaxDimension << " (sites " << sites
         << ", photon cutoff " << photon_cutoff << ", atoms " << atoms << ")";
      throw DimensionOverflow(os.str());
    }
  }
}

std::size_t QuantumBasis::index(std::span<const LocalLevel> levels) const {
  if (levels.size() != static_cast<std::size_t>(sites_))
    throw ShapeMismatch("level tuple length differs from site count");
  std::size_t idx = 0;
  for (int j = 0; j < sites_; ++j) {
    const auto& lv = levels[j];
    if (lv.photons < 0 || lv.photons > photon_cutoff_ || lv.excitations < 0 ||
        lv.excitations > atoms_)
      throw InvalidArgument("local level out of range");
    idx += stride_[j] * (static_cast<std::size_t>(lv.photons) * (atoms_ + 1) +
                         static_cast<std::size_t>(lv.excitations));
  }
  return idx;
}

LocalLevel QuantumBasis::level(std::size_t index, int site) const {
  const std::size_t local = (index / stride_[site]) % local_;
  return {static_cast<int>(local / (atoms_ + 1)), static_cast<int>(local % (atoms_ + 1))};
}

std::vector<LocalLevel> QuantumBasis::levels(std::size_t index) const {
  if (index >= dim_) throw InvalidArgument("basis index out of range");
  std::vector<LocalLevel> out(sites_);
  for (int j = 0; j < sites_; ++j) out[j] = level(index, j);
  return out;
}

double dicke_ladder_element(int atoms, double m, Ladder ladder) {
  if (atoms < 1) throw InvalidArgument("atoms must be >= 1");
  const double s = 0.5 * atoms;
  const double e = m + s;  // excitation count, must be an integer in [0, N]
  if (std::abs(m) > s + 1e-12 || std::abs(e - std::round(e)) > 1e-12)
    throw InvalidArgument("magnetic quantum number outside the spin-N/2 multiplet");
  const double shift = ladder == Ladder::raise ? 1.0 : -1.0;
  const double val = s * (s + 1.0) - m * (m + shift);
  return val > 0.0 ? std::sqrt(val) : 0.0;
}

namespace {

using Triplet = Eigen::Triplet<double>;

void check_site(const QuantumBasis& basis, int site) {
  if (site < 0 || site >= basis.sites()) throw InvalidArgument("site index out of range");
}

SparseOperator from_triplets(const QuantumBasis& basis, const std::vector<Triplet>& t) {
  const auto d = static_cast<Eigen::Index>(basis.dimension());
  SparseOperator op(d, d);
  op.setFromTriplets(t.begin(), t.end());
  op.makeCompressed();
  return op;
}

// Applies a map (photons, excitations) -> (photons', excitations', value) on
// one site; zero values are skipped.
template <typename Fn>
SparseOperator local_operator(const QuantumBasis& basis, int site, Fn fn) {
  check_site(basis, site);
  std::vector<Triplet> t;
  t.reserve(basis.dimension());
  std::vector<LocalLevel> lv;
  for (std::size_t col = 0; col < basis.dimension(); ++col) {
    lv = basis.levels(col);
    LocalLevel out = lv[site];
    const double v = fn(out);
    if (v == 0.0) continue;
    lv[site] = out;
    t.emplace_back(static_cast<int>(basis.index(lv)), static_cast<int>(col), v);
  }
  return from_triplets(basis, t);
}

}  // namespace

SparseOperator annihilation(const QuantumBasis& basis, int site) {
  return local_operator(basis, site, [](LocalLevel& lv) {
    if (lv.photons == 0) return 0.0;
    const double v = std::sqrt(static_cast<double>(lv.photons));
    --lv.photons;
    return v;
  });
}

SparseOperator creation(const QuantumBasis& basis, int site) {
  return SparseOperator(annihilation(basis, site).transpose());
}

SparseOperator photon_number(const QuantumBasis& basis, int site) {
  return local_operator(basis, site,
                        [](LocalLevel& lv) { return static_cast<double>(lv.photons); });
}

SparseOperator spin_lowering(const QuantumBasis& basis, int site) {
  const int n = basis.atoms();
  return local_operator(basis, site, [n](LocalLevel& lv) {
    if (lv.excitations == 0) return 0.0;
    const double v = dicke_ladder_element(n, lv.excitations - 0.5 * n, Ladder::lower);
    --lv.excitations;
    return v;
  });
}

SparseOperator spin_raising(const QuantumBasis& basis, int site) {
  return SparseOperator(spin_lowering(basis, site).transpose());
}

SparseOperator spin_z(const QuantumBasis& basis, int site) {
  const int n = basis.atoms();
  return local_operator(basis, site,
                        [n](LocalLevel& lv) { return lv.excitations - 0.5 * n; });
}

SparseOperator identity(const QuantumBasis& basis) {
  const auto d = static_cast<Eigen::Index>(basis.dimension());
  SparseOperator op(d, d);
  op.setIdentity();
  return op;
}

SparseOperator total_excitation(const QuantumBasis& basis) {
  SparseOperator total = identity(basis) * 0.0;
  for (int j = 0; j < basis.sites(); ++j)
    total += photon_number(basis, j) + spin_z(basis, j) + 0.5 * basis.atoms() * identity(basis);
  total.prune(0.0);
  return total;
}

SparseOperator build_hamiltonian(const ModelParams& params, const QuantumBasis& basis) {
  if (params.sites != basis.sites() || params.atoms != basis.atoms())
    throw ShapeMismatch("model parameters and quantum basis disagree on sites or atoms");
  params.validate();
  const int m = basis.sites();
  const int cutoff = basis.photon_cutoff();
  const int n_atoms = basis.atoms();

  // Only one ordering of each term is generated; the transpose is added
  // afterwards so the result is symmetric bit for bit.
  std::vector<Triplet> half;
  std::vector<std::pair<int, int>> bonds;
  if (m > 1) {
    const int count = basis.boundary() == Boundary::periodic ? m : m - 1;
    for (int j = 0; j < count; ++j) bonds.emplace_back(j, (j + 1) % m);
  }

  std::vector<LocalLevel> lv;
  for (std::size_t col = 0; col < basis.dimension(); ++col) {
    lv = basis.levels(col);
    // -J a_j a_r^dag
    if (params.hopping != 0.0) {
      for (const auto& [j, r] : bonds) {
        if (lv[j].photons == 0 || lv[r].photons == cutoff) continue;
        auto out = lv;
        const double v = std::sqrt(static_cast<double>(lv[j].photons) *
                                   static_cast<double>(lv[r].photons + 1));
        --out[j].photons;
        ++out[r].photons;
        half.emplace_back(static_cast<int>(basis.index(out)), static_cast<int>(col),
                          -params.hopping * v);
      }
    }
    // Omega a_j^dag S^-_j
    if (params.coupling != 0.0) {
      for (int j = 0; j < m; ++j) {
        if (lv[j].excitations == 0 || lv[j].photons == cutoff) continue;
        auto out = lv;
        const double v =
            std::sqrt(static_cast<double>(lv[j].photons + 1)) *
            dicke_ladder_element(n_atoms, lv[j].excitations - 0.5 * n_atoms, Ladder::lower);
        ++out[j].photons;
        --out[j].excitations;
        half.emplace_back(static_cast<int>(basis.index(out)), static_cast<int>(col),
                          params.coupling * v);
      }
    }
  }
  std::vector<Triplet> all = half;
  all.reserve(2 * half.size());
  for (const auto& t : half) all.emplace_back(t.col(), t.row(), t.value());
  return from_triplets(basis, all);
}

namespace {

Eigen::VectorXcd apply_real(const SparseOperator& op, const Eigen::VectorXcd& v) {
  const Eigen::VectorXd re = op * v.real();
  const Eigen::VectorXd im = op * v.imag();
  Eigen::VectorXcd out(v.size());
  out.real() = re;
  out.imag() = im;
  return out;
}

}  // namespace

struct QuantumPropagator::Impl {
  bool dense = false;
  // dense path
  Eigen::MatrixXd vectors;
  Eigen::VectorXd energies;
  // krylov path
  SparseOperator h;
  double tol = 1e-13;
  int krylov_dim = 40;

  Eigen::VectorXcd krylov_step(const Eigen::VectorXcd& psi, double& tau, bool& done) const;
  Eigen::VectorXcd krylov(const Eigen::VectorXcd& psi, double t) const;
};

Eigen::VectorXcd QuantumPropagator::Impl::krylov_step(const Eigen::VectorXcd& psi, double& tau,
                                                      bool& exact) const {
  const Eigen::Index d = psi.size();
  const double beta0 = psi.norm();
  const int mmax = static_cast<int>(std::min<Eigen::Index>(krylov_dim, d));
  Eigen::MatrixXcd v(d, mmax + 1);
  std::vector<double> diag;
  std::vector<double> off;
  v.col(0) = psi / beta0;
  int m = 0;
  double beta_last = 0.0;
  exact = false;
  for (int j = 0; j < mmax; ++j) {
    Eigen::VectorXcd w = apply_real(h, v.col(j));
    const double a = v.col(j).dot(w).real();
    diag.push_back(a);
    // Full reorthogonalisation, twice.
    for (int pass = 0; pass < 2; ++pass)
      w -= v.leftCols(j + 1) * (v.leftCols(j + 1).adjoint() * w);
    const double b = w.norm();
    m = j + 1;
    if (b < 1e-12 * (std::abs(a) + 1.0)) {
      exact = true;
      break;
    }
    if (j + 1 < mmax) off.push_back(b);
    beta_last = b;
    v.col(j + 1) = w / b;
  }

  Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i) tri(i, i) = diag[i];
  for (int i = 0; i + 1 < m; ++i) tri(i, i + 1) = tri(i + 1, i) = off[i];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(tri);
  const Eigen::MatrixXd& q = es.eigenvectors();
  const Eigen::VectorXd& lam = es.eigenvalues();

  auto coeffs_for = [&](double step) {
    Eigen::VectorXcd c(m);
    for (int i = 0; i < m; ++i) c[i] = std::polar(q(0, i), -lam[i] * step);
    return Eigen::VectorXcd(q.cast<Complex>() * c);
  };

  Eigen::VectorXcd c = coeffs_for(tau);
  if (!exact) {
    int halvings = 0;
    while (beta_last * std::abs(c[m - 1]) > tol) {
      tau *= 0.5;
      if (++halvings > 60) throw NonConvergence("Krylov propagation failed to converge");
      c = coeffs_for(tau);
    }
  }
  return beta0 * (v.leftCols(m) * c);
}

Eigen::VectorXcd QuantumPropagator::Impl::krylov(const Eigen::VectorXcd& psi, double t) const {
  Eigen::VectorXcd cur = psi;
  double done = 0.0;
  double step = t;
  int iterations = 0;
  while (std::abs(t - done) > 1e-15 * std::max(1.0, std::abs(t))) {
    double tau = step;
    if (std::abs(tau) > std::abs(t - done)) tau = t - done;
    bool exact = false;
    cur = krylov_step(cur, tau, exact);
    done += tau;
    step = exact ? t - done : 2.0 * tau;
    if (++iterations > 100000) throw NonConvergence("Krylov propagation took too many steps");
  }
  return cur;
}

QuantumPropagator::QuantumPropagator(const SparseOperator& hamiltonian, Path path,
                                     double krylov_tol)
    : impl_(std::make_unique<Impl>()) {
  const auto d = static_cast<std::size_t>(hamiltonian.rows());
  if (hamiltonian.rows() != hamiltonian.cols())
    throw ShapeMismatch("Hamiltonian must be square");
  impl_->dense = path == Path::dense || (path == Path::automatic && d <= kDenseLimit);
  if (impl_->dense) {
    const Eigen::MatrixXd dense = Eigen::MatrixXd(hamiltonian);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense);
    if (es.info() != Eigen::Success)
      throw NonConvergence("dense eigendecomposition of the Hamiltonian failed");
    impl_->vectors = es.eigenvectors();
    impl_->energies = es.eigenvalues();
  } else {
    impl_->h = hamiltonian;
    impl_->tol = krylov_tol;
  }
}

QuantumPropagator::~QuantumPropagator() = default;
QuantumPropagator::QuantumPropagator(QuantumPropagator&&) noexcept = default;
QuantumPropagator& QuantumPropagator::operator=(QuantumPropagator&&) noexcept = default;

bool QuantumPropagator::dense() const { return impl_->dense; }

QuantumState QuantumPropagator::evolve(const QuantumState& psi, double t) const {
  QuantumState out;
  out.t = psi.t + t;
  if (t == 0.0) {
    out.amplitudes = psi.amplitudes;
    return out;
  }
  if (impl_->dense) {
    if (psi.amplitudes.size() != impl_->vectors.rows())
      throw ShapeMismatch("state dimension differs from the Hamiltonian");
    const Eigen::MatrixXd& v = impl_->vectors;
    Eigen::VectorXcd c(v.cols());
    c.real() = v.transpose() * psi.amplitudes.real();
    c.imag() = v.transpose() * psi.amplitudes.imag();
    for (Eigen::Index i = 0; i < c.size(); ++i) c[i] *= std::polar(1.0, -impl_->energies[i] * t);
    out.amplitudes.resize(c.size());
    out.amplitudes.real() = v * c.real();
    out.amplitudes.imag() = v * c.imag();
  } else {
    if (psi.amplitudes.size() != impl_->h.rows())
      throw ShapeMismatch("state dimension differs from the Hamiltonian");
    out.amplitudes = impl_->krylov(psi.amplitudes, t);
  }
  return out;
}

QuantumState evolve_quantum(const QuantumState& psi0, const SparseOperator& hamiltonian,
                            double t) {
  return QuantumPropagator(hamiltonian).evolve(psi0, t);
}

double coherent_truncation_weight(Complex alpha, int photon_cutoff) {
  const double mean = std::norm(alpha);
  // Summing the tail directly avoids the cancellation in 1 - kept.
  double term = std::exp(-mean);
  for (int n = 0; n <= photon_cutoff; ++n) term *= mean / (n + 1);
  double tail = 0.0;
  for (int n = photon_cutoff + 1; n < photon_cutoff + 400 && term > 0.0; ++n) {
    tail += term;
    term *= mean / (n + 1);
    if (term < tail * 1e-18) break;
  }
  return tail;
}

QuantumState coherent_spin_coherent_state(std::span<const Complex> alpha0,
                                          std::span<const Complex> beta0,
                                          const QuantumBasis& basis, double max_truncation) {
  const int m = basis.sites();
  if (alpha0.size() != static_cast<std::size_t>(m) || beta0.size() != static_cast<std::size_t>(m))
    throw ShapeMismatch("need one alpha and one beta per site");
  const int cutoff = basis.photon_cutoff();
  const int n_atoms = basis.atoms();

  std::vector<Eigen::VectorXcd> locals;
  for (int j = 0; j < m; ++j) {
    const double weight = coherent_truncation_weight(alpha0[j], cutoff);
    if (weight > max_truncation) {
      std::ostringstream os;
      os << "coherent amplitude " << std::abs(alpha0[j]) << " on site " << j
         << " leaves weight " << weight << " above the photon cutoff " << cutoff;
      throw TruncationWeight(os.str());
    }
    Eigen::VectorXcd photon(cutoff + 1);
    Complex c = std::exp(-0.5 * std::norm(alpha0[j]));
    for (int n = 0; n <= cutoff; ++n) {
      photon[n] = c;
      c *= alpha0[j] / std::sqrt(static_cast<double>(n + 1));
    }
    photon /= photon.norm();

    const double load = std::norm(beta0[j]) / n_atoms;
    if (load > 1.0) throw InvalidArgument("|beta|^2 / N must not exceed 1");
    const double s = std::sqrt(load);
    const double co = std::sqrt(1.0 - load);
    const double phase = std::arg(beta0[j]);
    Eigen::VectorXcd spin(n_atoms + 1);
    double binom = 1.0;
    for (int e = 0; e <= n_atoms; ++e) {
      const double mag = std::sqrt(binom) * std::pow(s, e) * std::pow(co, n_atoms - e);
      spin[e] = std::polar(mag, e * phase);
      binom = binom * (n_atoms - e) / (e + 1);
    }

    Eigen::VectorXcd local(basis.local_dimension());
    for (int n = 0; n <= cutoff; ++n)
      for (int e = 0; e <= n_atoms; ++e) local[n * (n_atoms + 1) + e] = photon[n] * spin[e];
    locals.push_back(std::move(local));
  }

  QuantumState out;
  out.amplitudes.resize(static_cast<Eigen::Index>(basis.dimension()));
  const std::size_t ld = basis.local_dimension();
  for (std::size_t idx = 0; idx < basis.dimension(); ++idx) {
    Complex amp{1.0, 0.0};
    std::size_t rest = idx;
    for (int j = 0; j < m; ++j) {
      amp *= locals[j][static_cast<Eigen::Index>(rest % ld)];
      rest /= ld;
    }
    out.amplitudes[static_cast<Eigen::Index>(idx)] = amp;
  }
  return out;
}

Complex expectation(const SparseOperator& op, const QuantumState& state) {
  if (op.rows() != state.amplitudes.size())
    throw ShapeMismatch("operator and state dimensions differ");
  return state.amplitudes.dot(apply_real(op, state.amplitudes));
}

double state_norm(const QuantumState& state) { return state.amplitudes.norm(); }

double cutoff_population(const QuantumState& state, const QuantumBasis& basis) {
  std::vector<double> pop(basis.sites(), 0.0);
  for (std::size_t idx = 0; idx < basis.dimension(); ++idx) {
    const double p = std::norm(state.amplitudes[static_cast<Eigen::Index>(idx)]);
    if (p == 0.0) continue;
    for (int j = 0; j < basis.sites(); ++j)
      if (basis.level(idx, j).photons == basis.photon_cutoff()) pop[j] += p;
  }
  double peak = 0.0;
  for (double p : pop) peak = std::max(peak, p);
  return peak;
}

double operator_norm(const SparseOperator& op) { return op.norm(); }

}  // namespace cavsol
