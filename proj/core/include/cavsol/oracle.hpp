#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "cavsol/model.hpp"

namespace cavsol {

// Photon count and ensemble excitation count (S + m, 0..N) of one site.
struct LocalLevel {
  int photons = 0;
  int excitations = 0;

  friend bool operator==(const LocalLevel&, const LocalLevel&) = default;
};

// Product basis of truncated Fock spaces and symmetric Dicke sectors.
// Site 0 is the least significant digit of the global index.
class QuantumBasis {
 public:
  static constexpr std::size_t kMaxDimension = 20000;

  // Throws DimensionOverflow above kMaxDimension.
  QuantumBasis(int sites, int photon_cutoff, int atoms, Boundary boundary = Boundary::periodic);

  int sites() const { return sites_; }
  int photon_cutoff() const { return photon_cutoff_; }
  int atoms() const { return atoms_; }
  Boundary boundary() const { return boundary_; }
  std::size_t local_dimension() const { return local_; }
  std::size_t dimension() const { return dim_; }

  std::size_t index(std::span<const LocalLevel> levels) const;
  std::vector<LocalLevel> levels(std::size_t index) const;
  LocalLevel level(std::size_t index, int site) const;

 private:
  int sites_;
  int photon_cutoff_;
  int atoms_;
  Boundary boundary_;
  std::size_t local_;
  std::size_t dim_;
  std::vector<std::size_t> stride_;
};

using SparseOperator = Eigen::SparseMatrix<double, Eigen::RowMajor>;

struct QuantumState {
  Eigen::VectorXcd amplitudes;
  double t = 0.0;
};

enum class Ladder { raise, lower };

// <S, m +- 1| S+- |S, m> = sqrt(S(S+1) - m(m +- 1)) with S = N/2.
// m must be one of -S, -S+1, ..., S; throws InvalidArgument otherwise.
double dicke_ladder_element(int atoms, double m, Ladder ladder);

SparseOperator annihilation(const QuantumBasis& basis, int site);
SparseOperator creation(const QuantumBasis& basis, int site);
SparseOperator photon_number(const QuantumBasis& basis, int site);
SparseOperator spin_lowering(const QuantumBasis& basis, int site);
SparseOperator spin_raising(const QuantumBasis& basis, int site);
SparseOperator spin_z(const QuantumBasis& basis, int site);
SparseOperator identity(const QuantumBasis& basis);

// sum_j (a_j^dag a_j + S^z_j + N/2).
SparseOperator total_excitation(const QuantumBasis& basis);

// -J sum_bonds (a_j a_{j+1}^dag + h.c.) + Omega sum_j (a_j^dag S^-_j + h.c.),
// bonds per the basis boundary rule. Photon creation at the cutoff is dropped.
SparseOperator build_hamiltonian(const ModelParams& params, const QuantumBasis& basis);

// exp(-i H t) on states. Dense eigendecomposition up to kDenseLimit,
// Lanczos propagation above.
class QuantumPropagator {
 public:
  static constexpr std::size_t kDenseLimit = 2000;

  enum class Path { automatic, dense, krylov };

  explicit QuantumPropagator(const SparseOperator& hamiltonian, Path path = Path::automatic,
                             double krylov_tol = 1e-13);
  ~QuantumPropagator();
  QuantumPropagator(QuantumPropagator&&) noexcept;
  QuantumPropagator& operator=(QuantumPropagator&&) noexcept;

  bool dense() const;

  // Advances by duration t; the result's time stamp is psi.t + t.
  QuantumState evolve(const QuantumState& psi, double t) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

QuantumState evolve_quantum(const QuantumState& psi0, const SparseOperator& hamiltonian,
                            double t);

// Product of truncated Glauber states (alpha0 per site) and spin-coherent
// states whose HP amplitude is beta0 per site: sin^2(theta/2) = |beta|^2/N,
// so <S^-> = sqrt(N) sqrt(1 - |beta|^2/N) beta. Throws TruncationWeight when
// the Fock weight beyond the cutoff exceeds max_truncation on any site.
QuantumState coherent_spin_coherent_state(std::span<const Complex> alpha0,
                                          std::span<const Complex> beta0,
                                          const QuantumBasis& basis,
                                          double max_truncation = 1e-8);

// Weight of a Glauber state above the photon cutoff.
double coherent_truncation_weight(Complex alpha, int photon_cutoff);

Complex expectation(const SparseOperator& op, const QuantumState& state);

double state_norm(const QuantumState& state);

// max over sites of the population in the top Fock level.
double cutoff_population(const QuantumState& state, const QuantumBasis& basis);

// Frobenius norm of a sparse operator.
double operator_norm(const SparseOperator& op);

}  // namespace cavsol
