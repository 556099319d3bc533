// Copyright 2026 The misca Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "misca/graph.hpp"

namespace misca {

inline constexpr int kDenseQuantumLimit = 10;
inline constexpr int kSparseQuantumLimit = 14;

// --- basis -----------------------------------------------------------------

enum class BasisKind {
  Full,         ///< all 2^N computational states
  Independent,  ///< independent-set configurations only
};

std::string_view to_string(BasisKind k);
BasisKind basis_kind_from_string(std::string_view s);

/// Ordered set of computational basis states a density matrix is written in.
/// The independent subspace is invariant under the PXP Hamiltonian and under
/// every jump operator restricted to it, so it is exact for vacuum starts.
class Basis {
 public:
  static Basis full(const Graph& g, int limit = kDenseQuantumLimit);
  static Basis independent(const Graph& g, int limit = kSparseQuantumLimit);
  static Basis make(const Graph& g, BasisKind kind);
  /// States must be strictly increasing.
  static Basis from_states(BasisKind kind, int n, std::vector<StateIndex> states);

  BasisKind kind() const noexcept { return kind_; }
  int num_qubits() const noexcept { return n_; }
  std::size_t dim() const noexcept { return states_.size(); }
  StateIndex state(std::size_t pos) const { return states_[pos]; }
  const std::vector<StateIndex>& states() const noexcept { return states_; }
  /// Position of s, or nullopt when s lies outside the basis.
  std::optional<std::size_t> find(StateIndex s) const;

  friend bool operator==(const Basis& a, const Basis& b) {
    return a.kind_ == b.kind_ && a.n_ == b.n_ && a.states_ == b.states_;
  }

 private:
  Basis(BasisKind kind, int n, std::vector<StateIndex> states) : kind_(kind), n_(n), states_(std::move(states)) {}
  BasisKind kind_;
  int n_;
  std::vector<StateIndex> states_;
};

// --- jump operators --------------------------------------------------------

enum class JumpKind { On, Off };

/// Partial permutation of basis states with unit amplitude.
struct JumpOperator {
  int vertex = 0;
  JumpKind kind = JumpKind::On;
  StateIndex mask = 0;  ///< required neighbour pattern (global bits); 0 for On
  /// (source position, target position) pairs; sources are distinct.
  std::vector<std::pair<std::uint32_t, std::uint32_t>> map;

  /// Action on a computational state, independent of any basis.
  std::optional<StateIndex> apply(const Graph& g, StateIndex s) const;
};

class JumpOperatorSet {
 public:
  const Basis& basis() const noexcept { return basis_; }
  const std::vector<JumpOperator>& ops() const noexcept { return ops_; }
  std::size_t size() const noexcept { return ops_.size(); }
  /// Number of operators whose domain contains each basis position.
  const std::vector<int>& domain_count() const noexcept { return domain_count_; }
  /// Sparse matrix of operator k over the basis.
  Eigen::SparseMatrix<double> to_matrix(std::size_t k) const;

 private:
  friend JumpOperatorSet build_jump_operators(const Graph& g, const Basis& basis);
  explicit JumpOperatorSet(Basis basis) : basis_(std::move(basis)) {}
  Basis basis_;
  std::vector<JumpOperator> ops_;
  std::vector<int> domain_count_;
};

/// One On operator per vertex and one Off operator per nonzero neighbour
/// pattern: sum_i 2^deg(i) operators in total.
JumpOperatorSet build_jump_operators(const Graph& g, const Basis& basis);
JumpOperatorSet build_jump_operators(const Graph& g);

// --- PXP Hamiltonian -------------------------------------------------------

struct PxpHamiltonian {
  Basis basis;
  Eigen::SparseMatrix<double> matrix;  ///< real symmetric
  /// (vertex, source position, target position) of every nonzero entry.
  std::vector<std::tuple<int, std::uint32_t, std::uint32_t>> terms;
};

PxpHamiltonian build_pxp(const Graph& g, const Basis& basis);
PxpHamiltonian build_pxp(const Graph& g);

// --- density matrices ------------------------------------------------------

/// rho over a basis. Storage is column-major, so the raw data is the
/// vectorization |rho>>.
class DensityMatrix {
 public:
  explicit DensityMatrix(Basis basis);
  static DensityMatrix projector(Basis basis, StateIndex s);
  /// Diagonal state with the given populations (indexed by basis position).
  static DensityMatrix diagonal(Basis basis, const std::vector<double>& populations);

  const Basis& basis() const noexcept { return basis_; }
  std::size_t dim() const noexcept { return basis_.dim(); }
  Eigen::MatrixXcd& matrix() noexcept { return m_; }
  const Eigen::MatrixXcd& matrix() const noexcept { return m_; }

  std::complex<double> trace() const { return m_.trace(); }
  double hermiticity_error() const;
  /// Sum of |rho_ab| over a != b.
  double off_diagonal_mass() const;
  double min_eigenvalue() const;
  std::vector<double> populations() const;
  /// Population of a computational state; 0 outside the basis.
  double population(StateIndex s) const;

 private:
  Basis basis_;
  Eigen::MatrixXcd m_;
};

/// <<a|b>> = Tr[a^dagger b].
std::complex<double> overlap(const DensityMatrix& a, const DensityMatrix& b);

/// Raw checkpoint: one JSON header line, then dim^2 little-endian complex128
/// values in column-major order.
void write_checkpoint(const std::string& path, const DensityMatrix& rho);
DensityMatrix read_checkpoint(const std::string& path);

// --- evolution -------------------------------------------------------------

struct DissipativeOptions {
  double t_max = 1e4;
  double tol = 1e-5;          ///< stationarity threshold
  double checkpoint = 0.01;   ///< spacing of stationarity checks
  /// When set, integrate for exactly this duration and skip the criterion.
  std::optional<double> fixed_duration;
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  double trace_drift_limit = 1e-6;
};

struct EvolveResult {
  DensityMatrix rho;
  double elapsed = 0;
  bool converged = false;
  /// ||rho(T) - rho(T - dt)||_F / ||rho(T - dt)||_F at the last checkpoint.
  double stationarity = 0;
  /// 1 - |<<rho(T-dt)|rho(T)>>| / <<rho(T-dt)|rho(T-dt)>>, reported only.
  double overlap_stationarity = 0;
};

/// Integrates d rho/dt = sum_l (L rho L^T - 1/2 {L^T L, rho}) until the
/// relative change between consecutive checkpoints drops below tol, or for a
/// fixed duration. Throws NumericalError when the trace drifts.
EvolveResult dissipative_evolve(const DensityMatrix& rho, const JumpOperatorSet& ops,
                                const DissipativeOptions& opts = {});

struct DiagonalResult {
  std::vector<double> populations;
  double elapsed = 0;
  bool converged = false;
  double stationarity = 0;
};

/// Classical master equation with rates r(s -> L(s)) = 1, the exact
/// restriction of dissipative_evolve to diagonal states.
DiagonalResult dissipative_evolve_diagonal(const std::vector<double>& populations, const JumpOperatorSet& ops,
                                           const DissipativeOptions& opts = {});

/// Exact t -> infinity limit of the dissipative stage. Every jump strictly
/// lowers (violated edges, -popcount), so pairs are processed in that order.
DensityMatrix dissipative_limit(const DensityMatrix& rho, const JumpOperatorSet& ops);
std::vector<double> dissipative_limit_diagonal(const std::vector<double>& populations, const JumpOperatorSet& ops);

/// U = exp(-i theta H) from the eigendecomposition of H.
class UnitaryPropagator {
 public:
  UnitaryPropagator(const PxpHamiltonian& h, double theta);
  double theta() const noexcept { return theta_; }
  const Eigen::MatrixXcd& matrix() const noexcept { return u_; }
  /// rho <- U rho U^dagger.
  void apply(DensityMatrix& rho) const;

 private:
  double theta_;
  Eigen::MatrixXcd u_;
};

DensityMatrix unitary_step(const DensityMatrix& rho, const PxpHamiltonian& h, double theta);

// --- protocol --------------------------------------------------------------

enum class TPolicy {
  Criterion,   ///< stationarity criterion per stage
  Fixed,       ///< fixed duration t per stage
  Asymptotic,  ///< exact t -> infinity map
};

std::string_view to_string(TPolicy p);
TPolicy t_policy_from_string(std::string_view s);

struct ProtocolParams {
  double t = 50.0;  ///< stage duration for TPolicy::Fixed
  double theta = 0.1;
  int r_max = 100;
  double target = 0.7;
  double tol = 1e-5;
  double t_max = 1e4;
  TPolicy t_policy = TPolicy::Criterion;
  BasisKind space = BasisKind::Independent;
  bool stop_at_target = true;
  /// Stop once |p_mis(r) - p_mis(r-1)| < plateau_tol; 0 disables.
  double plateau_tol = 0.0;
  int top_k = 4;
};

struct CycleRecord {
  int r = 0;
  double p_mis = 0;
  double p_maximal_total = 0;  ///< all maximal configurations, maximum included
  double p_not_independent = 0;
  double elapsed = 0;          ///< dissipative time of this stage
  bool converged = true;
  std::vector<std::pair<Config, double>> top_populations;
};

struct CycleTrace {
  std::vector<CycleRecord> cycles;  ///< cycles[0] is the initial dissipative stage
  std::optional<int> r_hit;
  std::optional<int> r_plateau;
  int mis_size = 0;
};

/// Initial dissipative stage from |0...0><0...0|, then alternations of
/// unitary_step(theta) and a dissipative stage. A stage runs on the diagonal
/// fast path when the off-diagonal mass is below 1e-12.
CycleTrace run_protocol(const Graph& g, const ProtocolParams& params, DensityMatrix* final_state = nullptr);

/// One JSON object per cycle.
std::string to_jsonl(const CycleTrace& trace, const std::string& graph_id, const Graph& g,
                     const ProtocolParams& params);

// --- three-site chain model ------------------------------------------------

/// One step of P <- P (1 - theta^4/3) + (1 - P)(2 theta^2/3 - theta^4/6).
double open_chain_recursion_step(double theta, double p);
/// P^r from P^0 = 2/3.
double open_chain_recursion(double theta, int r);
/// (4 - theta^2) / (4 + theta^2).
double open_chain_fixed_point(double theta);
/// Closed-form asymptote for three sites: 1 - theta^2 / (3 theta^2 / 4 + 1).
double asymptote_formula_3(double theta);
/// Closed-form asymptote for five sites: 1 - theta^2 / (5/16 + 147 theta^2 / 160).
/// Its leading deficit does not follow the small-angle scaling of the recursion;
/// reported next to simulation only.
double asymptote_formula_5(double theta);

struct ThresholdAngle {
  double theta = 0;    ///< from the recursion's fixed point, bisection to 1e-10
  double formula = 0;  ///< sqrt(4 (1 - T) / (4 + 3 T))
};

/// Requires T in [2/3, 1).
ThresholdAngle threshold_angle(double target);

}  // namespace misca
