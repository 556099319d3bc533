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

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "misca/error.hpp"
#include "misca/quantum.hpp"

namespace misca {

namespace {

void check_quantum_limit(const Graph& g, int limit) {
  if (g.num_vertices() > limit)
    throw LimitExceeded("quantum simulation limited to " + std::to_string(limit) + " vertices in this basis", limit);
}

}  // namespace

std::string_view to_string(BasisKind k) { return k == BasisKind::Full ? "full" : "independent"; }

BasisKind basis_kind_from_string(std::string_view s) {
  if (s == "full" || s == "dense") return BasisKind::Full;
  if (s == "independent" || s == "sparse") return BasisKind::Independent;
  throw InvalidArgument("unknown basis '" + std::string(s) + "'");
}

Basis Basis::full(const Graph& g, int limit) {
  check_quantum_limit(g, limit);
  std::vector<StateIndex> states(std::size_t{1} << g.num_vertices());
  for (std::size_t s = 0; s < states.size(); ++s) states[s] = s;
  return Basis(BasisKind::Full, g.num_vertices(), std::move(states));
}

Basis Basis::independent(const Graph& g, int limit) {
  check_quantum_limit(g, limit);
  std::vector<StateIndex> states;
  const StateIndex total = StateIndex{1} << g.num_vertices();
  for (StateIndex s = 0; s < total; ++s)
    if (is_independent(g, s)) states.push_back(s);
  return Basis(BasisKind::Independent, g.num_vertices(), std::move(states));
}

Basis Basis::make(const Graph& g, BasisKind kind) { return kind == BasisKind::Full ? full(g) : independent(g); }

Basis Basis::from_states(BasisKind kind, int n, std::vector<StateIndex> states) {
  if (n < 0 || n > kSparseQuantumLimit) throw InvalidArgument("qubit count out of range");
  for (std::size_t k = 0; k < states.size(); ++k) {
    if (states[k] >> n) throw InvalidArgument("basis state out of range");
    if (k > 0 && states[k] <= states[k - 1]) throw InvalidArgument("basis states must be strictly increasing");
  }
  if (kind == BasisKind::Full && states.size() != (std::size_t{1} << n))
    throw InvalidArgument("full basis must list all 2^n states");
  return Basis(kind, n, std::move(states));
}

std::optional<std::size_t> Basis::find(StateIndex s) const {
  if (kind_ == BasisKind::Full) {
    if (s < states_.size()) return static_cast<std::size_t>(s);
    return std::nullopt;
  }
  auto it = std::lower_bound(states_.begin(), states_.end(), s);
  if (it == states_.end() || *it != s) return std::nullopt;
  return static_cast<std::size_t>(it - states_.begin());
}

// --- jump operators --------------------------------------------------------

std::optional<StateIndex> JumpOperator::apply(const Graph& g, StateIndex s) const {
  const StateIndex bit = StateIndex{1} << vertex;
  const StateIndex nb = s & g.neighbor_mask(vertex);
  if (kind == JumpKind::On) {
    if ((s & bit) || nb) return std::nullopt;
    return s | bit;
  }
  if (!(s & bit) || nb != mask) return std::nullopt;
  return s & ~bit;
}

Eigen::SparseMatrix<double> JumpOperatorSet::to_matrix(std::size_t k) const {
  const auto d = static_cast<Eigen::Index>(basis_.dim());
  std::vector<Eigen::Triplet<double>> trip;
  for (auto [src, dst] : ops_.at(k).map) trip.emplace_back(dst, src, 1.0);
  Eigen::SparseMatrix<double> m(d, d);
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

JumpOperatorSet build_jump_operators(const Graph& g, const Basis& basis) {
  if (basis.num_qubits() != g.num_vertices()) throw InvalidArgument("basis does not match graph");
  const int n = g.num_vertices();
  JumpOperatorSet set(basis);
  // first[i] is the index of vertex i's On operator; Off operators follow,
  // indexed by the neighbour pattern in local bit order.
  std::vector<std::size_t> first(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    first[static_cast<std::size_t>(i)] = set.ops_.size();
    set.ops_.push_back({i, JumpKind::On, 0, {}});
    const auto& nb = g.neighbors(i);
    for (std::uint64_t c = 1; c < (std::uint64_t{1} << nb.size()); ++c) {
      StateIndex mask = 0;
      for (std::size_t k = 0; k < nb.size(); ++k)
        if (c & (std::uint64_t{1} << k)) mask |= StateIndex{1} << nb[k];
      set.ops_.push_back({i, JumpKind::Off, mask, {}});
    }
  }
  set.domain_count_.assign(basis.dim(), 0);
  for (std::size_t pos = 0; pos < basis.dim(); ++pos) {
    const StateIndex s = basis.state(pos);
    for (int i = 0; i < n; ++i) {
      const StateIndex bit = StateIndex{1} << i;
      const auto& nb = g.neighbors(i);
      std::uint64_t local = 0;
      for (std::size_t k = 0; k < nb.size(); ++k)
        if (s & (StateIndex{1} << nb[k])) local |= std::uint64_t{1} << k;
      std::size_t op;
      StateIndex target;
      if (!(s & bit)) {
        if (local) continue;
        op = first[static_cast<std::size_t>(i)];
        target = s | bit;
      } else {
        if (!local) continue;
        op = first[static_cast<std::size_t>(i)] + local;
        target = s & ~bit;
      }
      auto tpos = basis.find(target);
      if (!tpos) continue;
      set.ops_[op].map.emplace_back(static_cast<std::uint32_t>(pos), static_cast<std::uint32_t>(*tpos));
      ++set.domain_count_[pos];
    }
  }
  return set;
}

JumpOperatorSet build_jump_operators(const Graph& g) { return build_jump_operators(g, Basis::full(g)); }

// --- PXP -------------------------------------------------------------------

PxpHamiltonian build_pxp(const Graph& g, const Basis& basis) {
  if (basis.num_qubits() != g.num_vertices()) throw InvalidArgument("basis does not match graph");
  PxpHamiltonian h{basis, {}, {}};
  std::vector<Eigen::Triplet<double>> trip;
  for (std::size_t pos = 0; pos < basis.dim(); ++pos) {
    const StateIndex s = basis.state(pos);
    for (int i = 0; i < g.num_vertices(); ++i) {
      if (s & g.neighbor_mask(i)) continue;
      auto tpos = basis.find(s ^ (StateIndex{1} << i));
      if (!tpos) continue;
      trip.emplace_back(static_cast<Eigen::Index>(*tpos), static_cast<Eigen::Index>(pos), 1.0);
      h.terms.emplace_back(i, static_cast<std::uint32_t>(pos), static_cast<std::uint32_t>(*tpos));
    }
  }
  const auto d = static_cast<Eigen::Index>(basis.dim());
  h.matrix.resize(d, d);
  h.matrix.setFromTriplets(trip.begin(), trip.end());
  return h;
}

PxpHamiltonian build_pxp(const Graph& g) { return build_pxp(g, Basis::full(g)); }

// --- density matrices ------------------------------------------------------

DensityMatrix::DensityMatrix(Basis basis)
    : basis_(std::move(basis)),
      m_(Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(basis_.dim()), static_cast<Eigen::Index>(basis_.dim()))) {}

DensityMatrix DensityMatrix::projector(Basis basis, StateIndex s) {
  auto pos = basis.find(s);
  if (!pos) throw InvalidArgument("state lies outside the basis");
  DensityMatrix rho(std::move(basis));
  rho.m_(static_cast<Eigen::Index>(*pos), static_cast<Eigen::Index>(*pos)) = 1.0;
  return rho;
}

DensityMatrix DensityMatrix::diagonal(Basis basis, const std::vector<double>& populations) {
  if (populations.size() != basis.dim()) throw InvalidArgument("population vector does not match basis");
  DensityMatrix rho(std::move(basis));
  for (std::size_t k = 0; k < populations.size(); ++k)
    rho.m_(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)) = populations[k];
  return rho;
}

double DensityMatrix::hermiticity_error() const {
  if (m_.size() == 0) return 0.0;
  return (m_ - m_.adjoint()).cwiseAbs().maxCoeff();
}

double DensityMatrix::off_diagonal_mass() const {
  return m_.cwiseAbs().sum() - m_.diagonal().cwiseAbs().sum();
}

double DensityMatrix::min_eigenvalue() const {
  Eigen::MatrixXcd h = 0.5 * (m_ + m_.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("eigenvalue computation failed");
  return es.eigenvalues().minCoeff();
}

std::vector<double> DensityMatrix::populations() const {
  std::vector<double> out(dim());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = m_(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)).real();
  return out;
}

double DensityMatrix::population(StateIndex s) const {
  auto pos = basis_.find(s);
  if (!pos) return 0.0;
  return m_(static_cast<Eigen::Index>(*pos), static_cast<Eigen::Index>(*pos)).real();
}

std::complex<double> overlap(const DensityMatrix& a, const DensityMatrix& b) {
  if (!(a.basis() == b.basis())) throw InvalidArgument("overlap of density matrices over different bases");
  // Tr[a^dagger b] = sum_ij conj(a_ij) b_ij
  return a.matrix().conjugate().cwiseProduct(b.matrix()).sum();
}

// --- checkpoints -----------------------------------------------------------

namespace {

constexpr int kCheckpointVersion = 1;

void put_le(std::ostream& os, double v) {
  std::uint64_t u;
  std::memcpy(&u, &v, sizeof u);
  char buf[8];
  for (int k = 0; k < 8; ++k) buf[k] = static_cast<char>((u >> (8 * k)) & 0xFF);
  os.write(buf, 8);
}

double get_le(std::istream& is) {
  unsigned char buf[8];
  if (!is.read(reinterpret_cast<char*>(buf), 8)) throw IoError("checkpoint payload truncated");
  std::uint64_t u = 0;
  for (int k = 0; k < 8; ++k) u |= static_cast<std::uint64_t>(buf[k]) << (8 * k);
  double v;
  std::memcpy(&v, &u, sizeof v);
  return v;
}

}  // namespace

void write_checkpoint(const std::string& path, const DensityMatrix& rho) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path + " for writing");
  nlohmann::ordered_json h;
  h["format"] = "misca-density";
  h["version"] = kCheckpointVersion;
  h["n"] = rho.basis().num_qubits();
  h["basis"] = std::string(to_string(rho.basis().kind()));
  h["dim"] = rho.dim();
  if (rho.basis().kind() == BasisKind::Independent) h["states"] = rho.basis().states();
  os << h.dump() << '\n';
  const auto& m = rho.matrix();
  for (Eigen::Index k = 0; k < m.size(); ++k) {
    put_le(os, m.data()[k].real());
    put_le(os, m.data()[k].imag());
  }
  if (!os) throw IoError("failed writing " + path);
}

DensityMatrix read_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path);
  std::string line;
  if (!std::getline(is, line)) throw IoError("checkpoint header missing");
  nlohmann::json h;
  try {
    h = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("checkpoint header: ") + e.what(), 1);
  }
  if (h.value("format", "") != "misca-density" || h.value("version", 0) != kCheckpointVersion)
    throw ParseError("unsupported checkpoint format", 1);
  const int n = h.at("n").get<int>();
  const BasisKind kind = basis_kind_from_string(h.at("basis").get<std::string>());
  std::vector<StateIndex> states;
  if (kind == BasisKind::Full) {
    if (n > kDenseQuantumLimit) throw ParseError("full-basis checkpoint exceeds qubit limit", 1);
    states.resize(std::size_t{1} << n);
    for (std::size_t s = 0; s < states.size(); ++s) states[s] = s;
  } else {
    states = h.at("states").get<std::vector<StateIndex>>();
  }
  DensityMatrix rho(Basis::from_states(kind, n, std::move(states)));
  if (h.at("dim").get<std::size_t>() != rho.dim()) throw ParseError("checkpoint dim mismatch", 1);
  auto& m = rho.matrix();
  for (Eigen::Index k = 0; k < m.size(); ++k) {
    const double re = get_le(is);
    const double im = get_le(is);
    m.data()[k] = {re, im};
  }
  return rho;
}

}  // namespace misca
