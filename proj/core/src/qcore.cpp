#include "bellthresh/qcore.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace bellthresh::qcore {

namespace {

bool all_finite(std::span<const Complex> values) {
  return std::all_of(values.begin(), values.end(), [](const Complex& z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
  });
}

double max_abs_diff(const Operator& a, const Operator& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.entries().size(); ++i) {
    worst = std::max(worst, std::abs(a.entries()[i] - b.entries()[i]));
  }
  return worst;
}

void validate(const Operator& op) {
  switch (op.kind()) {
    case OperatorKind::generic:
      return;
    case OperatorKind::unitary: {
      const Operator gram = op.adjoint() * op;
      if (max_abs_diff(gram, Operator::identity(op.dim())) > kStructureTol) {
        throw std::invalid_argument("operator tagged unitary is not unitary");
      }
      return;
    }
    case OperatorKind::projector: {
      if (max_abs_diff(op, op.adjoint()) > kStructureTol) {
        throw std::invalid_argument("operator tagged projector is not Hermitian");
      }
      if (max_abs_diff(op * op, op) > kStructureTol) {
        throw std::invalid_argument("operator tagged projector is not idempotent");
      }
      return;
    }
    case OperatorKind::density: {
      if (max_abs_diff(op, op.adjoint()) > kStructureTol) {
        throw std::invalid_argument("density operator is not Hermitian");
      }
      if (std::abs(op.trace() - Complex{1.0, 0.0}) > kStructureTol) {
        throw std::invalid_argument("density operator does not have unit trace");
      }
      if (!is_positive_semidefinite(op)) {
        throw std::invalid_argument("density operator has a negative eigenvalue");
      }
      return;
    }
  }
}

}  // namespace

const char* to_string(OperatorKind kind) noexcept {
  switch (kind) {
    case OperatorKind::generic: return "generic";
    case OperatorKind::unitary: return "unitary";
    case OperatorKind::projector: return "projector";
    case OperatorKind::density: return "density";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// StateVector

StateVector::StateVector(std::vector<Complex> amps) : amps_(std::move(amps)) {
  if (amps_.empty()) throw std::invalid_argument("state vector must have positive dimension");
  if (!all_finite(amps_)) throw std::invalid_argument("state vector has non-finite amplitudes");
  double norm2 = 0.0;
  for (const auto& z : amps_) norm2 += std::norm(z);
  if (norm2 <= 0.0) throw std::invalid_argument("state vector has zero norm");
  const double scale = 1.0 / std::sqrt(norm2);
  for (auto& z : amps_) z *= scale;
}

StateVector StateVector::basis(std::size_t dim, std::size_t index) {
  if (index >= dim) throw std::invalid_argument("basis index out of range");
  std::vector<Complex> amps(dim);
  amps[index] = 1.0;
  return StateVector(std::move(amps));
}

// ---------------------------------------------------------------------------
// Operator

Operator::Operator(std::size_t dim, std::vector<Complex> entries, OperatorKind kind)
    : dim_(dim), entries_(std::move(entries)), kind_(kind) {
  if (dim_ == 0) throw std::invalid_argument("operator must have positive dimension");
  if (entries_.size() != dim_ * dim_) {
    throw std::invalid_argument("operator needs dim*dim entries, got " +
                                std::to_string(entries_.size()));
  }
  if (!all_finite(entries_)) throw std::invalid_argument("operator has non-finite entries");
  validate(*this);
}

Operator Operator::identity(std::size_t dim) {
  std::vector<Complex> e(dim * dim);
  for (std::size_t i = 0; i < dim; ++i) e[i * dim + i] = 1.0;
  // Skip validation recursion: identity is trivially unitary.
  Operator id(dim, std::move(e), OperatorKind::generic);
  id.kind_ = OperatorKind::unitary;
  return id;
}

Operator Operator::projector_onto(const StateVector& v) {
  const std::size_t n = v.dim();
  std::vector<Complex> e(n * n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) e[r * n + c] = v[r] * std::conj(v[c]);
  }
  return Operator(n, std::move(e), OperatorKind::projector);
}

Operator Operator::pure_density(const StateVector& psi) {
  return projector_onto(psi).retagged(OperatorKind::density);
}

Operator Operator::adjoint() const {
  std::vector<Complex> e(entries_.size());
  for (std::size_t r = 0; r < dim_; ++r) {
    for (std::size_t c = 0; c < dim_; ++c) e[c * dim_ + r] = std::conj(entries_[r * dim_ + c]);
  }
  Operator out(dim_, std::move(e), OperatorKind::generic);
  out.kind_ = kind_;  // adjoint preserves every tag's invariants
  return out;
}

Complex Operator::trace() const {
  Complex t{};
  for (std::size_t i = 0; i < dim_; ++i) t += entries_[i * dim_ + i];
  return t;
}

Operator Operator::retagged(OperatorKind kind) const {
  return Operator(dim_, entries_, kind);
}

Operator operator*(const Operator& lhs, const Operator& rhs) {
  if (lhs.dim() != rhs.dim()) throw std::invalid_argument("operator product dimension mismatch");
  const std::size_t n = lhs.dim();
  std::vector<Complex> e(n * n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t k = 0; k < n; ++k) {
      const Complex a = lhs(r, k);
      for (std::size_t c = 0; c < n; ++c) e[r * n + c] += a * rhs(k, c);
    }
  }
  return Operator(n, std::move(e));
}

std::vector<Complex> apply(const Operator& op, const StateVector& v) {
  if (op.dim() != v.dim()) throw std::invalid_argument("operator/state dimension mismatch");
  const std::size_t n = v.dim();
  std::vector<Complex> out(n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) out[r] += op(r, c) * v[c];
  }
  return out;
}

Operator mix(const Operator& a, const Operator& b, double weight_a) {
  if (a.dim() != b.dim()) throw std::invalid_argument("mix dimension mismatch");
  if (!(weight_a >= 0.0 && weight_a <= 1.0)) throw std::invalid_argument("mix weight outside [0,1]");
  std::vector<Complex> e(a.entries().size());
  for (std::size_t i = 0; i < e.size(); ++i) {
    e[i] = weight_a * a.entries()[i] + (1.0 - weight_a) * b.entries()[i];
  }
  const bool both_density =
      a.kind() == OperatorKind::density && b.kind() == OperatorKind::density;
  return Operator(a.dim(), std::move(e), both_density ? OperatorKind::density : OperatorKind::generic);
}

Operator tensor(const Operator& a, const Operator& b) {
  const std::size_t na = a.dim();
  const std::size_t nb = b.dim();
  const std::size_t n = na * nb;
  std::vector<Complex> e(n * n);
  for (std::size_t ra = 0; ra < na; ++ra) {
    for (std::size_t ca = 0; ca < na; ++ca) {
      const Complex x = a(ra, ca);
      for (std::size_t rb = 0; rb < nb; ++rb) {
        for (std::size_t cb = 0; cb < nb; ++cb) {
          e[(ra * nb + rb) * n + (ca * nb + cb)] = x * b(rb, cb);
        }
      }
    }
  }
  const OperatorKind kind = a.kind() == b.kind() ? a.kind() : OperatorKind::generic;
  return Operator(n, std::move(e), kind);
}

StateVector tensor(const StateVector& a, const StateVector& b) {
  std::vector<Complex> amps(a.dim() * b.dim());
  for (std::size_t i = 0; i < a.dim(); ++i) {
    for (std::size_t j = 0; j < b.dim(); ++j) amps[i * b.dim() + j] = a[i] * b[j];
  }
  return StateVector(std::move(amps));
}

Tensorable tensor(const Tensorable& a, const Tensorable& b) {
  if (a.index() != b.index()) {
    throw std::invalid_argument("tensor product of a state vector with an operator");
  }
  if (const auto* va = std::get_if<StateVector>(&a)) {
    return tensor(*va, std::get<StateVector>(b));
  }
  return tensor(std::get<Operator>(a), std::get<Operator>(b));
}

std::size_t dim(const QuantumState& state) {
  return std::visit([](const auto& s) { return s.dim(); }, state);
}

double clamp_probability(double p) {
  if (!std::isfinite(p) || p < -kClampTol || p > 1.0 + kClampTol) {
    throw std::logic_error("probability " + std::to_string(p) +
                           " outside [0,1] beyond roundoff tolerance");
  }
  return std::clamp(p, 0.0, 1.0);
}

double probability(const QuantumState& state, const Operator& proj) {
  if (proj.kind() != OperatorKind::projector) {
    throw std::invalid_argument("probability requires a projector-kind operator");
  }
  if (dim(state) != proj.dim()) throw std::invalid_argument("state/projector dimension mismatch");
  const std::size_t n = proj.dim();
  double value = 0.0;
  if (const auto* psi = std::get_if<StateVector>(&state)) {
    const auto p_psi = apply(proj, *psi);
    Complex acc{};
    for (std::size_t i = 0; i < n; ++i) acc += std::conj((*psi)[i]) * p_psi[i];
    value = acc.real();
  } else {
    const auto& rho = std::get<Operator>(state);
    if (rho.kind() != OperatorKind::density) {
      throw std::invalid_argument("mixed state must be a density-kind operator");
    }
    Complex acc{};
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = 0; c < n; ++c) acc += rho(r, c) * proj(c, r);
    }
    value = acc.real();
  }
  return clamp_probability(value);
}

double partial_projection_probability(const QuantumState& state, Party party,
                                      const Operator& local_proj) {
  const std::size_t total = dim(state);
  const std::size_t local = local_proj.dim();
  if (local == 0 || total % local != 0) {
    throw std::invalid_argument("local projector dimension does not divide the state dimension");
  }
  const Operator other = Operator::identity(total / local).retagged(OperatorKind::projector);
  const Operator embedded =
      party == Party::A ? tensor(local_proj, other) : tensor(other, local_proj);
  return probability(state, embedded);
}

bool is_positive_semidefinite(const Operator& hermitian, double floor) {
  // Cholesky of H - floor*I succeeds (all pivots > 0) iff every eigenvalue
  // of H exceeds floor.
  const std::size_t n = hermitian.dim();
  std::vector<Complex> l(n * n);
  for (std::size_t j = 0; j < n; ++j) {
    double diag = hermitian(j, j).real() - floor;
    for (std::size_t k = 0; k < j; ++k) diag -= std::norm(l[j * n + k]);
    if (!(diag > 0.0)) return false;
    const double ljj = std::sqrt(diag);
    l[j * n + j] = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      Complex s = hermitian(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l[i * n + k] * std::conj(l[j * n + k]);
      l[i * n + j] = s / ljj;
    }
  }
  return true;
}

}  // namespace bellthresh::qcore
