#include "dacurv/polynomial.hpp"

#include <algorithm>
#include <cstdio>

namespace dacurv {

NumericPolynomial to_numeric(const Polynomial& p) {
  NumericPolynomial out;
  for (const auto& [e, c] : p.terms()) out.add_term(e, c.get_d());
  return out;
}

std::string scalar_to_string(const Rational& c) { return c.get_str(); }

std::string scalar_to_string(double c) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", c);
  return buf;
}

VectorPolynomial::VectorPolynomial(std::vector<Polynomial> components)
    : components_(std::move(components)) {
  if (components_.empty()) throw InputError("vector polynomial needs at least one component");
}

bool VectorPolynomial::is_zero() const {
  return std::all_of(components_.begin(), components_.end(),
                     [](const Polynomial& p) { return p.is_zero(); });
}

int VectorPolynomial::degree() const {
  int d = kZeroDegree;
  for (const auto& p : components_) d = std::max(d, p.degree());
  return d;
}

int VectorPolynomial::low_degree() const {
  int d = kZeroDegree;
  for (const auto& p : components_) {
    if (p.is_zero()) continue;
    d = (d == kZeroDegree) ? p.low_degree() : std::min(d, p.low_degree());
  }
  return d;
}

std::uint32_t VectorPolynomial::max_variable() const {
  std::uint32_t v = 0;
  for (const auto& p : components_) v = std::max(v, p.max_variable());
  return v;
}

std::vector<std::size_t> VectorPolynomial::support() const {
  std::vector<std::size_t> s;
  for (std::size_t i = 0; i < components_.size(); ++i)
    if (!components_[i].is_zero()) s.push_back(i);
  return s;
}

VectorPolynomial& VectorPolynomial::operator+=(const VectorPolynomial& o) {
  if (o.ambient_dim() != ambient_dim()) throw InputError("vector polynomial dimension mismatch");
  for (std::size_t i = 0; i < components_.size(); ++i) components_[i] += o.components_[i];
  return *this;
}

VectorPolynomial operator*(const Polynomial& f, const VectorPolynomial& v) {
  VectorPolynomial out = v;
  for (auto& p : out.components_) p = f * p;
  return out;
}

std::string VectorPolynomial::to_string() const {
  std::string s = "(";
  for (std::size_t i = 0; i < components_.size(); ++i) {
    if (i) s += ", ";
    s += components_[i].to_string();
  }
  return s + ")";
}

}  // namespace dacurv
