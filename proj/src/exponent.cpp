#include "dacurv/exponent.hpp"

#include <algorithm>

#include "dacurv/errors.hpp"

namespace dacurv {

ExponentVector ExponentVector::variable(std::uint32_t var, std::uint32_t exponent) {
  if (var == 0) throw InputError("variable indices are 1-based");
  ExponentVector e;
  if (exponent > 0) {
    e.entries_.emplace_back(var, exponent);
    e.total_degree_ = exponent;
  }
  return e;
}

ExponentVector ExponentVector::from_dense(std::span<const int> dense) {
  ExponentVector e;
  for (std::size_t k = 0; k < dense.size(); ++k) {
    if (dense[k] < 0) throw InputError("negative exponent");
    if (dense[k] == 0) continue;
    e.entries_.emplace_back(static_cast<std::uint32_t>(k + 1), static_cast<std::uint32_t>(dense[k]));
    e.total_degree_ += static_cast<std::uint32_t>(dense[k]);
  }
  return e;
}

ExponentVector ExponentVector::from_entries(std::vector<Entry> entries) {
  std::sort(entries.begin(), entries.end());
  ExponentVector e;
  for (const auto& [var, exp] : entries) {
    if (var == 0) throw InputError("variable indices are 1-based");
    if (exp == 0) continue;
    if (!e.entries_.empty() && e.entries_.back().first == var) {
      e.entries_.back().second += exp;
    } else {
      e.entries_.emplace_back(var, exp);
    }
    e.total_degree_ += exp;
  }
  return e;
}

std::uint32_t ExponentVector::exponent(std::uint32_t var) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), Entry{var, 0});
  return (it != entries_.end() && it->first == var) ? it->second : 0;
}

std::uint32_t ExponentVector::max_variable() const noexcept {
  return entries_.empty() ? 0 : entries_.back().first;
}

std::vector<int> ExponentVector::to_dense(std::uint32_t num_vars) const {
  std::vector<int> dense(num_vars, 0);
  for (const auto& [var, exp] : entries_) {
    if (var > num_vars) throw InputError("monomial uses z" + std::to_string(var) +
                                         " outside the first " + std::to_string(num_vars) +
                                         " variables");
    dense[var - 1] = static_cast<int>(exp);
  }
  return dense;
}

ExponentVector ExponentVector::operator*(const ExponentVector& other) const {
  ExponentVector out;
  out.entries_.reserve(entries_.size() + other.entries_.size());
  auto a = entries_.begin();
  auto b = other.entries_.begin();
  while (a != entries_.end() || b != other.entries_.end()) {
    if (b == other.entries_.end() || (a != entries_.end() && a->first < b->first)) {
      out.entries_.push_back(*a++);
    } else if (a == entries_.end() || b->first < a->first) {
      out.entries_.push_back(*b++);
    } else {
      out.entries_.emplace_back(a->first, a->second + b->second);
      ++a;
      ++b;
    }
  }
  out.total_degree_ = total_degree_ + other.total_degree_;
  return out;
}

std::optional<ExponentVector> ExponentVector::divide(const ExponentVector& other) const {
  ExponentVector out;
  auto a = entries_.begin();
  for (const auto& [var, exp] : other.entries_) {
    while (a != entries_.end() && a->first < var) out.entries_.push_back(*a++);
    if (a == entries_.end() || a->first != var || a->second < exp) return std::nullopt;
    if (a->second > exp) out.entries_.emplace_back(var, a->second - exp);
    ++a;
  }
  while (a != entries_.end()) out.entries_.push_back(*a++);
  out.total_degree_ = total_degree_ - other.total_degree_;
  return out;
}

std::string ExponentVector::to_string() const {
  if (entries_.empty()) return "1";
  std::string s;
  for (const auto& [var, exp] : entries_) {
    if (!s.empty()) s += '*';
    s += 'z' + std::to_string(var);
    if (exp > 1) s += '^' + std::to_string(exp);
  }
  return s;
}

std::strong_ordering grlex_compare(const ExponentVector& a, const ExponentVector& b) {
  if (auto c = a.total_degree() <=> b.total_degree(); c != 0) return c;
  auto ea = a.entries();
  auto eb = b.entries();
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < ea.size() && j < eb.size()) {
    if (ea[i].first != eb[j].first) {
      // The operand holding the smaller variable has a positive exponent there.
      return ea[i].first < eb[j].first ? std::strong_ordering::greater
                                       : std::strong_ordering::less;
    }
    if (ea[i].second != eb[j].second) return ea[i].second <=> eb[j].second;
    ++i;
    ++j;
  }
  // Equal total degree forces both to be exhausted together.
  return std::strong_ordering::equal;
}

}  // namespace dacurv
