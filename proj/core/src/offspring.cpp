#include "vrjp/offspring.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "vrjp/errors.hpp"

namespace vrjp {

OffspringDistribution::OffspringDistribution(std::vector<Atom> support) {
  std::sort(support.begin(), support.end(),
            [](const Atom& a, const Atom& b) { return a.k < b.k; });
  double total = 0.0;
  for (const Atom& a : support) {
    if (!(a.p >= 0.0) || !std::isfinite(a.p)) {
      throw DomainError("offspring probabilities must be finite and non-negative");
    }
    total += a.p;
    if (a.p == 0.0) continue;
    if (!support_.empty() && support_.back().k == a.k) {
      support_.back().p += a.p;
    } else {
      support_.push_back(a);
    }
  }
  if (support_.empty() || std::abs(total - 1.0) > 1e-12) {
    throw DomainError("offspring probabilities must sum to 1");
  }
  double acc = 0.0;
  for (const Atom& a : support_) {
    acc += a.p;
    cumulative_.push_back(acc);
    mean_ += a.k * a.p;
  }
  cumulative_.back() = 1.0;
}

OffspringDistribution OffspringDistribution::deterministic(std::uint32_t k) {
  return OffspringDistribution({{k, 1.0}});
}

OffspringDistribution OffspringDistribution::parse(std::string_view text) {
  auto fail = [&] { return DomainError("cannot parse offspring law '" + std::string(text) + "'"); };
  std::vector<Atom> atoms;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find(',', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view item = text.substr(pos, end - pos);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    if (item.empty()) throw fail();

    const std::size_t colon = item.find(':');
    std::uint32_t k = 0;
    std::string_view ks = item.substr(0, colon);
    auto [kp, kec] = std::from_chars(ks.data(), ks.data() + ks.size(), k);
    if (kec != std::errc{} || kp != ks.data() + ks.size()) throw fail();
    double p = 1.0;
    if (colon != std::string_view::npos) {
      std::string ps(item.substr(colon + 1));
      char* stop = nullptr;
      p = std::strtod(ps.c_str(), &stop);
      if (ps.empty() || *stop != '\0') throw fail();
    }
    atoms.push_back({k, p});
    pos = end + 1;
  }
  return OffspringDistribution(std::move(atoms));
}

OffspringDistribution OffspringDistribution::with_mean(double b) {
  if (!(b >= 1.0) || !std::isfinite(b)) throw DomainError("mean offspring must be >= 1");
  const double lo = std::floor(b);
  const double frac = b - lo;
  const auto k = static_cast<std::uint32_t>(lo);
  if (frac == 0.0) return deterministic(k);
  return OffspringDistribution({{k, 1.0 - frac}, {k + 1, frac}});
}

double OffspringDistribution::variance() const {
  double m2 = 0.0;
  for (const Atom& a : support_) m2 += double(a.k) * a.k * a.p;
  return m2 - mean_ * mean_;
}

double OffspringDistribution::probability(std::uint32_t k) const {
  for (const Atom& a : support_) {
    if (a.k == k) return a.p;
  }
  return 0.0;
}

double OffspringDistribution::pgf(double s) const {
  double g = 0.0;
  for (const Atom& a : support_) g += a.p * std::pow(s, a.k);
  return g;
}

std::uint32_t OffspringDistribution::sample(RngStream& rng) const {
  if (support_.size() == 1) return support_.front().k;
  const double u = rng.uniform();
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  const auto idx = std::min<std::size_t>(it - cumulative_.begin(), support_.size() - 1);
  return support_[idx].k;
}

OffspringDistribution OffspringDistribution::thinned(double eta) const {
  if (!(eta >= 0.0 && eta <= 1.0)) throw DomainError("eta must lie in [0, 1]");
  if (eta == 0.0) return *this;
  std::vector<double> mass(max_k() + 1, 0.0);
  const double keep = 1.0 - eta;
  for (const Atom& a : support_) {
    // Binomial(a.k, keep) pmf, computed in log space for large k.
    for (std::uint32_t j = 0; j <= a.k; ++j) {
      double logpmf = std::lgamma(a.k + 1.0) - std::lgamma(j + 1.0) - std::lgamma(a.k - j + 1.0);
      logpmf += (j > 0 ? j * std::log(keep) : 0.0) + (a.k > j ? (a.k - j) * std::log(eta) : 0.0);
      if (keep == 0.0 && j > 0) continue;
      mass[j] += a.p * std::exp(logpmf);
    }
  }
  double total = 0.0;
  for (double m : mass) total += m;
  std::vector<Atom> atoms;
  for (std::uint32_t j = 0; j < mass.size(); ++j) atoms.push_back({j, mass[j] / total});
  return OffspringDistribution(std::move(atoms));
}

std::string OffspringDistribution::to_string() const {
  std::ostringstream out;
  for (std::size_t i = 0; i < support_.size(); ++i) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%u:%.17g", support_[i].k, support_[i].p);
    if (i) out << ',';
    out << buf;
  }
  return out.str();
}

bool operator==(const OffspringDistribution& a, const OffspringDistribution& b) {
  if (a.support_.size() != b.support_.size()) return false;
  for (std::size_t i = 0; i < a.support_.size(); ++i) {
    if (a.support_[i].k != b.support_[i].k || a.support_[i].p != b.support_[i].p) return false;
  }
  return true;
}

}  // namespace vrjp
