#include "fhc/space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "fhc/error.hpp"

namespace fhc {

namespace {

inline double magnitude(Scalar c) {
  return c.imag() == 0.0 ? std::fabs(c.real()) : std::abs(c);
}

void check_radii(const std::vector<double>& radii, double upper) {
  if (radii.empty()) throw InvalidArgument("radii grid must be non-empty");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0) || !std::isfinite(radii[i]))
      throw InvalidArgument("radii must be positive and finite");
    if (i > 0 && !(radii[i] > radii[i - 1]))
      throw InvalidArgument("radii grid must be strictly increasing");
    if (!(radii[i] < upper)) throw InvalidArgument("disk radii must lie strictly below R");
  }
}

}  // namespace

std::string to_string(Field f) { return f == Field::Real ? "real" : "complex"; }

SpaceSpec::SpaceSpec(SpaceFamily family, Field field) : family_(std::move(family)), field_(field) {}

SpaceSpec SpaceSpec::lp(double p, Field field) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw InvalidArgument("l^p requires 1 <= p < infinity");
  return SpaceSpec(LpFamily{p}, field);
}

SpaceSpec SpaceSpec::c0(Field field) { return SpaceSpec(C0Family{}, field); }

SpaceSpec SpaceSpec::entire(Field field) { return entire(default_entire_radii(), field); }

SpaceSpec SpaceSpec::entire(std::vector<double> radii, Field field) {
  check_radii(radii, std::numeric_limits<double>::infinity());
  return SpaceSpec(EntireFamily{std::move(radii)}, field);
}

SpaceSpec SpaceSpec::disk(double R, Field field) { return disk(R, default_disk_radii(R), field); }

SpaceSpec SpaceSpec::disk(double R, std::vector<double> radii, Field field) {
  if (!(R > 0.0) || !std::isfinite(R)) throw InvalidArgument("disk radius R must be positive");
  check_radii(radii, R);
  return SpaceSpec(DiskFamily{R, std::move(radii)}, field);
}

double SpaceSpec::p() const {
  if (auto* lp = std::get_if<LpFamily>(&family_)) return lp->p;
  throw InvalidArgument("space is not l^p");
}

const std::vector<double>& SpaceSpec::radii() const {
  if (auto* e = std::get_if<EntireFamily>(&family_)) return e->radii;
  if (auto* d = std::get_if<DiskFamily>(&family_)) return d->radii;
  throw InvalidArgument("space has no radii grid");
}

double SpaceSpec::disk_radius() const {
  if (auto* d = std::get_if<DiskFamily>(&family_)) return d->R;
  throw InvalidArgument("space is not H(D(0,R))");
}

std::string SpaceSpec::name() const {
  std::ostringstream os;
  std::visit(
      [&](const auto& f) {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, LpFamily>) os << "l^" << f.p;
        else if constexpr (std::is_same_v<T, C0Family>) os << "c0";
        else if constexpr (std::is_same_v<T, EntireFamily>) os << "H(C)";
        else os << "H(D(0," << f.R << "))";
      },
      family_);
  return os.str();
}

std::vector<double> default_entire_radii() { return {1, 2, 3, 4, 5, 6, 7, 8}; }

std::vector<double> default_disk_radii(double R) {
  std::vector<double> r;
  for (int k = 1; k <= 8; ++k) r.push_back(R * (1.0 - std::ldexp(1.0, -k)));
  return r;
}

// ---------------------------------------------------------------------------

TruncatedVector::TruncatedVector() : lo_(0), coeffs_(1, Scalar{0.0}) {}

TruncatedVector::TruncatedVector(long lo, std::vector<Scalar> coeffs) : lo_(lo), coeffs_(std::move(coeffs)) {
  if (coeffs_.empty()) throw InvalidArgument("truncated vector needs a non-empty window");
}

TruncatedVector TruncatedVector::zeros(long lo, long hi) {
  if (hi < lo) throw InvalidArgument("window requires hi >= lo");
  return TruncatedVector(lo, std::vector<Scalar>(static_cast<std::size_t>(hi - lo + 1)));
}

TruncatedVector TruncatedVector::unit(long n, Scalar value) { return TruncatedVector(n, {value}); }

TruncatedVector TruncatedVector::real(long lo, std::span<const double> values) {
  std::vector<Scalar> c(values.begin(), values.end());
  return TruncatedVector(lo, std::move(c));
}

Scalar TruncatedVector::at(long n) const {
  if (n < lo_ || n > hi()) return 0.0;
  return coeffs_[static_cast<std::size_t>(n - lo_)];
}

Scalar& TruncatedVector::ref(long n) {
  if (n < lo_ || n > hi()) throw InvalidArgument("index outside window");
  return coeffs_[static_cast<std::size_t>(n - lo_)];
}

bool TruncatedVector::all_finite() const {
  return std::all_of(coeffs_.begin(), coeffs_.end(),
                     [](Scalar c) { return std::isfinite(c.real()) && std::isfinite(c.imag()); });
}

bool TruncatedVector::is_zero() const {
  return std::all_of(coeffs_.begin(), coeffs_.end(), [](Scalar c) { return c == Scalar{0.0}; });
}

TruncatedVector TruncatedVector::rewindow(long lo, long hi) const {
  TruncatedVector out = zeros(lo, hi);
  const long from = std::max(lo, lo_), to = std::min(hi, this->hi());
  for (long n = from; n <= to; ++n) out.coeffs_[static_cast<std::size_t>(n - lo)] = at(n);
  return out;
}

TruncatedVector TruncatedVector::trimmed() const {
  std::size_t first = 0, last = coeffs_.size();
  while (first < coeffs_.size() && coeffs_[first] == Scalar{0.0}) ++first;
  if (first == coeffs_.size()) return TruncatedVector(lo_, {Scalar{0.0}});
  while (last > first && coeffs_[last - 1] == Scalar{0.0}) --last;
  return TruncatedVector(lo_ + static_cast<long>(first),
                         std::vector<Scalar>(coeffs_.begin() + static_cast<std::ptrdiff_t>(first),
                                             coeffs_.begin() + static_cast<std::ptrdiff_t>(last)));
}

TruncatedVector& TruncatedVector::operator+=(const TruncatedVector& other) {
  if (other.lo_ < lo_ || other.hi() > hi()) *this = rewindow(std::min(lo_, other.lo_), std::max(hi(), other.hi()));
  for (long n = other.lo_; n <= other.hi(); ++n) coeffs_[static_cast<std::size_t>(n - lo_)] += other.at(n);
  return *this;
}

TruncatedVector& TruncatedVector::operator-=(const TruncatedVector& other) {
  if (other.lo_ < lo_ || other.hi() > hi()) *this = rewindow(std::min(lo_, other.lo_), std::max(hi(), other.hi()));
  for (long n = other.lo_; n <= other.hi(); ++n) coeffs_[static_cast<std::size_t>(n - lo_)] -= other.at(n);
  return *this;
}

TruncatedVector& TruncatedVector::operator*=(Scalar alpha) {
  for (auto& c : coeffs_) c *= alpha;
  return *this;
}

bool TruncatedVector::equals(const TruncatedVector& other) const {
  const long lo = std::min(lo_, other.lo_), hi = std::max(this->hi(), other.hi());
  for (long n = lo; n <= hi; ++n)
    if (at(n) != other.at(n)) return false;
  return true;
}

double relative_difference(const TruncatedVector& a, const TruncatedVector& b) {
  const long lo = std::min(a.lo(), b.lo()), hi = std::max(a.hi(), b.hi());
  double scale = 0.0, diff = 0.0;
  for (long n = lo; n <= hi; ++n) {
    scale = std::max({scale, std::abs(a.at(n)), std::abs(b.at(n))});
    diff = std::max(diff, std::abs(a.at(n) - b.at(n)));
  }
  return scale == 0.0 ? 0.0 : diff / scale;
}

// ---------------------------------------------------------------------------

void validate_vector(const SpaceSpec& space, const TruncatedVector& v) {
  if (!v.all_finite()) throw InvalidArgument("vector has a non-finite coefficient");
  if (v.lo() < 0 && !space.allows_bilateral())
    throw InvalidArgument("negative indices are not allowed in " + space.name());
}

double coefficient_majorant(std::span<const Scalar> coeffs, long lo, double r) {
  double rpow = std::pow(r, static_cast<double>(lo));
  const double logr = std::log(r);
  double sum = 0.0;
  for (std::size_t j = 0; j < coeffs.size(); ++j, rpow *= r) {
    const double m = magnitude(coeffs[j]);
    if (m == 0.0) continue;
    if (std::isfinite(rpow)) {
      sum += m * rpow;
    } else {
      sum += std::exp(std::log(m) + static_cast<double>(lo + static_cast<long>(j)) * logr);
    }
  }
  return sum;
}

double combine_seminorms(std::span<const double> q) {
  double total = 0.0;
  for (std::size_t k = 0; k < q.size(); ++k) {
    const double ratio = std::isinf(q[k]) ? 1.0 : q[k] / (1.0 + q[k]);
    total += std::ldexp(ratio, -static_cast<int>(k) - 1);
  }
  return total;
}

namespace {

double lp_norm(std::span<const Scalar> c, double p) {
  double sum = 0.0;
  if (p == 2.0) {
    for (auto z : c) {
      const double m = magnitude(z);
      sum += m * m;
    }
    if (std::isfinite(sum)) return std::sqrt(sum);
  } else if (p == 1.0) {
    for (auto z : c) sum += magnitude(z);
    return sum;
  } else {
    for (auto z : c) sum += std::pow(magnitude(z), p);
    if (std::isfinite(sum)) return std::pow(sum, 1.0 / p);
  }
  // overflow: rescale by the largest magnitude
  double top = 0.0;
  for (auto z : c) top = std::max(top, magnitude(z));
  sum = 0.0;
  for (auto z : c) sum += std::pow(magnitude(z) / top, p);
  return top * std::pow(sum, 1.0 / p);
}

double fnorm_window(const SpaceSpec& space, std::span<const Scalar> c, long lo) {
  return std::visit(
      [&](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, LpFamily>) {
          return lp_norm(c, f.p);
        } else if constexpr (std::is_same_v<T, C0Family>) {
          double m = 0.0;
          for (auto z : c) m = std::max(m, magnitude(z));
          return m;
        } else {
          std::vector<double> q;
          q.reserve(f.radii.size());
          for (double r : f.radii) q.push_back(coefficient_majorant(c, lo, r));
          return combine_seminorms(q);
        }
      },
      space.family());
}

}  // namespace

double fnorm(const SpaceSpec& space, const TruncatedVector& v) {
  validate_vector(space, v);
  return fnorm_window(space, v.coeffs(), v.lo());
}

double seminorm_majorant(const SpaceSpec& space, const TruncatedVector& v, double r) {
  if (!space.is_holomorphic()) throw InvalidArgument("seminorm majorant needs H(C) or H(D(0,R))");
  if (!(r > 0.0)) throw InvalidArgument("radius must be positive");
  if (std::holds_alternative<DiskFamily>(space.family()) && !(r < space.disk_radius()))
    throw InvalidArgument("radius must stay below R");
  validate_vector(space, v);
  return coefficient_majorant(v.coeffs(), v.lo(), r);
}

double distance(const SpaceSpec& space, const TruncatedVector& u, const TruncatedVector& v) {
  validate_vector(space, u);
  validate_vector(space, v);
  return fnorm(space, u - v);
}

double tail_norm(const SpaceSpec& space, const TruncatedVector& v, long cutoff) {
  validate_vector(space, v);
  TruncatedVector t = v;
  for (long n = v.lo(); n <= v.hi(); ++n)
    if (std::labs(n) <= cutoff) t.ref(n) = 0.0;
  return fnorm(space, t);
}

}  // namespace fhc
