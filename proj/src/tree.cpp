#include "irswb/tree.hpp"

#include <algorithm>

#include "irswb/group_io.hpp"

namespace irswb {

namespace {

char digit_char(std::uint32_t x) {
  if (x < 10) return static_cast<char>('0' + x);
  if (x < 36) return static_cast<char>('a' + (x - 10));
  throw InvalidArgument("digit " + std::to_string(x) + " has no single-character form");
}

std::uint64_t checked_power(std::uint64_t base, std::size_t e) {
  std::uint64_t r = 1;
  for (std::size_t i = 0; i < e; ++i) {
    if (r > std::numeric_limits<std::uint64_t>::max() / base) throw DomainError("level size overflows");
    r *= base;
  }
  return r;
}

}  // namespace

TreeShape::TreeShape(std::size_t d_, std::size_t q_, std::size_t n_max_) : d(d_), q(q_), n_max(n_max_) {
  if (d < 2) throw InvalidArgument("branching d must be at least 2");
  if (q < 2) throw InvalidArgument("root arity q must be at least 2");
}

Address Address::parse(const std::string& s) {
  std::vector<std::uint32_t> digits;
  for (char c : s) {
    if (c >= '0' && c <= '9')
      digits.push_back(static_cast<std::uint32_t>(c - '0'));
    else if (c >= 'a' && c <= 'z')
      digits.push_back(static_cast<std::uint32_t>(c - 'a' + 10));
    else
      throw ParseError(std::string("bad address character '") + c + "'");
  }
  return Address(std::move(digits));
}

Address Address::parent() const {
  if (digits_.empty()) throw InvalidArgument("the root has no parent");
  return Address(std::vector<std::uint32_t>(digits_.begin(), digits_.end() - 1));
}

Address Address::child(std::uint32_t j) const {
  auto d = digits_;
  d.push_back(j);
  return Address(std::move(d));
}

bool Address::is_prefix_of(const Address& other) const {
  return digits_.size() <= other.digits_.size() &&
         std::equal(digits_.begin(), digits_.end(), other.digits_.begin());
}

std::string Address::to_string() const {
  std::string s;
  for (auto x : digits_) s.push_back(digit_char(x));
  return s;
}

void validate(const Address& a, const TreeShape& shape) {
  if (a.depth() > shape.n_max)
    throw DepthExceeded("address " + a.to_string() + " is below depth " + std::to_string(shape.n_max));
  for (std::size_t i = 0; i < a.depth(); ++i)
    if (a.digits()[i] >= (i == 0 ? shape.q : shape.d))
      throw InvalidArgument("digit out of range in address " + a.to_string());
}

std::size_t level_size(const TreeShape& shape, std::size_t n) {
  if (n == 0) return 1;
  return static_cast<std::size_t>(shape.q * checked_power(shape.d, n - 1));
}

std::vector<Address> level(const TreeShape& shape, std::size_t n) {
  if (n > shape.n_max) throw DepthExceeded("level " + std::to_string(n));
  std::vector<Address> out;
  const std::size_t size = level_size(shape, n);
  out.reserve(size);
  for (std::size_t i = 0; i < size; ++i) out.push_back(level_address(shape, n, i));
  return out;
}

std::size_t level_index(const TreeShape& shape, const Address& a) {
  validate(a, shape);
  std::size_t r = 0;
  for (std::size_t i = 0; i < a.depth(); ++i) r = r * (i == 0 ? shape.q : shape.d) + a.digits()[i];
  return r;
}

Address level_address(const TreeShape& shape, std::size_t n, std::size_t index) {
  if (index >= level_size(shape, n)) throw InvalidArgument("level index out of range");
  std::vector<std::uint32_t> digits(n);
  for (std::size_t i = n; i-- > 1;) {
    digits[i] = static_cast<std::uint32_t>(index % shape.d);
    index /= shape.d;
  }
  if (n > 0) digits[0] = static_cast<std::uint32_t>(index);
  return Address(std::move(digits));
}

std::vector<Address> cone(const TreeShape& shape, const Address& u, std::size_t n) {
  validate(u, shape);
  if (u.depth() + n > shape.n_max)
    throw DepthExceeded("cone below " + u.to_string() + " reaches past depth " + std::to_string(shape.n_max));
  if (u.is_root()) return level(shape, n);
  const std::size_t size = static_cast<std::size_t>(checked_power(shape.d, n));
  std::vector<Address> out;
  out.reserve(size);
  for (std::size_t i = 0; i < size; ++i) {
    auto digits = u.digits();
    digits.resize(u.depth() + n);
    std::size_t x = i;
    for (std::size_t k = digits.size(); k-- > u.depth();) {
      digits[k] = static_cast<std::uint32_t>(x % shape.d);
      x /= shape.d;
    }
    out.emplace_back(std::move(digits));
  }
  return out;
}

ColourScheme::ColourScheme(std::size_t d, GeneratedGroup F) : d_(d), F_(std::move(F)) {
  if (d < 2) throw InvalidArgument("branching d must be at least 2");
  if (F_.degree() != d + 1)
    throw ColourSchemeMismatch("F acts on " + std::to_string(F_.degree()) + " colours, expected " +
                               std::to_string(d + 1));
  orbits_ = irswb::orbits(F_);
  orbit_index_.assign(d + 1, 0);
  for (std::size_t i = 0; i < orbits_.size(); ++i)
    for (Point c : orbits_[i]) orbit_index_[c] = i;
}

ColourScheme ColourScheme::trivial(std::size_t d) { return ColourScheme(d, GeneratedGroup::trivial(d + 1)); }
ColourScheme ColourScheme::full(std::size_t d) { return ColourScheme(d, GeneratedGroup::symmetric(d + 1)); }

std::vector<Point> ColourScheme::child_colours(Point parent_colour, ColouringRule rule) const {
  std::vector<Point> out;
  if (rule == ColouringRule::orbit_sorted) {
    for (const auto& orbit : orbits_)
      for (Point c : orbit)
        if (c != parent_colour) out.push_back(c);
  } else {
    for (Point c = 0; c <= d_; ++c)
      if (c != parent_colour) out.push_back(c);
  }
  return out;
}

ColourScheme scheme_from_json(const nlohmann::json& j) {
  std::size_t d = 0;
  try {
    d = j.at("d").get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(e.what());
  }
  nlohmann::json g = {{"degree", d + 1}, {"generators", j.value("generators", nlohmann::json::array())}};
  return ColourScheme(d, group_from_json(g));
}

nlohmann::json scheme_to_json(const ColourScheme& s) {
  return {{"d", s.d()}, {"generators", elements_to_json(s.group().generators())}};
}

Point edge_colour(const Address& v, const ColourScheme& scheme, ColouringRule rule) {
  if (v.is_root()) throw RootHasNoLabel("the root has no parent edge");
  Point colour = kNoColour;
  for (std::size_t i = 0; i < v.depth(); ++i) {
    auto children = scheme.child_colours(colour, rule);
    if (v.digits()[i] >= children.size())
      throw ColourSchemeMismatch("vertex " + v.to_string() + " has no colour under this scheme");
    colour = children[v.digits()[i]];
  }
  return colour;
}

std::size_t orbit_label(const Address& v, const ColourScheme& scheme, ColouringRule rule) {
  return scheme.orbit_of(edge_colour(v, scheme, rule));
}

std::uint64_t LevelCountVector::total() const {
  std::uint64_t t = 0;
  for (auto c : counts) t += c;
  return t;
}

LevelCountVector level_counts(std::size_t label, std::size_t n, const ColourScheme& scheme) {
  checked_power(scheme.d(), n);
  auto v = level_counts_as<long long>(label, n, scheme);
  LevelCountVector out;
  for (Eigen::Index i = 0; i < v.size(); ++i) out.counts.push_back(static_cast<std::uint64_t>(v(i)));
  return out;
}

LevelCountVector level_counts(const Address& u, std::size_t n, const ColourScheme& scheme,
                              ColouringRule rule) {
  return level_counts(orbit_label(u, scheme, rule), n, scheme);
}

namespace {

void walk(const ColourScheme& scheme, ColouringRule rule, Point colour, std::size_t remaining,
          LevelCountVector& out) {
  if (remaining == 0) {
    ++out.counts[scheme.orbit_of(colour)];
    return;
  }
  for (Point c : scheme.child_colours(colour, rule)) walk(scheme, rule, c, remaining - 1, out);
}

}  // namespace

LevelCountVector level_counts_direct(const TreeShape& shape, const Address& u, std::size_t n,
                                     const ColourScheme& scheme, ColouringRule rule) {
  if (shape.d != scheme.d()) throw ColourSchemeMismatch("tree and scheme disagree on d");
  validate(u, shape);
  if (u.depth() + n > shape.n_max) throw DepthExceeded("cone reaches past the depth bound");
  LevelCountVector out;
  out.counts.assign(scheme.orbit_count(), 0);
  walk(scheme, rule, edge_colour(u, scheme, rule), n, out);
  return out;
}

std::vector<double> asymptotic_level_shares(const ColourScheme& scheme) {
  std::vector<double> out;
  for (const auto& o : scheme.orbits())
    out.push_back(static_cast<double>(o.size()) / static_cast<double>(scheme.colour_count()));
  return out;
}

}  // namespace irswb
