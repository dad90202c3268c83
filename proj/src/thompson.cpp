#include "irswb/thompson.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "irswb/errors.hpp"

namespace irswb {

namespace {

std::size_t arity(const Address& a, std::size_t d, std::size_t q) { return a.is_root() ? q : d; }

// Leaves (sorted) form a complete subtree when every vertex above a leaf has all its children in
// the tree and no leaf lies below another.
bool complete_below(const std::vector<Address>& leaves, std::size_t lo, std::size_t hi, const Address& v,
                    std::size_t d, std::size_t q) {
  if (lo == hi) return false;
  if (leaves[lo] == v) return hi - lo == 1;
  const std::size_t k = arity(v, d, q);
  for (std::uint32_t j = 0; j < k; ++j) {
    const Address c = v.child(j);
    std::size_t mid = lo;
    while (mid < hi && c.is_prefix_of(leaves[mid])) ++mid;
    if (!complete_below(leaves, lo, mid, c, d, q)) return false;
    lo = mid;
  }
  return lo == hi;
}

void check_complete(const std::vector<Address>& leaves, std::size_t d, std::size_t q) {
  for (const auto& a : leaves)
    for (std::size_t i = 0; i < a.depth(); ++i)
      if (a.digits()[i] >= (i == 0 ? q : d)) throw MalformedPair("digit out of range in " + a.to_string());
  if (!std::is_sorted(leaves.begin(), leaves.end()) || !complete_below(leaves, 0, leaves.size(), Address(), d, q))
    throw MalformedPair("leaves do not form a complete tree");
}

std::vector<Address> expand_at(const std::vector<Address>& leaves, std::size_t i, std::size_t d, std::size_t q) {
  std::vector<Address> out(leaves.begin(), leaves.begin() + static_cast<std::ptrdiff_t>(i));
  const std::size_t k = arity(leaves[i], d, q);
  for (std::uint32_t j = 0; j < k; ++j) out.push_back(leaves[i].child(j));
  out.insert(out.end(), leaves.begin() + static_cast<std::ptrdiff_t>(i) + 1, leaves.end());
  return out;
}

}  // namespace

TreePair::TreePair(std::size_t d, std::size_t q, std::vector<Address> domain, std::vector<Address> range,
                   std::vector<std::uint32_t> sigma)
    : d_(d), q_(q), domain_(std::move(domain)), range_(std::move(range)), sigma_(std::move(sigma)) {
  if (d < 2 || q < 1) throw MalformedPair("need d >= 2 and q >= 1");
  if (domain_.size() != range_.size() || sigma_.size() != domain_.size())
    throw MalformedPair("leaf counts differ");
  std::vector<std::uint32_t> check = sigma_;
  std::sort(check.begin(), check.end());
  for (std::uint32_t i = 0; i < check.size(); ++i)
    if (check[i] != i) throw MalformedPair("sigma is not a bijection");
  sort_leaves();
  check_complete(domain_, d_, q_);
  check_complete(range_, d_, q_);
}

TreePair TreePair::identity(std::size_t d, std::size_t q) { return TreePair(d, q, {Address()}, {Address()}, {0}); }

std::size_t TreePair::max_depth() const {
  std::size_t m = 0;
  for (const auto& a : domain_) m = std::max(m, a.depth());
  for (const auto& a : range_) m = std::max(m, a.depth());
  return m;
}

void TreePair::sort_leaves() {
  std::vector<std::uint32_t> dorder(domain_.size()), rorder(range_.size());
  std::iota(dorder.begin(), dorder.end(), 0u);
  std::iota(rorder.begin(), rorder.end(), 0u);
  std::sort(dorder.begin(), dorder.end(), [&](auto a, auto b) { return domain_[a] < domain_[b]; });
  std::sort(rorder.begin(), rorder.end(), [&](auto a, auto b) { return range_[a] < range_[b]; });
  std::vector<std::uint32_t> rpos(range_.size());
  for (std::uint32_t i = 0; i < rorder.size(); ++i) rpos[rorder[i]] = i;
  std::vector<Address> nd, nr;
  std::vector<std::uint32_t> ns;
  for (auto i : dorder) {
    nd.push_back(domain_[i]);
    ns.push_back(rpos[sigma_[i]]);
  }
  for (auto j : rorder) nr.push_back(range_[j]);
  domain_ = std::move(nd);
  range_ = std::move(nr);
  sigma_ = std::move(ns);
}

void TreePair::expand_domain_leaf(std::size_t i) {
  const std::size_t j = sigma_.at(i);
  const std::size_t k = arity(domain_[i], d_, q_);
  if (arity(range_[j], d_, q_) != k) throw MalformedPair("leaf arities differ");
  // Positions after expansion: domain children at i..i+k-1, range children at j..j+k-1.
  std::vector<std::uint32_t> ns;
  for (std::size_t x = 0; x < sigma_.size(); ++x) {
    auto shift = [&](std::uint32_t y) { return y > j ? y + static_cast<std::uint32_t>(k) - 1 : y; };
    if (x == i) {
      for (std::uint32_t c = 0; c < k; ++c) ns.push_back(static_cast<std::uint32_t>(j) + c);
    } else {
      ns.push_back(shift(sigma_[x]));
    }
  }
  domain_ = expand_at(domain_, i, d_, q_);
  range_ = expand_at(range_, j, d_, q_);
  sigma_ = std::move(ns);
}

void TreePair::expand_range_leaf(std::size_t j) {
  const auto it = std::find(sigma_.begin(), sigma_.end(), static_cast<std::uint32_t>(j));
  expand_domain_leaf(static_cast<std::size_t>(it - sigma_.begin()));
}

TreePair reduce(const TreePair& p) {
  std::vector<Address> dom = p.domain_leaves(), ran = p.range_leaves();
  std::vector<std::uint32_t> sig = p.sigma();
  const std::size_t d = p.d(), q = p.q();
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < dom.size() && !changed; ++i) {
      if (dom[i].is_root() || dom[i].digits().back() != 0) continue;
      const Address parent = dom[i].parent();
      const std::size_t k = arity(parent, d, q);
      if (i + k > dom.size()) continue;
      bool family = true;
      for (std::uint32_t c = 0; c < k && family; ++c) family = dom[i + c] == parent.child(c);
      if (!family) continue;
      const std::uint32_t j = sig[i];
      if (ran[j].is_root() || ran[j].digits().back() != 0 || j + k > ran.size()) continue;
      const Address rparent = ran[j].parent();
      if (arity(rparent, d, q) != k) continue;
      bool image = true;
      for (std::uint32_t c = 0; c < k && image; ++c) image = sig[i + c] == j + c && ran[j + c] == rparent.child(c);
      if (!image) continue;
      dom.erase(dom.begin() + static_cast<std::ptrdiff_t>(i) + 1, dom.begin() + static_cast<std::ptrdiff_t>(i + k));
      dom[i] = parent;
      ran.erase(ran.begin() + j + 1, ran.begin() + j + static_cast<std::ptrdiff_t>(k));
      ran[j] = rparent;
      std::vector<std::uint32_t> ns;
      for (std::size_t x = 0; x < sig.size(); ++x) {
        if (x > i && x < i + k) continue;
        const std::uint32_t y = sig[x];
        ns.push_back(y > j ? y - static_cast<std::uint32_t>(k) + 1 : y);
      }
      sig = std::move(ns);
      changed = true;
    }
  }
  return TreePair(d, q, std::move(dom), std::move(ran), std::move(sig));
}

TreePair compose(const TreePair& p1, const TreePair& p2) {
  if (p1.d() != p2.d() || p1.q() != p2.q()) throw MalformedPair("pairs live on different trees");
  TreePair a = p1, b = p2;
  // Grow a's range tree and b's domain tree to their union.
  while (a.range_leaves() != b.domain_leaves()) {
    const auto& r = a.range_leaves();
    const auto& s = b.domain_leaves();
    bool grew = false;
    for (std::size_t j = 0; j < r.size() && !grew; ++j)
      for (const auto& x : s)
        if (r[j].depth() < x.depth() && r[j].is_prefix_of(x)) {
          a.expand_range_leaf(j);
          grew = true;
          break;
        }
    for (std::size_t i = 0; i < s.size() && !grew; ++i)
      for (const auto& x : r)
        if (s[i].depth() < x.depth() && s[i].is_prefix_of(x)) {
          b.expand_domain_leaf(i);
          grew = true;
          break;
        }
    if (!grew) throw MalformedPair("trees have no common expansion");
  }
  std::vector<std::uint32_t> sig(a.sigma().size());
  for (std::size_t i = 0; i < sig.size(); ++i) sig[i] = b.sigma()[a.sigma()[i]];
  return reduce(TreePair(a.d(), a.q(), a.domain_leaves(), b.range_leaves(), std::move(sig)));
}

TreePair inverse(const TreePair& p) {
  std::vector<std::uint32_t> inv(p.sigma().size());
  for (std::uint32_t i = 0; i < inv.size(); ++i) inv[p.sigma()[i]] = i;
  return TreePair(p.d(), p.q(), p.range_leaves(), p.domain_leaves(), std::move(inv));
}

Address act_on_address(const TreePair& p, const Address& w, bool deepen) {
  Address x = w;
  while (true) {
    for (std::size_t i = 0; i < p.domain_leaves().size(); ++i) {
      const Address& leaf = p.domain_leaves()[i];
      if (!leaf.is_prefix_of(x)) continue;
      std::vector<std::uint32_t> digits = p.range_leaves()[p.sigma()[i]].digits();
      digits.insert(digits.end(), x.digits().begin() + static_cast<std::ptrdiff_t>(leaf.depth()), x.digits().end());
      return Address(std::move(digits));
    }
    if (!deepen) throw AddressTooShallow("address " + w.to_string() + " lies above the domain leaves");
    x = x.child(0);
  }
}

bool is_label_preserving(const TreePair& p, const ColourScheme& scheme, ColouringRule rule) {
  if (scheme.d() != p.d()) throw ColourSchemeMismatch("scheme arity differs from the tree");
  for (std::size_t i = 0; i < p.domain_leaves().size(); ++i) {
    const Address& a = p.domain_leaves()[i];
    const Address& b = p.range_leaves()[p.sigma()[i]];
    if (a.is_root() || b.is_root()) {
      if (a.is_root() != b.is_root()) return false;
      continue;
    }
    if (orbit_label(a, scheme, rule) != orbit_label(b, scheme, rule)) return false;
  }
  return true;
}

std::vector<Address> random_tree(std::size_t d, std::size_t q, std::size_t expansions, std::mt19937_64& rng) {
  std::vector<Address> leaves{Address()};
  for (std::size_t e = 0; e < expansions; ++e) {
    const std::size_t i = rng() % leaves.size();
    leaves = expand_at(leaves, i, d, q);
  }
  return leaves;
}

TreePair random_pair(std::size_t d, std::size_t q, std::size_t max_expansions, std::mt19937_64& rng) {
  const std::size_t e = rng() % (max_expansions + 1);
  auto a = random_tree(d, q, e, rng);
  auto b = random_tree(d, q, e, rng);
  std::vector<std::uint32_t> sigma(a.size());
  std::iota(sigma.begin(), sigma.end(), 0u);
  std::shuffle(sigma.begin(), sigma.end(), rng);
  return reduce(TreePair(d, q, std::move(a), std::move(b), std::move(sigma)));
}

nlohmann::json pair_to_json(const TreePair& p) {
  nlohmann::json j;
  j["d"] = p.d();
  j["q"] = p.q();
  j["domain_leaves"] = nlohmann::json::array();
  j["range_leaves"] = nlohmann::json::array();
  for (const auto& a : p.domain_leaves()) j["domain_leaves"].push_back(a.to_string());
  for (const auto& a : p.range_leaves()) j["range_leaves"].push_back(a.to_string());
  j["sigma"] = p.sigma();
  return j;
}

TreePair pair_from_json(const nlohmann::json& j) {
  try {
    std::vector<Address> dom, ran;
    for (const auto& s : j.at("domain_leaves")) dom.push_back(Address::parse(s.get<std::string>()));
    for (const auto& s : j.at("range_leaves")) ran.push_back(Address::parse(s.get<std::string>()));
    return TreePair(j.at("d").get<std::size_t>(), j.at("q").get<std::size_t>(), std::move(dom), std::move(ran),
                    j.at("sigma").get<std::vector<std::uint32_t>>());
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(e.what());
  }
}

}  // namespace irswb
