#include "irswb/canon.hpp"

#include <mutex>
#include <unordered_map>

#include "irswb/errors.hpp"

namespace irswb {

namespace {

struct FormKeyHash {
  std::size_t operator()(const FormKey& k) const noexcept {
    std::uint64_t h = 1469598103934665603ULL ^ (std::uint64_t{k.tag} << 32 | k.size);
    for (std::uint32_t i = 0; i < k.size; ++i) h = (h ^ k.v[i]) * 1099511628211ULL;
    return static_cast<std::size_t>(h ^ (h >> 31));
  }
};

constexpr std::uint32_t kLeafFull = 0, kLeafColoured = 1, kNodeFull = 2, kNodeColoured = 3;
constexpr std::size_t kMemoBits = 16;
constexpr std::size_t kMaxHeight = 64;

std::uint64_t checked_leaf_count(std::size_t d, std::size_t depth) {
  std::uint64_t r = 1;
  for (std::size_t i = 0; i < depth; ++i) {
    r *= d;
    if (r > (std::uint64_t{1} << 32)) throw DepthExceeded("cone has more than 2^32 leaves");
  }
  return r;
}

}  // namespace

struct InternTable::Shard {
  mutable std::mutex mu;
  std::unordered_map<FormKey, FormId, FormKeyHash> ids;
  std::vector<FormKey> keys;
};

InternTable::InternTable() : shards_(new Shard[std::size_t{1} << kShardBits]) {}
InternTable::~InternTable() = default;

FormId InternTable::intern(const FormKey& key) {
  const std::size_t h = FormKeyHash{}(key);
  const std::size_t s = h & ((std::size_t{1} << kShardBits) - 1);
  Shard& shard = shards_[s];
  std::lock_guard lock(shard.mu);
  auto it = shard.ids.find(key);
  if (it != shard.ids.end()) return it->second;
  const auto id = static_cast<FormId>(shard.keys.size() << kShardBits | s);
  shard.keys.push_back(key);
  shard.ids.emplace(key, id);
  return id;
}

FormKey InternTable::key(FormId id) const {
  const Shard& shard = shards_[id & ((1u << kShardBits) - 1)];
  std::lock_guard lock(shard.mu);
  return shard.keys.at(id >> kShardBits);
}

std::size_t InternTable::size() const {
  std::size_t n = 0;
  for (std::size_t s = 0; s < (std::size_t{1} << kShardBits); ++s) {
    std::lock_guard lock(shards_[s].mu);
    n += shards_[s].keys.size();
  }
  return n;
}

InternTable& intern_table() {
  static InternTable table;
  return table;
}

// Lazily filled; a slot holds id + 1, 0 meaning not yet computed. Racing writers store the same value.
struct Canonicalizer::Memo {
  std::size_t max_height = 0;
  std::vector<std::vector<std::unique_ptr<std::atomic<FormId>[]>>> small;  // [slot][height][mask]
  std::vector<std::unique_ptr<std::atomic<FormId>[]>> empty;              // [slot][height]
  std::mutex describe_mu;
  std::map<FormId, std::string> descriptions;
};

Canonicalizer Canonicalizer::full(std::size_t d) {
  if (d < 2 || d > kMaxCanonArity) throw InvalidArgument("canonical forms need 2 <= d <= 8");
  Canonicalizer c;
  c.d_ = d;
  c.slots_ = 1;
  c.kids_.assign(1, std::vector<Point>(d, 0));
  c.orbit_min_ = {0};
  c.memo_ = std::make_shared<Memo>();
  std::size_t h = 0;
  for (std::uint64_t leaves = 1; leaves <= kMemoBits && h < kMaxHeight; leaves *= d) c.memo_->max_height = h++;
  c.memo_->small.resize(1);
  c.memo_->empty.resize(1);
  for (std::size_t s = 0; s < 1; ++s) {
    std::uint64_t leaves = 1;
    for (std::size_t k = 0; k <= c.memo_->max_height; ++k, leaves *= d)
      c.memo_->small[s].emplace_back(new std::atomic<FormId>[std::size_t{1} << leaves]());
    c.memo_->empty[s].reset(new std::atomic<FormId>[kMaxHeight]());
  }
  return c;
}

Canonicalizer Canonicalizer::coloured(const ColourScheme& scheme, ColouringRule rule) {
  Canonicalizer c = full(scheme.d());
  const std::size_t d = scheme.d();
  c.coloured_ = true;
  c.rule_ = rule;
  c.scheme_ = std::make_shared<const ColourScheme>(scheme);
  c.slots_ = d + 1;
  c.kids_.clear();
  c.orbit_min_.clear();
  for (Point col = 0; col <= d; ++col) {
    c.kids_.push_back(scheme.child_colours(col, rule));
    c.orbit_min_.push_back(scheme.orbits()[scheme.orbit_of(col)].front());
  }
  const auto elements = elements_of(scheme.group());
  c.digit_orders_.resize(d + 1);
  c.stab_.resize(d + 1);
  for (Point col = 0; col <= d; ++col) {
    const Point r = c.orbit_min_[col];
    for (const auto& sigma : elements) {
      if (sigma.image(col) == col) c.stab_[col].push_back(sigma);
      if (sigma.image(col) != r) continue;
      const Permutation inv = inverse(sigma);
      std::vector<std::uint32_t> order;
      for (Point b = 0; b <= d; ++b) {
        if (b == r) continue;
        const Point source = inv.image(b);
        const auto& kids = c.kids_[col];
        order.push_back(static_cast<std::uint32_t>(std::find(kids.begin(), kids.end(), source) - kids.begin()));
      }
      c.digit_orders_[col].push_back(std::move(order));
    }
  }
  auto& memo = *c.memo_;
  memo.small.clear();
  memo.small.resize(d + 1);
  memo.empty.clear();
  memo.empty.resize(d + 1);
  for (std::size_t s = 0; s <= d; ++s) {
    std::uint64_t leaves = 1;
    for (std::size_t k = 0; k <= memo.max_height; ++k, leaves *= d)
      memo.small[s].emplace_back(new std::atomic<FormId>[std::size_t{1} << leaves]());
    memo.empty[s].reset(new std::atomic<FormId>[kMaxHeight]());
  }
  return c;
}

const std::vector<Point>& Canonicalizer::child_colours(Point colour) const {
  return kids_.at(coloured_ ? colour : 0);
}

FormId Canonicalizer::leaf_form(bool marked, Point colour) const {
  FormKey k;
  if (coloured_) {
    k.tag = kLeafColoured;
    k.size = 2;
    k.v[0] = marked;
    k.v[1] = static_cast<std::uint32_t>(scheme_->orbit_of(colour));
  } else {
    k.tag = kLeafFull;
    k.size = 1;
    k.v[0] = marked;
  }
  return intern_table().intern(k);
}

FormId Canonicalizer::combine(Point colour, const std::array<FormId, kMaxCanonArity>& children) const {
  FormKey k;
  if (!coloured_) {
    k.tag = kNodeFull;
    k.size = static_cast<std::uint32_t>(d_);
    std::copy(children.begin(), children.begin() + d_, k.v.begin());
    std::sort(k.v.begin(), k.v.begin() + d_);
    return intern_table().intern(k);
  }
  k.tag = kNodeColoured;
  k.size = static_cast<std::uint32_t>(d_ + 1);
  k.v[0] = orbit_min_[colour];
  bool first = true;
  std::array<FormId, kMaxCanonArity> best{}, cand{};
  for (const auto& order : digit_orders_[colour]) {
    for (std::size_t i = 0; i < d_; ++i) cand[i] = children[order[i]];
    if (first || std::lexicographical_compare(cand.begin(), cand.begin() + d_, best.begin(), best.begin() + d_)) {
      best = cand;
      first = false;
    }
  }
  std::copy(best.begin(), best.begin() + d_, k.v.begin() + 1);
  return intern_table().intern(k);
}

FormId Canonicalizer::form_mask(Point colour, std::size_t height, std::uint64_t mask) const {
  const std::size_t slot = coloured_ ? colour : 0;
  std::atomic<FormId>* cell = nullptr;
  if (height <= memo_->max_height) {
    cell = &memo_->small[slot][height][mask];
    if (FormId v = cell->load(std::memory_order_relaxed)) return v - 1;
  } else if (mask == 0) {
    cell = &memo_->empty[slot][height];
    if (FormId v = cell->load(std::memory_order_relaxed)) return v - 1;
  }
  FormId out;
  if (height == 0) {
    out = leaf_form(mask & 1, colour);
  } else {
    std::uint64_t chunk = 1;
    for (std::size_t i = 1; i < height; ++i) chunk *= d_;
    const std::uint64_t low = chunk >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << chunk) - 1;
    std::array<FormId, kMaxCanonArity> children{};
    const auto& kids = kids_[slot];
    for (std::size_t j = 0; j < d_; ++j) {
      const std::uint64_t part = chunk * j >= 64 ? 0 : (mask >> (chunk * j)) & low;
      children[j] = form_mask(kids[j], height - 1, part);
    }
    out = combine(colour, children);
  }
  if (cell) cell->store(out + 1, std::memory_order_relaxed);
  return out;
}

FormId Canonicalizer::form_list(Point colour, std::size_t height, const std::uint32_t* lo,
                                const std::uint32_t* hi, std::uint64_t base) const {
  std::uint64_t leaves = 1;
  for (std::size_t i = 0; i < height; ++i) leaves *= d_;
  if (leaves <= 64 || lo == hi) {
    std::uint64_t mask = 0;
    for (auto p = lo; p != hi; ++p) mask |= std::uint64_t{1} << (*p - base);
    return form_mask(colour, height, mask);
  }
  const std::uint64_t chunk = leaves / d_;
  std::array<FormId, kMaxCanonArity> children{};
  const auto& kids = kids_[coloured_ ? colour : 0];
  for (std::size_t j = 0; j < d_; ++j) {
    const std::uint64_t start = base + chunk * j;
    auto mid = std::lower_bound(lo, hi, start + chunk);
    children[j] = form_list(kids[j], height - 1, lo, mid, start);
    lo = mid;
  }
  return combine(colour, children);
}

void Canonicalizer::check_cone(const Cone& cone) const {
  checked_leaf_count(d_, cone.depth);
  if (cone.depth >= kMaxHeight) throw DepthExceeded("cone too deep");
  if (coloured_ && cone.parent_colour > d_)
    throw ColourSchemeMismatch("coloured canonical forms need a parent colour in D");
}

FormId Canonicalizer::canon(const LeafSet& E, const Cone& cone) const {
  check_cone(cone);
  const std::uint64_t leaves = checked_leaf_count(d_, cone.depth);
  for (std::size_t i = 0; i < E.size(); ++i) {
    if (E[i] >= leaves) throw InvalidArgument("leaf index outside the cone");
    if (i > 0 && E[i] <= E[i - 1]) throw InvalidArgument("leaf set must be sorted without repeats");
  }
  const Point colour = coloured_ ? cone.parent_colour : 0;
  return form_list(colour, cone.depth, E.data(), E.data() + E.size(), 0);
}

FormId Canonicalizer::canon_mask(std::uint64_t mask, const Cone& cone) const {
  check_cone(cone);
  const std::uint64_t leaves = checked_leaf_count(d_, cone.depth);
  if (leaves > 64) throw InvalidArgument("mask form needs at most 64 leaves");
  if (leaves < 64 && (mask >> leaves) != 0) throw InvalidArgument("mask has bits outside the cone");
  return form_mask(coloured_ ? cone.parent_colour : 0, cone.depth, mask);
}

bool Canonicalizer::equivalent(const LeafSet& E, const Cone& a, const LeafSet& F, const Cone& b) const {
  if (a.depth != b.depth) throw DepthMismatch("cones of depth " + std::to_string(a.depth) + " and " +
                                              std::to_string(b.depth));
  if (coloured_) {
    check_cone(a);
    check_cone(b);
    if (scheme_->orbit_of(a.parent_colour) != scheme_->orbit_of(b.parent_colour)) return false;
  }
  if (E.size() != F.size()) return false;
  return canon(E, a) == canon(F, b);
}

std::vector<std::size_t> Canonicalizer::leaf_labels(const Cone& cone) const {
  check_cone(cone);
  std::vector<Point> colours{coloured_ ? cone.parent_colour : 0};
  for (std::size_t h = 0; h < cone.depth; ++h) {
    std::vector<Point> next;
    next.reserve(colours.size() * d_);
    for (Point c : colours)
      for (Point k : kids_[coloured_ ? c : 0]) next.push_back(k);
    colours = std::move(next);
  }
  std::vector<std::size_t> out;
  out.reserve(colours.size());
  for (Point c : colours) out.push_back(coloured_ ? scheme_->orbit_of(c) : 0);
  return out;
}

std::string Canonicalizer::describe_locked(FormId id, std::map<FormId, std::string>& cache) const {
  if (auto it = cache.find(id); it != cache.end()) return it->second;
  const FormKey k = intern_table().key(id);
  std::string out;
  switch (k.tag) {
    case kLeafFull:
      out = k.v[0] ? "1" : "0";
      break;
    case kLeafColoured:
      out = std::string(k.v[0] ? "1" : "0") + ":" + std::to_string(k.v[1]);
      break;
    case kNodeFull: {
      std::vector<std::string> parts;
      for (std::uint32_t i = 0; i < k.size; ++i) parts.push_back(describe_locked(k.v[i], cache));
      std::sort(parts.begin(), parts.end());
      out = "(";
      for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? "," : "") + parts[i];
      out += ")";
      break;
    }
    default: {
      const Point r = k.v[0];
      std::vector<Point> rest;
      for (Point b = 0; b <= d_; ++b)
        if (b != r) rest.push_back(b);
      std::vector<std::string> parts;
      for (std::size_t i = 0; i < d_; ++i) parts.push_back(describe_locked(k.v[i + 1], cache));
      std::string best;
      bool first = true;
      for (const auto& pi : stab_.at(r)) {
        std::string cand;
        for (std::size_t i = 0; i < d_; ++i) {
          const Point target = pi.image(rest[i]);
          const auto pos = static_cast<std::size_t>(std::find(rest.begin(), rest.end(), target) - rest.begin());
          cand += (i ? "," : "") + parts[pos];
        }
        if (first || cand < best) best = cand;
        first = false;
      }
      out = std::to_string(r) + "[" + best + "]";
    }
  }
  cache.emplace(id, out);
  return out;
}

std::string Canonicalizer::describe(FormId id) const {
  std::lock_guard lock(memo_->describe_mu);
  return describe_locked(id, memo_->descriptions);
}

FormId canon_full(std::size_t d, const LeafSet& E, std::size_t depth) {
  return Canonicalizer::full(d).canon(E, {depth, kNoColour});
}

FormId canon_coloured(const ColourScheme& scheme, const LeafSet& E, std::size_t depth,
                      Point parent_colour, ColouringRule rule) {
  return Canonicalizer::coloured(scheme, rule).canon(E, {depth, parent_colour});
}

namespace {

using LeafMap = std::vector<std::uint32_t>;

struct MapEnumerator {
  const Canonicalizer& mode;
  std::size_t cap;
  std::vector<std::vector<Point>> local;  // admissible local permutations, full mode
  std::vector<Permutation> F;             // coloured mode
  std::map<std::tuple<Point, Point, std::size_t>, std::vector<LeafMap>> memo;

  const std::vector<LeafMap>& maps(Point ca, Point cb, std::size_t h) {
    auto key = std::make_tuple(ca, cb, h);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    std::vector<LeafMap> out;
    const std::size_t d = mode.d();
    if (h == 0) {
      if (!mode.is_coloured() || mode.scheme()->orbit_of(ca) == mode.scheme()->orbit_of(cb)) out.push_back({0});
      return memo.emplace(key, std::move(out)).first->second;
    }
    std::size_t chunk = 1;
    for (std::size_t i = 1; i < h; ++i) chunk *= d;
    // Digit j of the source goes to digit target[j] of the destination.
    std::vector<std::vector<std::uint32_t>> targets;
    if (!mode.is_coloured()) {
      std::vector<std::uint32_t> t(d);
      for (std::size_t j = 0; j < d; ++j) t[j] = static_cast<std::uint32_t>(j);
      do targets.push_back(t);
      while (std::next_permutation(t.begin(), t.end()));
    } else {
      const auto& ka = mode.child_colours(ca);
      const auto& kb = mode.child_colours(cb);
      for (const auto& sigma : F) {
        if (sigma.image(ca) != cb) continue;
        std::vector<std::uint32_t> t(d);
        for (std::size_t j = 0; j < d; ++j)
          t[j] = static_cast<std::uint32_t>(std::find(kb.begin(), kb.end(), sigma.image(ka[j])) - kb.begin());
        targets.push_back(std::move(t));
      }
    }
    for (const auto& t : targets) {
      std::vector<const std::vector<LeafMap>*> parts(d);
      bool empty = false;
      for (std::size_t j = 0; j < d; ++j) {
        Point cj = mode.is_coloured() ? mode.child_colours(ca)[j] : 0;
        Point cj2 = mode.is_coloured() ? mode.child_colours(cb)[t[j]] : 0;
        parts[j] = &maps(cj, cj2, h - 1);
        if (parts[j]->empty()) empty = true;
      }
      if (empty) continue;
      std::vector<std::size_t> idx(d, 0);
      while (true) {
        LeafMap m(chunk * d);
        for (std::size_t j = 0; j < d; ++j)
          for (std::size_t x = 0; x < chunk; ++x)
            m[j * chunk + x] = static_cast<std::uint32_t>(t[j] * chunk + (*parts[j])[idx[j]][x]);
        out.push_back(std::move(m));
        if (out.size() > cap) throw ClosureExceedsCap("more than " + std::to_string(cap) + " cone maps");
        std::size_t j = 0;
        while (j < d && ++idx[j] == parts[j]->size()) idx[j++] = 0;
        if (j == d) break;
      }
    }
    return memo.emplace(key, std::move(out)).first->second;
  }
};

}  // namespace

std::vector<std::vector<std::uint32_t>> enumerate_cone_maps(const Canonicalizer& mode, const Cone& a,
                                                            const Cone& b, std::size_t cap) {
  if (a.depth != b.depth) throw DepthMismatch("cone maps need equal depths");
  if (mode.is_coloured() && (a.parent_colour > mode.d() || b.parent_colour > mode.d()))
    throw ColourSchemeMismatch("coloured cone maps need parent colours in D");
  MapEnumerator e{mode, cap, {}, {}, {}};
  if (mode.is_coloured()) e.F = elements_of(mode.scheme()->group());
  const Point ca = mode.is_coloured() ? a.parent_colour : 0;
  const Point cb = mode.is_coloured() ? b.parent_colour : 0;
  if (mode.is_coloured()) {
    // The local action at the cone root must send the parent colour of a to that of b.
    bool any = false;
    for (const auto& s : e.F) any = any || s.image(ca) == cb;
    if (!any) return {};
  }
  return e.maps(ca, cb, a.depth);
}

bool brute_force_equivalent(const Canonicalizer& mode, const LeafSet& E, const Cone& a, const LeafSet& F,
                            const Cone& b, std::size_t cap) {
  if (E.size() != F.size()) {
    if (a.depth != b.depth) throw DepthMismatch("cone maps need equal depths");
    return false;
  }
  for (const auto& m : enumerate_cone_maps(mode, a, b, cap)) {
    LeafSet image;
    for (auto x : E) image.push_back(m[x]);
    std::sort(image.begin(), image.end());
    if (image == F) return true;
  }
  return false;
}

Census orbit_census(const Canonicalizer& mode, const Cone& cone, std::size_t k,
                    std::optional<std::size_t> label, std::uint64_t budget) {
  const auto labels = mode.leaf_labels(cone);
  std::vector<std::uint32_t> ground;
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (!label || labels[i] == *label) ground.push_back(static_cast<std::uint32_t>(i));
  if (k > ground.size()) throw KTooLarge("k exceeds the number of eligible leaves");
  const BigInt total = binomial(static_cast<unsigned>(ground.size()), static_cast<unsigned>(k));
  if (total > budget) throw BudgetExceeded("census needs " + total.str() + " subsets");

  Census c;
  c.depth = cone.depth;
  c.k = k;
  c.total = static_cast<std::uint64_t>(total);
  std::map<FormId, std::uint64_t> counts;
  std::vector<std::size_t> pick(k);
  for (std::size_t i = 0; i < k; ++i) pick[i] = i;
  LeafSet E(k);
  while (true) {
    for (std::size_t i = 0; i < k; ++i) E[i] = ground[pick[i]];
    ++counts[mode.canon(E, cone)];
    std::size_t i = k;
    while (i > 0 && pick[i - 1] == ground.size() - k + i - 1) --i;
    if (i == 0) break;
    ++pick[i - 1];
    for (std::size_t j = i; j < k; ++j) pick[j] = pick[j - 1] + 1;
  }
  for (const auto& [form, count] : counts) c.classes.push_back({0, form, mode.describe(form), count});
  std::sort(c.classes.begin(), c.classes.end(),
            [](const CensusClass& x, const CensusClass& y) { return x.description < y.description; });
  for (std::size_t i = 0; i < c.classes.size(); ++i) c.classes[i].class_id = i;
  return c;
}

Rational match_probability(const Census& a, const Census& b) {
  std::map<FormId, std::uint64_t> cb;
  for (const auto& x : b.classes) cb[x.form] = x.count;
  BigInt hits = 0;
  for (const auto& x : a.classes)
    if (auto it = cb.find(x.form); it != cb.end()) hits += BigInt(x.count) * BigInt(it->second);
  return Rational(hits) / Rational(BigInt(a.total) * BigInt(b.total));
}

}  // namespace irswb
