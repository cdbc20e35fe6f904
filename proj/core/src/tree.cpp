#include "vrjp/tree.hpp"

#include <algorithm>
#include <deque>
#include <ostream>

#include "vrjp/errors.hpp"

namespace vrjp {

namespace {

constexpr std::uint64_t kRootKey = 0x5EEDF00DCAFEBABEULL;
constexpr std::uint64_t kOffspringTag = 0x6F6666;    // "off"
constexpr std::uint64_t kPercolationTag = 0x706572;  // "per"

std::uint64_t child_key(std::uint64_t parent_key, std::uint64_t index) {
  return mix64(parent_key ^ mix64(index + 1));
}

}  // namespace

RootedTree::RootedTree(TreeLaw law) : law_(std::move(law)) {
  for (const PercolationLayer& layer : law_.percolation) {
    if (!(layer.eta >= 0.0 && layer.eta <= 1.0)) throw DomainError("eta must lie in [0, 1]");
  }
  if (law_.max_depth && *law_.max_depth < 0) throw DomainError("depth must be >= 0");
  add_vertex(kNoParent, 0, kRootKey);
}

VertexId RootedTree::add_vertex(VertexId parent, int height, std::uint64_t key) {
  if (parent_.size() >= kNoParent) throw RangeError("tree exceeds 2^32 - 1 vertices");
  const auto id = static_cast<VertexId>(parent_.size());
  parent_.push_back(parent);
  height_.push_back(height);
  path_key_.push_back(key);
  first_child_.push_back(0);
  child_count_.push_back(0);
  expanded_.push_back(false);
  return id;
}

std::vector<std::uint64_t> RootedTree::draw_children(VertexId v) const {
  std::vector<std::uint64_t> keys;
  if (law_.max_depth && height_[v] >= *law_.max_depth) return keys;
  const std::uint64_t key = path_key_[v];
  RngStream rng(law_.seed, {kOffspringTag, key});
  const std::uint32_t k = law_.nu.sample(rng);
  keys.reserve(k);
  for (std::uint32_t i = 0; i < k; ++i) {
    const std::uint64_t ck = child_key(key, i);
    bool kept = true;
    for (const PercolationLayer& layer : law_.percolation) {
      RngStream coin(layer.seed, {kPercolationTag, ck});
      if (coin.bernoulli(layer.eta)) {
        kept = false;
        break;
      }
    }
    if (kept) keys.push_back(ck);
  }
  return keys;
}

void RootedTree::expand(VertexId v) {
  if (expanded_[v]) return;
  const std::vector<std::uint64_t> keys = draw_children(v);
  const int h = height_[v] + 1;
  first_child_[v] = static_cast<VertexId>(parent_.size());
  child_count_[v] = static_cast<VertexId>(keys.size());
  for (std::uint64_t k : keys) add_vertex(v, h, k);
  expanded_[v] = true;
}

RootedTree::ChildRange RootedTree::children(VertexId v) {
  expand(v);
  return ChildRange(first_child_[v], first_child_[v] + child_count_[v]);
}

std::size_t RootedTree::degree(VertexId v) {
  expand(v);
  return child_count_[v] + (parent_[v] == kNoParent ? 0 : 1);
}

void RootedTree::expand_to_depth(int depth) {
  // Ids are allocated in BFS order when expansion proceeds level by level.
  std::deque<VertexId> queue{root()};
  while (!queue.empty()) {
    const VertexId v = queue.front();
    queue.pop_front();
    if (height_[v] >= depth) continue;
    for (VertexId c : children(v)) queue.push_back(c);
  }
}

std::size_t RootedTree::count_at_height(int n) {
  expand_to_depth(n);
  return static_cast<std::size_t>(
      std::count_if(height_.begin(), height_.end(), [n](int h) { return h == n; }));
}

void RootedTree::write_text(std::ostream& out) const {
  std::vector<VertexId> order{root()};
  std::vector<long long> new_id(size(), -1);
  new_id[root()] = 0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const VertexId v = order[i];
    if (!expanded_[v]) continue;
    for (VertexId c = first_child_[v]; c < first_child_[v] + child_count_[v]; ++c) {
      new_id[c] = static_cast<long long>(order.size());
      order.push_back(c);
    }
  }
  for (VertexId v : order) {
    const long long p = parent_[v] == kNoParent ? -1 : new_id[parent_[v]];
    out << new_id[v] << ' ' << p << ' ' << height_[v] << '\n';
  }
}

template <class Keep>
RootedTree RootedTree::rebuild(const RootedTree& source, TreeLaw law, Keep keep) {
  RootedTree out(std::move(law));
  // (source id, target id) pairs in BFS order of the source.
  std::deque<std::pair<VertexId, VertexId>> queue{{source.root(), out.root()}};
  while (!queue.empty()) {
    const auto [sv, tv] = queue.front();
    queue.pop_front();
    if (!source.expanded_[sv]) continue;
    if (out.law_.max_depth && out.height_[tv] >= *out.law_.max_depth) {
      out.expanded_[tv] = true;
      continue;
    }
    std::vector<VertexId> kept;
    for (VertexId c = source.first_child_[sv]; c < source.first_child_[sv] + source.child_count_[sv];
         ++c) {
      if (keep(c)) kept.push_back(c);
    }
    out.first_child_[tv] = static_cast<VertexId>(out.size());
    out.child_count_[tv] = static_cast<VertexId>(kept.size());
    out.expanded_[tv] = true;
    for (VertexId c : kept) {
      const VertexId tc = out.add_vertex(tv, source.height_[c], source.path_key_[c]);
      queue.emplace_back(c, tc);
    }
  }
  return out;
}

RootedTree generate_gw(const OffspringDistribution& nu, int depth, std::uint64_t seed) {
  if (depth < 0) throw DomainError("depth must be >= 0");
  RootedTree tree(TreeLaw{nu, seed, depth, {}});
  tree.expand_to_depth(depth);
  return tree;
}

RootedTree lazy_gw(const OffspringDistribution& nu, std::uint64_t seed) {
  return RootedTree(TreeLaw{nu, seed, std::nullopt, {}});
}

RootedTree regular_tree(std::uint32_t b, std::optional<int> max_depth) {
  if (b < 1) throw DomainError("regular tree needs b >= 1");
  return RootedTree(TreeLaw{OffspringDistribution::deterministic(b), 0, max_depth, {}});
}

RootedTree percolate(const RootedTree& tree, double eta, std::uint64_t seed) {
  if (!(eta >= 0.0 && eta <= 1.0)) throw DomainError("eta must lie in [0, 1]");
  TreeLaw law = tree.law_;
  law.percolation.push_back({eta, seed});
  return RootedTree::rebuild(tree, std::move(law), [&](VertexId c) {
    RngStream coin(seed, {kPercolationTag, tree.path_key_[c]});
    return !coin.bernoulli(eta);
  });
}

RootedTree truncate(const RootedTree& tree, int max_height) {
  if (max_height < 0) throw DomainError("truncation height must be >= 0");
  TreeLaw law = tree.law_;
  law.max_depth = law.max_depth ? std::min(*law.max_depth, max_height) : max_height;
  return RootedTree::rebuild(tree, std::move(law),
                             [&](VertexId c) { return tree.height_[c] <= max_height; });
}

}  // namespace vrjp
