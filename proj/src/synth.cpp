#include "lexgeo/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include "lexgeo/error.hpp"
#include "lexgeo/lgeo.hpp"
#include "lexgeo/rng.hpp"

namespace lexgeo {

namespace {

std::ptrdiff_t add_node(Tree& t, TreeNode n) {
  t.nodes.push_back(n);
  return static_cast<std::ptrdiff_t>(t.nodes.size() - 1);
}

// Random topology over the given leaves; returns the subtree root.
std::ptrdiff_t random_subtree(Tree& t, std::vector<std::size_t> leaves, double min_length, double max_length,
                              Rng& rng) {
  auto draw = [&] { return min_length + (max_length - min_length) * rng.uniform(); };
  std::vector<std::ptrdiff_t> active;
  for (std::size_t l : leaves) active.push_back(add_node(t, {-1, -1, static_cast<std::ptrdiff_t>(l), draw()}));
  while (active.size() > 1) {
    const auto i = static_cast<std::size_t>(rng.below(active.size()));
    std::swap(active[i], active.back());
    const std::ptrdiff_t a = active.back();
    active.pop_back();
    const auto j = static_cast<std::size_t>(rng.below(active.size()));
    const std::ptrdiff_t b = active[j];
    active[j] = add_node(t, {a, b, -1, draw()});
  }
  return active.front();
}

std::string language_code(std::size_t i) {
  std::string s(3, 'a');
  for (std::size_t k = 3; k-- > 0;) {
    s[k] = static_cast<char>('a' + i % 26);
    i /= 26;
  }
  return s + "_Latn";
}

std::string concept_gloss(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "c%03zu", i);
  return buf;
}

std::vector<double> gaussian(Rng& rng, std::size_t dim) {
  std::vector<double> v(dim);
  for (double& x : v) x = rng.normal();
  return v;
}

// Leaves under each child of the root (empty when the root is a leaf).
std::vector<std::ptrdiff_t> clade_of_leaves(const Tree& t, std::size_t n) {
  std::vector<std::ptrdiff_t> clade(n, -1);
  const TreeNode& root = t.nodes[t.root];
  if (root.leaf >= 0) return clade;
  const std::ptrdiff_t kids[2] = {root.left, root.right};
  for (int k = 0; k < 2; ++k) {
    std::vector<std::ptrdiff_t> stack{kids[k]};
    while (!stack.empty()) {
      const TreeNode& node = t.nodes[static_cast<std::size_t>(stack.back())];
      stack.pop_back();
      if (node.leaf >= 0) {
        clade[static_cast<std::size_t>(node.leaf)] = k;
      } else {
        stack.push_back(node.left);
        stack.push_back(node.right);
      }
    }
  }
  return clade;
}

}  // namespace

std::size_t Tree::n_leaves() const {
  return static_cast<std::size_t>(std::count_if(nodes.begin(), nodes.end(), [](const TreeNode& n) { return n.leaf >= 0; }));
}

void Tree::validate() const {
  require(!nodes.empty() && root < nodes.size(), "tree: missing root");
  const std::size_t n = n_leaves();
  std::vector<int> seen(n, 0);
  std::vector<int> visits(nodes.size(), 0);
  std::vector<std::size_t> stack{root};
  while (!stack.empty()) {
    const std::size_t id = stack.back();
    stack.pop_back();
    require(++visits[id] == 1, "tree: node reachable twice");
    const TreeNode& node = nodes[id];
    require(std::isfinite(node.length) && node.length >= 0.0, "tree: branch length must be finite and >= 0");
    if (node.leaf >= 0) {
      require(static_cast<std::size_t>(node.leaf) < n, "tree: leaf index out of range");
      ++seen[static_cast<std::size_t>(node.leaf)];
      continue;
    }
    require(node.left >= 0 && node.right >= 0 && static_cast<std::size_t>(node.left) < nodes.size() &&
                static_cast<std::size_t>(node.right) < nodes.size(),
            "tree: internal node needs two children");
    stack.push_back(static_cast<std::size_t>(node.left));
    stack.push_back(static_cast<std::size_t>(node.right));
  }
  for (int s : seen) require(s == 1, "tree: every language must appear at exactly one leaf");
}

Tree cherry_tree(double left_length, double right_length) {
  Tree t;
  add_node(t, {-1, -1, 0, left_length});
  add_node(t, {-1, -1, 1, right_length});
  t.root = static_cast<std::size_t>(add_node(t, {0, 1, -1, 0.0}));
  return t;
}

Tree balanced_tree(std::size_t depth, double length) {
  Tree t;
  std::vector<std::ptrdiff_t> level;
  for (std::size_t i = 0; i < (std::size_t{1} << depth); ++i)
    level.push_back(add_node(t, {-1, -1, static_cast<std::ptrdiff_t>(i), length}));
  while (level.size() > 1) {
    std::vector<std::ptrdiff_t> next;
    for (std::size_t i = 0; i + 1 < level.size(); i += 2) next.push_back(add_node(t, {level[i], level[i + 1], -1, length}));
    level = std::move(next);
  }
  t.root = static_cast<std::size_t>(level.front());
  t.nodes[t.root].length = 0.0;
  return t;
}

Tree two_clade_tree(std::size_t n_left, std::size_t n_right, double within_length, double stem_length,
                    std::uint64_t seed) {
  require(n_left >= 1 && n_right >= 1, "two_clade_tree: both clades need a leaf");
  Tree t;
  Rng rng(seed);
  std::vector<std::size_t> left(n_left);
  std::vector<std::size_t> right(n_right);
  for (std::size_t i = 0; i < n_left; ++i) left[i] = i;
  for (std::size_t i = 0; i < n_right; ++i) right[i] = n_left + i;
  const std::ptrdiff_t a = random_subtree(t, left, 0.5 * within_length, within_length, rng);
  const std::ptrdiff_t b = random_subtree(t, right, 0.5 * within_length, within_length, rng);
  t.nodes[static_cast<std::size_t>(a)].length = stem_length;
  t.nodes[static_cast<std::size_t>(b)].length = stem_length;
  t.root = static_cast<std::size_t>(add_node(t, {a, b, -1, 0.0}));
  return t;
}

Tree random_tree(std::size_t n_leaves, double min_length, double max_length, std::uint64_t seed) {
  require(n_leaves >= 1, "random_tree: needs a leaf");
  require(min_length >= 0.0 && max_length >= min_length, "random_tree: bad branch length range");
  Tree t;
  Rng rng(seed);
  std::vector<std::size_t> leaves(n_leaves);
  for (std::size_t i = 0; i < n_leaves; ++i) leaves[i] = i;
  t.root = static_cast<std::size_t>(random_subtree(t, leaves, min_length, max_length, rng));
  t.nodes[t.root].length = 0.0;
  return t;
}

DistanceMatrix tree_path_distances(const Tree& tree, std::vector<std::string> labels) {
  tree.validate();
  const std::size_t n = tree.n_leaves();
  if (labels.empty())
    for (std::size_t i = 0; i < n; ++i) labels.push_back("L" + std::to_string(i));
  require(labels.size() == n, "tree_path_distances: label count does not match leaves");

  std::vector<std::ptrdiff_t> parent(tree.nodes.size(), -1);
  for (std::size_t i = 0; i < tree.nodes.size(); ++i)
    if (tree.nodes[i].leaf < 0) {
      parent[static_cast<std::size_t>(tree.nodes[i].left)] = static_cast<std::ptrdiff_t>(i);
      parent[static_cast<std::size_t>(tree.nodes[i].right)] = static_cast<std::ptrdiff_t>(i);
    }
  std::vector<std::size_t> leaf_node(n);
  for (std::size_t i = 0; i < tree.nodes.size(); ++i)
    if (tree.nodes[i].leaf >= 0) leaf_node[static_cast<std::size_t>(tree.nodes[i].leaf)] = i;

  // distance from each leaf to each of its ancestors
  std::vector<std::vector<std::pair<std::size_t, double>>> up(n);
  for (std::size_t l = 0; l < n; ++l) {
    double d = 0.0;
    for (std::ptrdiff_t v = static_cast<std::ptrdiff_t>(leaf_node[l]); v >= 0; v = parent[static_cast<std::size_t>(v)]) {
      up[l].emplace_back(static_cast<std::size_t>(v), d);
      d += tree.nodes[static_cast<std::size_t>(v)].length;
    }
  }
  DistanceMatrix m = DistanceMatrix::zeros(std::move(labels));
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b) {
      double best = 0.0;
      for (const auto& [node, da] : up[a]) {
        auto it = std::find_if(up[b].begin(), up[b].end(), [&](const auto& e) { return e.first == node; });
        if (it != up[b].end()) {
          best = da + it->second;
          break;
        }
      }
      m.at(a, b) = m.at(b, a) = best;
    }
  return m;
}

void PlantSpec::validate() const {
  require(n_concepts >= 1 && n_languages >= 1 && dim >= 1 && n_layers >= 1, "plant: sizes must be positive");
  require(std::isfinite(concept_scale) && concept_scale > 0.0, "plant: concept_scale must be > 0");
  require(std::isfinite(offset_scale) && offset_scale >= 0.0, "plant: offset_scale must be >= 0");
  require(std::isfinite(noise_scale) && noise_scale >= 0.0, "plant: noise_scale must be >= 0");
  require(std::isfinite(category_scale) && category_scale >= 0.0, "plant: category_scale must be >= 0");
  require(std::isfinite(concept_scale_spread) && concept_scale_spread >= 0.0,
          "plant: concept_scale_spread must be >= 0");
  require(n_categories >= 1 && n_families >= 1, "plant: n_categories and n_families must be positive");
  require(offset_rank <= dim, "plant: offset_rank must not exceed dim");
  if (layer_offset_decay)
    require(*layer_offset_decay >= 0.0 && *layer_offset_decay <= 1.0, "plant: layer_offset_decay must be in [0, 1]");
  for (const auto& p : colex_pairs) {
    require(p.concept_a < n_concepts && p.concept_b < n_concepts && p.concept_a != p.concept_b,
            "plant: colex pair must name two distinct concepts");
    require(p.correlation >= 0.0 && p.correlation <= 1.0, "plant: colex correlation must be in [0, 1]");
  }
  if (tree) {
    tree->validate();
    require(tree->n_leaves() == n_languages, "plant: tree leaf count must equal n_languages");
  }
}

Plant gen_planted(const PlantSpec& spec) {
  spec.validate();
  const std::size_t C = spec.n_concepts;
  const std::size_t L = spec.n_languages;
  const std::size_t D = spec.dim;

  Rng concept_rng = Rng::substream(spec.seed, 1);
  Rng category_rng = Rng::substream(spec.seed, 2);
  Rng offset_rng = Rng::substream(spec.seed, 3);
  Rng spread_rng = Rng::substream(spec.seed, 4);

  PlantTruth truth;
  for (std::size_t c = 0; c < C; ++c) truth.concept_vectors.push_back(gaussian(concept_rng, D));
  if (spec.category_scale > 0.0) {
    std::vector<std::vector<double>> dirs;
    for (std::size_t k = 0; k < spec.n_categories; ++k) dirs.push_back(gaussian(category_rng, D));
    for (std::size_t c = 0; c < C; ++c)
      for (std::size_t d = 0; d < D; ++d)
        truth.concept_vectors[c][d] += spec.category_scale * dirs[c % spec.n_categories][d];
  }
  for (const auto& p : spec.colex_pairs) {
    const double rho = p.correlation;
    const double rest = std::sqrt(1.0 - rho * rho);
    for (std::size_t d = 0; d < D; ++d)
      truth.concept_vectors[p.concept_b][d] =
          rho * truth.concept_vectors[p.concept_a][d] + rest * truth.concept_vectors[p.concept_b][d];
  }
  truth.colex_pairs = spec.colex_pairs;
  for (std::size_t c = 0; c < C; ++c)
    truth.concept_scales.push_back(spec.concept_scale * (1.0 + spec.concept_scale_spread * spread_rng.uniform()));

  truth.language_offsets.assign(L, std::vector<double>(D, 0.0));
  if (spec.tree) {
    const Tree& t = *spec.tree;
    std::vector<std::vector<double>> at(t.nodes.size());
    std::vector<double> to_root(t.nodes.size(), 0.0);
    at[t.root] = std::vector<double>(D, 0.0);
    double depth = 0.0;
    std::vector<std::size_t> stack{t.root};
    while (!stack.empty()) {
      const std::size_t id = stack.back();
      stack.pop_back();
      const TreeNode& node = t.nodes[id];
      if (node.leaf >= 0) {
        truth.language_offsets[static_cast<std::size_t>(node.leaf)] = at[id];
        depth += to_root[id];
        continue;
      }
      for (std::ptrdiff_t child : {node.left, node.right}) {
        const auto ch = static_cast<std::size_t>(child);
        const double step = std::sqrt(t.nodes[ch].length);
        at[ch] = at[id];
        for (std::size_t d = 0; d < D; ++d) at[ch][d] += step * offset_rng.normal();
        to_root[ch] = to_root[id] + t.nodes[ch].length;
        stack.push_back(ch);
      }
    }
    // unit per-dimension variance on average, so offset_scale compares directly with concept_scale
    depth /= static_cast<double>(L);
    if (depth > 0.0)
      for (auto& o : truth.language_offsets)
        for (double& x : o) x /= std::sqrt(depth);
    truth.tree_distances = tree_path_distances(t);
  } else {
    for (std::size_t l = 0; l < L; ++l) truth.language_offsets[l] = gaussian(offset_rng, D);
  }
  if (spec.offset_rank > 0 && spec.offset_rank < D) {
    Rng basis_rng = Rng::substream(spec.seed, 5);
    std::vector<std::vector<double>> basis;
    while (basis.size() < spec.offset_rank) {
      std::vector<double> b = gaussian(basis_rng, D);
      for (const auto& q : basis) {
        double proj = 0.0;
        for (std::size_t d = 0; d < D; ++d) proj += b[d] * q[d];
        for (std::size_t d = 0; d < D; ++d) b[d] -= proj * q[d];
      }
      double norm = 0.0;
      for (double x : b) norm += x * x;
      norm = std::sqrt(norm);
      if (norm < 1e-8) continue;
      for (double& x : b) x /= norm;
      basis.push_back(std::move(b));
    }
    const double gain = std::sqrt(static_cast<double>(D) / static_cast<double>(spec.offset_rank));
    for (auto& o : truth.language_offsets) {
      std::vector<double> projected(D, 0.0);
      for (const auto& q : basis) {
        double coef = 0.0;
        for (std::size_t d = 0; d < D; ++d) coef += o[d] * q[d];
        for (std::size_t d = 0; d < D; ++d) projected[d] += gain * coef * q[d];
      }
      o = std::move(projected);
    }
  }

  std::vector<ConceptMeta> concepts;
  for (std::size_t c = 0; c < C; ++c)
    concepts.push_back({concept_gloss(c), "cat" + std::to_string(c % spec.n_categories), false});
  std::vector<LanguageMeta> languages;
  const auto clades = spec.tree ? clade_of_leaves(*spec.tree, L) : std::vector<std::ptrdiff_t>(L, -1);
  for (std::size_t l = 0; l < L; ++l) {
    const std::size_t fam = clades[l] >= 0 ? static_cast<std::size_t>(clades[l]) : l % spec.n_families;
    languages.push_back({language_code(l), "fam" + std::to_string(fam), "Latn"});
  }
  if (spec.tree) {
    std::vector<std::string> labels;
    for (const auto& l : languages) labels.push_back(l.code);
    truth.tree_distances.labels = labels;
  }
  std::vector<std::uint32_t> layers;
  for (std::size_t i = 0; i < spec.n_layers; ++i) layers.push_back(static_cast<std::uint32_t>(i));

  EmbeddingStore store(concepts, languages, layers, spec.condition, D);
  for (std::size_t c = 0; c < C; ++c)
    for (std::size_t l = 0; l < L; ++l) store.set_present(c, l, true);
  for (std::size_t i = 0; i < spec.n_layers; ++i) {
    const double decay = spec.layer_offset_decay ? std::pow(*spec.layer_offset_decay, static_cast<double>(i)) : 1.0;
    Rng noise_rng = Rng::substream(spec.seed, 16 + i);
    for (std::size_t c = 0; c < C; ++c)
      for (std::size_t l = 0; l < L; ++l) {
        auto v = store.vec(i, c, l);
        for (std::size_t d = 0; d < D; ++d) {
          const double x = truth.concept_scales[c] * truth.concept_vectors[c][d] +
                           decay * spec.offset_scale * truth.language_offsets[l][d] +
                           spec.noise_scale * noise_rng.normal();
          v[d] = static_cast<float>(x);
        }
      }
  }
  store.validate();
  return {std::move(store), std::move(truth)};
}

json PlantTruth::to_json(const EmbeddingStore& store) const {
  json j;
  json pairs = json::array();
  for (const auto& p : colex_pairs)
    pairs.push_back({{"concept_a", store.concepts()[p.concept_a].gloss},
                     {"concept_b", store.concepts()[p.concept_b].gloss},
                     {"correlation", p.correlation}});
  j["colex_pairs"] = pairs;
  j["concept_scales"] = concept_scales;
  json offsets = json::object();
  for (std::size_t l = 0; l < language_offsets.size(); ++l) offsets[store.languages()[l].code] = language_offsets[l];
  j["language_offsets"] = offsets;
  if (tree_distances.size() > 0) {
    j["tree_distances"] = {{"labels", tree_distances.labels}, {"values", tree_distances.values}};
  } else {
    j["tree_distances"] = nullptr;
  }
  return j;
}

namespace {

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

}  // namespace

PlantSpec plant_spec_from_json(const json& j) {
  require(j.is_object(), "plant spec must be a JSON object");
  static const std::set<std::string> known{"n_concepts",   "n_languages",     "dim",          "n_layers",
                                           "concept_scale", "offset_scale",   "noise_scale",  "tree",
                                           "colex_pairs",  "layer_offset_decay", "seed",      "n_categories",
                                           "category_scale", "concept_scale_spread", "n_families", "condition",
                                           "offset_rank"};
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!known.contains(it.key())) fail("plant spec: unknown key '" + it.key() + "'");
  try {
    PlantSpec s;
    s.n_concepts = get_or(j, "n_concepts", s.n_concepts);
    s.n_languages = get_or(j, "n_languages", s.n_languages);
    s.dim = get_or(j, "dim", s.dim);
    s.n_layers = get_or(j, "n_layers", s.n_layers);
    s.concept_scale = get_or(j, "concept_scale", s.concept_scale);
    s.offset_scale = get_or(j, "offset_scale", s.offset_scale);
    s.noise_scale = get_or(j, "noise_scale", s.noise_scale);
    s.seed = get_or(j, "seed", s.seed);
    s.n_categories = get_or(j, "n_categories", s.n_categories);
    s.category_scale = get_or(j, "category_scale", s.category_scale);
    s.concept_scale_spread = get_or(j, "concept_scale_spread", s.concept_scale_spread);
    s.n_families = get_or(j, "n_families", s.n_families);
    s.offset_rank = get_or(j, "offset_rank", s.offset_rank);
    if (j.contains("condition")) s.condition = condition_from_string(j.at("condition").get<std::string>());
    if (j.contains("layer_offset_decay") && !j.at("layer_offset_decay").is_null())
      s.layer_offset_decay = j.at("layer_offset_decay").get<double>();
    if (j.contains("colex_pairs"))
      for (const auto& p : j.at("colex_pairs"))
        s.colex_pairs.push_back({p.at("concept_a").get<std::size_t>(), p.at("concept_b").get<std::size_t>(),
                                 get_or(p, "correlation", 0.9)});
    if (j.contains("tree") && !j.at("tree").is_null()) {
      const json& t = j.at("tree");
      const std::string kind = get_or<std::string>(t, "kind", "random");
      const std::uint64_t tree_seed = get_or<std::uint64_t>(t, "seed", s.seed);
      if (kind == "random") {
        s.tree = random_tree(s.n_languages, get_or(t, "min_length", 0.1), get_or(t, "max_length", 1.0), tree_seed);
      } else if (kind == "two_clade") {
        const std::size_t n_left = get_or(t, "n_left", s.n_languages / 2);
        require(n_left < s.n_languages, "plant spec: tree.n_left must be below n_languages");
        s.tree = two_clade_tree(n_left, s.n_languages - n_left, get_or(t, "within_length", 0.2),
                                get_or(t, "stem_length", 2.0), tree_seed);
      } else {
        fail("plant spec: tree.kind must be 'random' or 'two_clade'");
      }
    }
    s.validate();
    return s;
  } catch (const json::exception& e) {
    fail(std::string("plant spec: ") + e.what());
  }
}

std::vector<std::filesystem::path> write_plant(const Plant& plant, const std::filesystem::path& dir,
                                               const std::string& name) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail_io("cannot create output directory '" + dir.string() + "': " + ec.message());
  std::vector<std::filesystem::path> written;
  auto write_text = [&](const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail_io("cannot open '" + path.string() + "' for writing");
    out << text;
    if (!out) fail_io("write failed for '" + path.string() + "'");
    written.push_back(path);
  };
  const EmbeddingStore& store = plant.store;

  const auto store_path = dir / (name + ".lgeo");
  save_store(store, store_path);
  written.push_back(store_path);
  write_text(dir / (name + "_truth.json"), canonical_dump(plant.truth.to_json(store)));

  std::string meta = "gloss,category,polysemous\n";
  for (const auto& c : store.concepts()) meta += c.gloss + "," + c.category + "," + (c.polysemous ? "1" : "0") + "\n";
  write_text(dir / (name + "_concepts.csv"), meta);

  std::string colex = "concept_a,concept_b,family_count\n";
  for (const auto& p : plant.truth.colex_pairs)
    colex += store.concepts()[p.concept_a].gloss + "," + store.concepts()[p.concept_b].gloss + ",10\n";
  write_text(dir / (name + "_colex.csv"), colex);

  std::string offsets = "concept_a,concept_b\n";
  for (std::size_t c = 0; c + 1 < std::min<std::size_t>(store.n_concepts(), 8); c += 2)
    offsets += store.concepts()[c].gloss + "," + store.concepts()[c + 1].gloss + "\n";
  write_text(dir / (name + "_offsets.csv"), offsets);

  const DistanceMatrix& td = plant.truth.tree_distances;
  if (td.size() > 0) {
    std::string csv;
    for (const auto& l : td.labels) csv += "," + l;
    csv += "\n";
    char buf[40];
    for (std::size_t i = 0; i < td.size(); ++i) {
      csv += td.labels[i];
      for (std::size_t j = 0; j < td.size(); ++j) {
        std::snprintf(buf, sizeof buf, ",%.17g", td.at(i, j));
        csv += buf;
      }
      csv += "\n";
    }
    write_text(dir / (name + "_tree.csv"), csv);
  }
  return written;
}

}  // namespace lexgeo
