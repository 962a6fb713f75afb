#include "lexgeo/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <list>
#include <mutex>
#include <optional>

#include "lexgeo/error.hpp"
#include "lexgeo/lgeo.hpp"
#include "lexgeo/numeric.hpp"
#include "lexgeo/parallel.hpp"

namespace lexgeo {

namespace {

double dot(std::span<const double> u, std::span<const double> v) {
  return Eigen::Map<const Eigen::VectorXd>(u.data(), static_cast<Eigen::Index>(u.size()))
      .dot(Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())));
}

// dot / sqrt(|u|^2 |v|^2): identical inputs give exactly 1.
double cosine_from_parts(double uv, double uu, double vv) {
  const double c = uv / std::sqrt(uu * vv);
  return std::clamp(c, -1.0, 1.0);
}

Eigen::RowVectorXd column_means(const RowMatrix& rows) {
  Eigen::RowVectorXd mean(rows.cols());
  for (Eigen::Index j = 0; j < rows.cols(); ++j) {
    KahanSum s;
    for (Eigen::Index i = 0; i < rows.rows(); ++i) s.add(rows(i, j));
    mean(j) = s.value() / static_cast<double>(rows.rows());
  }
  return mean;
}

void fix_sign(Eigen::Ref<Eigen::RowVectorXd> v) {
  Eigen::Index best = 0;
  for (Eigen::Index j = 1; j < v.size(); ++j)
    if (std::fabs(v(j)) > std::fabs(v(best))) best = j;
  if (v(best) < 0) v = -v;
}

// Eigenpairs of the scatter matrix of centered rows, largest first.
struct Spectrum {
  Eigen::VectorXd values;
  RowMatrix vectors;  // one eigenvector per row
};

Spectrum scatter_spectrum(const RowMatrix& centered, std::size_t count) {
  const Eigen::Index dim = centered.cols();
  Eigen::MatrixXd scatter = Eigen::MatrixXd::Zero(dim, dim);
  scatter.selfadjointView<Eigen::Lower>().rankUpdate(centered.transpose());
  scatter = scatter.selfadjointView<Eigen::Lower>();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(scatter);
  if (solver.info() != Eigen::Success) fail("eigen-decomposition did not converge");
  Spectrum s;
  s.values.resize(static_cast<Eigen::Index>(count));
  s.vectors.resize(static_cast<Eigen::Index>(count), dim);
  for (std::size_t i = 0; i < count; ++i) {
    const Eigen::Index src = dim - 1 - static_cast<Eigen::Index>(i);
    s.values(static_cast<Eigen::Index>(i)) = std::max(0.0, solver.eigenvalues()(src));
    s.vectors.row(static_cast<Eigen::Index>(i)) = solver.eigenvectors().col(src).transpose();
    fix_sign(s.vectors.row(static_cast<Eigen::Index>(i)));
  }
  // total variance for ratio computations
  s.values.conservativeResize(static_cast<Eigen::Index>(count) + 1);
  s.values(static_cast<Eigen::Index>(count)) = std::max(0.0, scatter.trace());
  return s;
}

// Content hash of a row matrix; keys the basis cache.
std::uint64_t rows_hash(const RowMatrix& rows) {
  std::uint64_t h = 0x9e3779b97f4a7c15ULL ^ (static_cast<std::uint64_t>(rows.rows()) << 32) ^
                    static_cast<std::uint64_t>(rows.cols());
  const auto* words = reinterpret_cast<const std::uint64_t*>(rows.data());
  const std::size_t n = static_cast<std::size_t>(rows.size());
  for (std::size_t i = 0; i < n; ++i) h = (h ^ words[i]) * 0x100000001b3ULL + (h >> 29);
  return h;
}

// Recent fits, most recent first. A cached fit with more components serves
// smaller k by taking its leading rows, which are the same bits.
struct BasisCache {
  struct Entry {
    std::uint64_t hash;
    std::uint64_t crc;
    Eigen::Index n_rows;
    Eigen::Index n_cols;
    AbttBasis basis;

    bool matches(const Entry& o) const { return hash == o.hash && crc == o.crc && n_rows == o.n_rows && n_cols == o.n_cols; }
  };
  static constexpr std::size_t kCapacity = 4;
  std::mutex mu;
  std::list<Entry> entries;

  std::optional<AbttBasis> find(const Entry& key, std::size_t k) {
    std::lock_guard lock(mu);
    for (auto it = entries.begin(); it != entries.end(); ++it) {
      if (!it->matches(key) || static_cast<std::size_t>(it->basis.components.rows()) < k) continue;
      AbttBasis b{it->basis.mean, it->basis.components.topRows(static_cast<Eigen::Index>(k))};
      entries.splice(entries.begin(), entries, it);
      return b;
    }
    return std::nullopt;
  }

  void store(Entry entry) {
    std::lock_guard lock(mu);
    std::erase_if(entries, [&](const Entry& e) {
      return e.matches(entry) && e.basis.components.rows() <= entry.basis.components.rows();
    });
    entries.push_front(std::move(entry));
    if (entries.size() > kCapacity) entries.pop_back();
  }
};

BasisCache& basis_cache() {
  static BasisCache cache;
  return cache;
}

}  // namespace

double cosine_similarity(std::span<const double> u, std::span<const double> v) {
  require(u.size() == v.size(), "cosine_similarity: dimension mismatch");
  const double uu = dot(u, u);
  const double vv = dot(v, v);
  if (!(uu > 0.0) || !(vv > 0.0)) fail("cosine_similarity: zero-norm input");
  return cosine_from_parts(dot(u, v), uu, vv);
}

double cosine_similarity(std::span<const float> u, std::span<const float> v) {
  std::vector<double> a(u.begin(), u.end());
  std::vector<double> b(v.begin(), v.end());
  return cosine_similarity(std::span<const double>(a), std::span<const double>(b));
}

AbttBasis fit_abtt(const RowMatrix& rows, std::size_t k) {
  const auto n = static_cast<std::size_t>(rows.rows());
  const auto dim = static_cast<std::size_t>(rows.cols());
  require(n >= 2, "ABTT needs at least 2 rows");
  require(k < std::min(n, dim), "ABTT k=" + std::to_string(k) + " too large for " + std::to_string(n) + " x " +
                                    std::to_string(dim) + " matrix");
  AbttBasis basis;
  basis.mean = column_means(rows);
  if (k == 0) {
    basis.components.resize(0, rows.cols());
    return basis;
  }
  BasisCache::Entry key{rows_hash(rows),
                        crc64({reinterpret_cast<const std::uint8_t*>(rows.data()),
                               static_cast<std::size_t>(rows.size()) * sizeof(double)}),
                        rows.rows(), rows.cols(), {}};
  if (auto hit = basis_cache().find(key, k)) return *hit;
  const RowMatrix centered = rows.rowwise() - basis.mean;
  basis.components = scatter_spectrum(centered, k).vectors;
  key.basis = basis;
  basis_cache().store(std::move(key));
  return basis;
}

RowMatrix apply_abtt(const RowMatrix& rows, const AbttBasis& basis, bool subtract_mean) {
  RowMatrix out = subtract_mean ? RowMatrix(rows.rowwise() - basis.mean) : rows;
  if (basis.components.rows() > 0) {
    // Projection removal acts on the centered data so zero-variance
    // directions stay zero even when the mean is kept. Row by row, so equal
    // input rows give bit-equal output rows.
    for (Eigen::Index i = 0; i < rows.rows(); ++i) {
      const Eigen::RowVectorXd centered = rows.row(i) - basis.mean;
      for (Eigen::Index j = 0; j < basis.components.rows(); ++j) {
        const double coef = centered.dot(basis.components.row(j));
        out.row(i) -= coef * basis.components.row(j);
      }
    }
  }
  return out;
}

RowMatrix abtt_correct(const RowMatrix& rows, const CorrectionConfig& config) {
  return apply_abtt(rows, fit_abtt(rows, config.k), config.apply_global_mean);
}

std::size_t LayerSlice::valid_languages(std::size_t c) const {
  std::size_t n = 0;
  for (std::size_t l = 0; l < n_languages; ++l) n += present(c, l) ? 1 : 0;
  return n;
}

LayerSlice raw_slice(const EmbeddingStore& store, std::size_t layer) {
  require(layer < store.n_layers(), "layer position out of range");
  LayerSlice s;
  s.n_concepts = store.n_concepts();
  s.n_languages = store.n_languages();
  s.dim = store.dim();
  s.mask = store.mask();
  s.rows = RowMatrix::Zero(static_cast<Eigen::Index>(s.n_concepts * s.n_languages), static_cast<Eigen::Index>(s.dim));
  for (std::size_t c = 0; c < s.n_concepts; ++c)
    for (std::size_t l = 0; l < s.n_languages; ++l) {
      if (!s.present(c, l)) continue;
      auto src = store.vec(layer, c, l);
      std::copy(src.begin(), src.end(), s.row(c, l).begin());
    }
  return s;
}

LayerSlice corrected_slice(const LayerSlice& raw, const CorrectionConfig& config) {
  LayerSlice s = raw;
  std::vector<Eigen::Index> valid;
  for (std::size_t i = 0; i < s.mask.size(); ++i)
    if (s.mask[i]) valid.push_back(static_cast<Eigen::Index>(i));

  if (config.k > 0 || config.apply_global_mean) {
    RowMatrix packed(static_cast<Eigen::Index>(valid.size()), static_cast<Eigen::Index>(s.dim));
    for (std::size_t i = 0; i < valid.size(); ++i) packed.row(static_cast<Eigen::Index>(i)) = raw.rows.row(valid[i]);
    const RowMatrix out = abtt_correct(packed, config);
    for (std::size_t i = 0; i < valid.size(); ++i) s.rows.row(valid[i]) = out.row(static_cast<Eigen::Index>(i));
  }
  if (config.center_languages) center_languages(s);
  return s;
}

LayerSlice corrected_slice(const EmbeddingStore& store, std::size_t layer, const CorrectionConfig& config) {
  return corrected_slice(raw_slice(store, layer), config);
}

void center_languages(LayerSlice& slice) {
  for (std::size_t l = 0; l < slice.n_languages; ++l) {
    std::vector<KahanSum> acc(slice.dim);
    std::size_t count = 0;
    for (std::size_t c = 0; c < slice.n_concepts; ++c) {
      if (!slice.present(c, l)) continue;
      ++count;
      auto r = slice.row(c, l);
      for (std::size_t d = 0; d < slice.dim; ++d) acc[d].add(r[d]);
    }
    require(count > 0, "language at position " + std::to_string(l) + " has no valid concepts");
    std::vector<double> centroid(slice.dim);
    for (std::size_t d = 0; d < slice.dim; ++d) centroid[d] = acc[d].value() / static_cast<double>(count);
    for (std::size_t c = 0; c < slice.n_concepts; ++c) {
      if (!slice.present(c, l)) continue;
      auto r = slice.row(c, l);
      for (std::size_t d = 0; d < slice.dim; ++d) r[d] -= centroid[d];
    }
  }
}

LayerSlice per_language_center(const EmbeddingStore& store, std::size_t layer) {
  LayerSlice s = raw_slice(store, layer);
  center_languages(s);
  return s;
}

RowMatrix PcaResult::project(const RowMatrix& points) const {
  return (points.rowwise() - mean) * components.transpose();
}

PcaResult pca_project(const RowMatrix& points, std::size_t n_components) {
  const auto n = static_cast<std::size_t>(points.rows());
  const auto dim = static_cast<std::size_t>(points.cols());
  require(n >= 2, "PCA needs at least 2 points");
  require(n_components >= 1 && n_components <= std::min(n - 1, dim),
          "PCA n_components=" + std::to_string(n_components) + " too large for " + std::to_string(n) +
              " points in dim " + std::to_string(dim));
  PcaResult r;
  r.mean = column_means(points);
  const RowMatrix centered = points.rowwise() - r.mean;
  const Spectrum s = scatter_spectrum(centered, n_components);
  const double total = s.values(static_cast<Eigen::Index>(n_components));
  const double scale = std::max(1.0, r.mean.squaredNorm());
  if (!(total > 1e-24 * scale)) fail("PCA: all points identical");
  r.components = s.vectors;
  for (std::size_t i = 0; i < n_components; ++i)
    r.explained_variance_ratio.push_back(std::clamp(s.values(static_cast<Eigen::Index>(i)) / total, 0.0, 1.0));
  // the solver can return tiny out-of-order values for degenerate spectra
  for (std::size_t i = 1; i < n_components; ++i)
    r.explained_variance_ratio[i] = std::min(r.explained_variance_ratio[i], r.explained_variance_ratio[i - 1]);
  r.projected = centered * r.components.transpose();
  return r;
}

DistanceMatrix pairwise_language_distance(const LayerSlice& slice, const std::vector<LanguageMeta>& languages) {
  const std::size_t L = slice.n_languages;
  require(languages.size() == L, "language metadata does not match slice");
  std::vector<double> norms(slice.mask.size(), 0.0);
  for (std::size_t c = 0; c < slice.n_concepts; ++c)
    for (std::size_t l = 0; l < L; ++l)
      if (slice.present(c, l)) norms[c * L + l] = dot(slice.row(c, l), slice.row(c, l));

  std::vector<std::string> labels;
  for (const auto& l : languages) labels.push_back(l.code);
  DistanceMatrix m = DistanceMatrix::zeros(std::move(labels));

  parallel_for(L, [&](std::size_t a) {
    for (std::size_t b = a + 1; b < L; ++b) {
      KahanSum s;
      std::size_t shared = 0;
      for (std::size_t c = 0; c < slice.n_concepts; ++c) {
        if (!slice.present(c, a) || !slice.present(c, b)) continue;
        const double na = norms[c * L + a];
        const double nb = norms[c * L + b];
        if (!(na > 0.0) || !(nb > 0.0)) fail("cosine_similarity: zero-norm input (concept " + std::to_string(c) + ")");
        s.add(1.0 - cosine_from_parts(dot(slice.row(c, a), slice.row(c, b)), na, nb));
        ++shared;
      }
      if (shared == 0) fail("languages " + m.labels[a] + " and " + m.labels[b] + " share no valid concepts");
      m.at(a, b) = s.value() / static_cast<double>(shared);
    }
  });
  for (std::size_t a = 0; a < L; ++a)
    for (std::size_t b = a + 1; b < L; ++b) m.at(b, a) = m.at(a, b);
  return m;
}

DistanceMatrix pairwise_language_distance(const EmbeddingStore& store, std::size_t layer,
                                          const CorrectionConfig& correction) {
  return pairwise_language_distance(corrected_slice(store, layer, correction), store.languages());
}

double convergence_score(const LayerSlice& slice, std::size_t concept_index) {
  require(concept_index < slice.n_concepts, "concept index out of range");
  std::vector<std::size_t> langs;
  for (std::size_t l = 0; l < slice.n_languages; ++l)
    if (slice.present(concept_index, l)) langs.push_back(l);
  require(langs.size() >= 2, "concept " + std::to_string(concept_index) + " has fewer than 2 valid languages");
  std::vector<double> norms;
  for (std::size_t l : langs) {
    const double n = dot(slice.row(concept_index, l), slice.row(concept_index, l));
    if (!(n > 0.0)) fail("cosine_similarity: zero-norm input (concept " + std::to_string(concept_index) + ")");
    norms.push_back(n);
  }
  KahanSum s;
  for (std::size_t i = 0; i < langs.size(); ++i)
    for (std::size_t j = i + 1; j < langs.size(); ++j)
      s.add(cosine_from_parts(dot(slice.row(concept_index, langs[i]), slice.row(concept_index, langs[j])), norms[i], norms[j]));
  const double pairs = static_cast<double>(langs.size() * (langs.size() - 1) / 2);
  return s.value() / pairs;
}

double convergence_score(const EmbeddingStore& store, std::size_t layer, std::size_t concept_index,
                         const CorrectionConfig& correction) {
  return convergence_score(corrected_slice(store, layer, correction), concept_index);
}

std::vector<std::size_t> Dendrogram::leaf_order() const {
  std::vector<std::size_t> order;
  if (n_leaves == 0) return order;
  if (merges.empty()) {
    order.push_back(0);
    return order;
  }
  std::vector<std::size_t> stack{n_leaves + merges.size() - 1};
  while (!stack.empty()) {
    const std::size_t id = stack.back();
    stack.pop_back();
    if (id < n_leaves) {
      order.push_back(id);
    } else {
      const Merge& m = merges[id - n_leaves];
      stack.push_back(m.b);
      stack.push_back(m.a);
    }
  }
  return order;
}

Dendrogram upgma_cluster(const DistanceMatrix& matrix) {
  const std::size_t n = matrix.size();
  require(n >= 2, "UPGMA needs at least 2 leaves");
  for (double v : matrix.values) require(std::isfinite(v), "UPGMA: non-finite entries");

  // active clusters kept in creation order so ties resolve to the lowest ids
  std::vector<std::size_t> ids(n);
  std::vector<std::size_t> sizes(n, 1);
  std::vector<std::vector<double>> d(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    ids[i] = i;
    for (std::size_t j = 0; j < n; ++j) d[i][j] = matrix.at(i, j);
  }

  Dendrogram out;
  out.n_leaves = n;
  double last = -std::numeric_limits<double>::infinity();
  while (ids.size() > 1) {
    std::size_t bi = 0;
    std::size_t bj = 1;
    for (std::size_t i = 0; i < ids.size(); ++i)
      for (std::size_t j = i + 1; j < ids.size(); ++j)
        if (d[i][j] < d[bi][bj]) {
          bi = i;
          bj = j;
        }
    const std::size_t size = sizes[bi] + sizes[bj];
    // average linkage is monotone; clamp away rounding-level inversions
    const double height = std::max(d[bi][bj], last);
    last = height;
    out.merges.push_back({ids[bi], ids[bj], height, size});

    std::vector<double> merged(ids.size());
    for (std::size_t k = 0; k < ids.size(); ++k)
      merged[k] = (static_cast<double>(sizes[bi]) * d[bi][k] + static_cast<double>(sizes[bj]) * d[bj][k]) /
                  static_cast<double>(size);

    // new cluster replaces bi's slot data but moves to the end of the order
    std::vector<std::size_t> keep;
    for (std::size_t k = 0; k < ids.size(); ++k)
      if (k != bi && k != bj) keep.push_back(k);
    std::vector<std::size_t> nids;
    std::vector<std::size_t> nsizes;
    std::vector<std::vector<double>> nd(keep.size() + 1, std::vector<double>(keep.size() + 1, 0.0));
    for (std::size_t x = 0; x < keep.size(); ++x) {
      nids.push_back(ids[keep[x]]);
      nsizes.push_back(sizes[keep[x]]);
      for (std::size_t y = 0; y < keep.size(); ++y) nd[x][y] = d[keep[x]][keep[y]];
      nd[x][keep.size()] = nd[keep.size()][x] = merged[keep[x]];
    }
    nids.push_back(n + out.merges.size() - 1);
    nsizes.push_back(size);
    ids = std::move(nids);
    sizes = std::move(nsizes);
    d = std::move(nd);
  }
  return out;
}

}  // namespace lexgeo
