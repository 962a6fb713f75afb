#include "lexgeo/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <set>

#include "lexgeo/error.hpp"
#include "lexgeo/lgeo.hpp"
#include "lexgeo/numeric.hpp"
#include "lexgeo/parallel.hpp"

namespace lexgeo {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

double dot(std::span<const double> u, std::span<const double> v) {
  return Eigen::Map<const Eigen::VectorXd>(u.data(), static_cast<Eigen::Index>(u.size()))
      .dot(Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())));
}

std::span<const double> row_span(const RowMatrix& m, Eigen::Index r) {
  return {m.data() + r * m.cols(), static_cast<std::size_t>(m.cols())};
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

ExperimentReport make_report(std::string name, const EmbeddingStore& store, std::size_t layer,
                             const CorrectionConfig& correction) {
  require(layer < store.n_layers(), "layer position out of range");
  ExperimentReport r;
  r.experiment = std::move(name);
  r.config = {{"layer", store.layers()[layer]}, {"correction", correction_json(correction)}};
  r.provenance = {{"store", store_provenance(store)}};
  return r;
}

struct Scored {
  std::size_t concept_index;
  double score;
};

// Valid scores sorted descending; ties by concept index.
std::vector<Scored> ranked(const std::vector<std::optional<double>>& scores) {
  std::vector<Scored> out;
  for (std::size_t c = 0; c < scores.size(); ++c)
    if (scores[c]) out.push_back({c, *scores[c]});
  std::stable_sort(out.begin(), out.end(), [](const Scored& a, const Scored& b) { return a.score > b.score; });
  return out;
}

json scored_rows(const EmbeddingStore& store, std::span<const Scored> items) {
  json rows = json::array();
  for (const auto& s : items) rows.push_back({{"concept", store.concepts()[s.concept_index].gloss}, {"score", s.score}});
  return rows;
}

json top_bottom(const EmbeddingStore& store, const std::vector<Scored>& r, std::size_t count, bool top) {
  const std::size_t n = std::min(count, r.size());
  std::span<const Scored> all(r);
  return scored_rows(store, top ? all.first(n) : all.last(n));
}

std::vector<double> values_of(const std::vector<Scored>& r) {
  std::vector<double> v;
  for (const auto& s : r) v.push_back(s.score);
  return v;
}

json excluded_glosses(const EmbeddingStore& store, const std::vector<std::optional<double>>& scores) {
  json out = json::array();
  for (std::size_t c = 0; c < scores.size(); ++c)
    if (!scores[c]) out.push_back(store.concepts()[c].gloss);
  return out;
}

RowMatrix pack_valid(const LayerSlice& s, std::vector<Eigen::Index>& valid) {
  valid.clear();
  for (std::size_t i = 0; i < s.mask.size(); ++i)
    if (s.mask[i]) valid.push_back(static_cast<Eigen::Index>(i));
  RowMatrix packed(static_cast<Eigen::Index>(valid.size()), static_cast<Eigen::Index>(s.dim));
  for (std::size_t i = 0; i < valid.size(); ++i) packed.row(static_cast<Eigen::Index>(i)) = s.rows.row(valid[i]);
  return packed;
}

LayerSlice unpack_valid(const LayerSlice& like, const RowMatrix& packed, const std::vector<Eigen::Index>& valid) {
  LayerSlice s = like;
  for (std::size_t i = 0; i < valid.size(); ++i) s.rows.row(valid[i]) = packed.row(static_cast<Eigen::Index>(i));
  return s;
}

void require_same_lists(const EmbeddingStore& a, const EmbeddingStore& b, bool concepts_too) {
  std::vector<std::string> la;
  std::vector<std::string> lb;
  for (const auto& l : a.languages()) la.push_back(l.code);
  for (const auto& l : b.languages()) lb.push_back(l.code);
  require(la == lb, "language list mismatch between stores");
  if (concepts_too) {
    std::vector<std::string> ca;
    std::vector<std::string> cb;
    for (const auto& c : a.concepts()) ca.push_back(normalize_gloss(c.gloss));
    for (const auto& c : b.concepts()) cb.push_back(normalize_gloss(c.gloss));
    require(ca == cb, "concept list mismatch between stores");
  }
}

std::size_t find_concept(const EmbeddingStore& store, std::string_view gloss) {
  auto c = store.concept_index(gloss);
  if (!c) fail("missing concept '" + std::string(gloss) + "'");
  return *c;
}

}  // namespace

json correction_json(const CorrectionConfig& c) {
  return {{"k", c.k}, {"apply_global_mean", c.apply_global_mean}, {"center_languages", c.center_languages}};
}

json store_provenance(const EmbeddingStore& store) {
  return {{"tensor_crc64", hex64(tensor_checksum(store))},
          {"condition", to_string(store.condition())},
          {"n_concepts", store.n_concepts()},
          {"n_languages", store.n_languages()},
          {"n_layers", store.n_layers()},
          {"dim", store.dim()}};
}

std::vector<std::optional<double>> convergence_scores(const LayerSlice& slice) {
  std::vector<std::optional<double>> out(slice.n_concepts);
  parallel_for(slice.n_concepts, [&](std::size_t c) {
    if (slice.valid_languages(c) >= 2) out[c] = convergence_score(slice, c);
  });
  return out;
}

ConceptualStoreStats conceptual_store_stats(const LayerSlice& slice) {
  ConceptualStoreStats st;
  std::vector<std::vector<double>> sums;
  std::vector<double> counts;
  for (std::size_t c = 0; c < slice.n_concepts; ++c) {
    std::vector<double> s(slice.dim, 0.0);
    std::size_t n = 0;
    for (std::size_t l = 0; l < slice.n_languages; ++l) {
      if (!slice.present(c, l)) continue;
      const auto r = slice.row(c, l);
      const double norm = std::sqrt(dot(r, r));
      if (!(norm > 0.0)) {
        ++st.zero_vectors;
        continue;
      }
      for (std::size_t d = 0; d < slice.dim; ++d) s[d] += r[d] / norm;
      ++n;
    }
    if (n < 2) continue;
    st.concepts.push_back(c);
    sums.push_back(std::move(s));
    counts.push_back(static_cast<double>(n));
  }
  const std::size_t m = st.concepts.size();
  require(m >= 2, "conceptual store metric needs at least 2 concepts with 2 valid languages");

  // Mean pairwise cosine over a set of unit vectors follows from their sum:
  // within = 1 - (|S|^2 - n) / (n (n - 1)), between = 1 - S_a . S_b / (n_a n_b).
  st.within.resize(m);
  st.between.assign(m * m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    const double n = counts[i];
    st.within[i] = std::clamp(1.0 - (dot(sums[i], sums[i]) - n) / (n * (n - 1.0)), 0.0, 2.0);
    for (std::size_t j = i + 1; j < m; ++j) {
      const double b = std::clamp(1.0 - dot(sums[i], sums[j]) / (n * counts[j]), 0.0, 2.0);
      st.between[i * m + j] = st.between[j * m + i] = b;
    }
  }
  std::vector<std::size_t> all(m);
  std::iota(all.begin(), all.end(), 0);
  KahanSum w;
  for (double x : st.within) w.add(x);
  st.within_mean = w.value() / static_cast<double>(m);
  KahanSum b;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j) b.add(st.between[i * m + j]);
  st.between_mean = b.value() / static_cast<double>(m * (m - 1) / 2);
  st.ratio = st.ratio_for(all);
  return st;
}

double ConceptualStoreStats::ratio_for(std::span<const std::size_t> sample) const {
  const std::size_t m = concepts.size();
  KahanSum w;
  for (std::size_t i : sample) w.add(within[i]);
  const double within_mean_s = w.value() / static_cast<double>(sample.size());
  KahanSum b;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < sample.size(); ++i)
    for (std::size_t j = i + 1; j < sample.size(); ++j) {
      if (sample[i] == sample[j]) continue;
      b.add(between[sample[i] * m + sample[j]]);
      ++pairs;
    }
  if (pairs == 0) return kNaN;
  if (within_mean_s <= kZeroWithinTolerance) return kInf;
  return (b.value() / static_cast<double>(pairs)) / within_mean_s;
}

std::optional<Correlation> rank_agreement(std::span<const double> x, std::span<const double> y, std::string* note) {
  if (x.size() == y.size() && x.size() >= 3 && average_ranks(x) == average_ranks(y)) {
    const auto r = average_ranks(x);
    const bool constant = std::all_of(r.begin(), r.end(), [&](double v) { return v == r.front(); });
    if (constant) {
      if (note) *note = "identical constant rankings; rho defined as 1";
      return Correlation{1.0, kNaN};
    }
  }
  try {
    return spearman(x, y);
  } catch (const Error& e) {
    if (note) *note = e.what();
    return std::nullopt;
  }
}

RowMatrix concept_centroids(const LayerSlice& slice) {
  RowMatrix out = RowMatrix::Zero(static_cast<Eigen::Index>(slice.n_concepts), static_cast<Eigen::Index>(slice.dim));
  for (std::size_t c = 0; c < slice.n_concepts; ++c) {
    std::vector<KahanSum> acc(slice.dim);
    std::size_t n = 0;
    for (std::size_t l = 0; l < slice.n_languages; ++l) {
      if (!slice.present(c, l)) continue;
      const auto r = slice.row(c, l);
      for (std::size_t d = 0; d < slice.dim; ++d) acc[d].add(r[d]);
      ++n;
    }
    if (n == 0) continue;
    for (std::size_t d = 0; d < slice.dim; ++d)
      out(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(d)) = acc[d].value() / static_cast<double>(n);
  }
  return out;
}

std::vector<std::pair<double, double>> convex_hull(std::vector<std::pair<double, double>> pts) {
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;
  auto cross = [](const auto& o, const auto& a, const auto& b) {
    return (a.first - o.first) * (b.second - o.second) - (a.second - o.second) * (b.first - o.first);
  };
  std::vector<std::pair<double, double>> hull(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i > 0; --i) {
    while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i - 1]) <= 0) --k;
    hull[k++] = pts[i - 1];
  }
  hull.resize(k - 1);
  return hull;
}

// ---------------------------------------------------------------------------

ExperimentReport exp_convergence_ranking(const EmbeddingStore& store, std::size_t layer,
                                         const CorrectionConfig& correction) {
  ExperimentReport rep = make_report("convergence", store, layer, correction);
  const LayerSlice slice = corrected_slice(store, layer, correction);
  const auto scores = convergence_scores(slice);
  const auto r = ranked(scores);
  require(!r.empty(), "no concept has 2 or more valid languages");
  const auto v = values_of(r);

  json ranking = json::array();
  for (std::size_t i = 0; i < r.size(); ++i) {
    const auto& c = store.concepts()[r[i].concept_index];
    ranking.push_back({{"rank", i + 1}, {"concept", c.gloss}, {"category", c.category}, {"score", r[i].score}});
  }
  rep.results = {{"n_scored", r.size()},
                 {"mean", mean(v)},
                 {"sd", sample_sd(v)},
                 {"min", r.back().score},
                 {"max", r.front().score},
                 {"top", top_bottom(store, r, 10, true)},
                 {"bottom", top_bottom(store, r, 10, false)},
                 {"excluded", excluded_glosses(store, scores)}};
  rep.figure_data = {{"ranking", ranking}};
  return rep;
}

double orthographic_similarity(std::string_view a, std::string_view b) {
  return levenshtein_similarity(orthographic_normalize(a), orthographic_normalize(b));
}

double phonetic_similarity(std::string_view a, std::string_view b, const SurfaceSimilarityConfig& config) {
  return levenshtein_similarity(phonetic_normalize(a, config), phonetic_normalize(b, config));
}

ExperimentReport exp_surface_regression(const EmbeddingStore& store, std::size_t layer,
                                        const CorrectionConfig& correction, const WordFormTable& forms,
                                        const SurfaceSimilarityConfig& config) {
  ExperimentReport rep = make_report("surface", store, layer, correction);
  rep.config["scripts"] = config.scripts;
  rep.config["strip_diacritics"] = config.strip_diacritics;
  json map = json::object();
  for (const auto& [from, to] : config.phonetic_map.table()) map[utf8_encode({from})] = utf8_encode({to});
  rep.config["phonetic_map"] = map;

  const LayerSlice slice = corrected_slice(store, layer, correction);
  const auto scores = convergence_scores(slice);

  std::vector<double> conv;
  std::vector<double> orth;
  std::vector<double> phon;
  json scatter = json::array();
  json excluded = json::array();
  for (std::size_t c = 0; c < store.n_concepts(); ++c) {
    const auto& gloss = store.concepts()[c].gloss;
    std::vector<const std::string*> fs;
    for (std::size_t l = 0; l < store.n_languages(); ++l) {
      const auto& lang = store.languages()[l];
      if (!store.present(c, l) || !config.scripts.contains(lang.script)) continue;
      if (const std::string* f = forms.find(gloss, lang.code)) fs.push_back(f);
    }
    if (!scores[c] || fs.size() < 2) {
      excluded.push_back(gloss);
      continue;
    }
    KahanSum so;
    KahanSum sp;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < fs.size(); ++i)
      for (std::size_t j = i + 1; j < fs.size(); ++j) {
        so.add(orthographic_similarity(*fs[i], *fs[j]));
        sp.add(phonetic_similarity(*fs[i], *fs[j], config));
        ++pairs;
      }
    const double o = so.value() / static_cast<double>(pairs);
    const double p = sp.value() / static_cast<double>(pairs);
    conv.push_back(*scores[c]);
    orth.push_back(o);
    phon.push_back(p);
    scatter.push_back({{"concept", gloss},
                       {"category", store.concepts()[c].category},
                       {"convergence", *scores[c]},
                       {"orthographic", o},
                       {"phonetic", p},
                       {"n_pairs", pairs}});
  }
  require(!conv.empty(), "no comparable-script pairs");
  require(conv.size() >= 3, "fewer than 3 concepts with comparable-script word forms");

  const OlsFit fo = ols_r2(orth, conv);
  const OlsFit fp = ols_r2(phon, conv);
  auto fit_json = [](const OlsFit& f) { return json{{"slope", f.slope}, {"intercept", f.intercept}, {"r2", f.r2}}; };
  rep.results = {{"n_concepts", conv.size()},
                 {"orthographic", fit_json(fo)},
                 {"phonetic", fit_json(fp)},
                 {"r2_orthographic", fo.r2},
                 {"r2_phonetic", fp.r2},
                 {"excluded", excluded}};
  rep.figure_data = {{"scatter", scatter}};
  return rep;
}

ExperimentReport exp_category_summary(const EmbeddingStore& store, std::size_t layer,
                                      const CorrectionConfig& correction) {
  ExperimentReport rep = make_report("categories", store, layer, correction);
  const LayerSlice slice = corrected_slice(store, layer, correction);
  const auto scores = convergence_scores(slice);
  const auto r = ranked(scores);
  require(!r.empty(), "no concept has 2 or more valid languages");

  std::map<std::string, std::vector<Scored>> groups;
  for (const auto& s : r) groups[store.concepts()[s.concept_index].category].push_back(s);

  struct Group {
    std::string name;
    double mean;
    double sd;
    std::vector<Scored> members;
  };
  std::vector<Group> gs;
  for (auto& [name, members] : groups) {
    const auto v = values_of(members);
    gs.push_back({name, mean(v), sample_sd(v), members});
  }
  std::stable_sort(gs.begin(), gs.end(), [](const Group& a, const Group& b) { return a.mean > b.mean; });

  json cats = json::array();
  json cat_rows = json::array();
  json concept_rows = json::array();
  for (const auto& g : gs) {
    cats.push_back({{"category", g.name},
                    {"mean", g.mean},
                    {"sd", g.sd},
                    {"n", g.members.size()},
                    {"concepts", scored_rows(store, g.members)}});
    cat_rows.push_back({{"category", g.name}, {"mean", g.mean}, {"sd", g.sd}, {"n", g.members.size()}});
    for (const auto& m : g.members)
      concept_rows.push_back({{"category", g.name}, {"concept", store.concepts()[m.concept_index].gloss}, {"score", m.score}});
  }
  rep.results = {{"overall_mean", mean(values_of(r))},
                 {"categories", cats},
                 {"excluded", excluded_glosses(store, scores)}};
  rep.figure_data = {{"categories", cat_rows}, {"concepts", concept_rows}};
  return rep;
}

ExperimentReport exp_group_comparison(const EmbeddingStore& store_a, const EmbeddingStore& store_b, std::size_t layer,
                                      const CorrectionConfig& correction, Alternative alternative) {
  require_same_lists(store_a, store_b, false);
  require(layer < store_b.n_layers(), "layer position out of range for comparison store");
  ExperimentReport rep = make_report("compare", store_a, layer, correction);
  rep.config["alternative"] = to_string(alternative);
  rep.provenance["comparison_store"] = store_provenance(store_b);

  const auto ra = ranked(convergence_scores(corrected_slice(store_a, layer, correction)));
  const auto rb = ranked(convergence_scores(corrected_slice(store_b, layer, correction)));
  const auto va = values_of(ra);
  const auto vb = values_of(rb);
  require(!va.empty() && !vb.empty(), "mann_whitney_u: empty group");

  TestResult test = mann_whitney_u(va, vb, alternative);
  try {
    test.effect_size = cohens_d(va, vb);
  } catch (const Error& e) {
    rep.diagnostics.push_back(std::string("cohens_d: ") + e.what());
  }
  rep.results = {{"test", to_json(test)},
                 {"cohens_d", test.effect_size ? json(*test.effect_size) : json(nullptr)},
                 {"mean_a", mean(va)},
                 {"mean_b", mean(vb)},
                 {"n_a", va.size()},
                 {"n_b", vb.size()}};
  json rows = json::array();
  for (const auto& s : ra) rows.push_back({{"group", "a"}, {"concept", store_a.concepts()[s.concept_index].gloss}, {"score", s.score}});
  for (const auto& s : rb) rows.push_back({{"group", "b"}, {"concept", store_b.concepts()[s.concept_index].gloss}, {"score", s.score}});
  rep.figure_data = {{"scores", rows}};
  return rep;
}

ExperimentReport exp_isotropy_validation(const EmbeddingStore& store, std::size_t layer,
                                         const std::vector<std::size_t>& k_values) {
  require(!k_values.empty(), "k_values must not be empty");
  ExperimentReport rep = make_report("isotropy", store, layer, CorrectionConfig{});
  rep.config.erase("correction");
  rep.config["k_values"] = k_values;
  const std::size_t reference_k =
      std::find(k_values.begin(), k_values.end(), 3) != k_values.end() ? 3 : k_values.front();
  rep.config["reference_k"] = reference_k;

  const LayerSlice raw = raw_slice(store, layer);
  std::vector<Eigen::Index> valid;
  const RowMatrix packed = pack_valid(raw, valid);
  const std::size_t k_max = *std::max_element(k_values.begin(), k_values.end());
  const AbttBasis full = fit_abtt(packed, k_max);

  auto scores_for = [&](std::size_t k, bool subtract_mean) {
    AbttBasis b{full.mean, full.components.topRows(static_cast<Eigen::Index>(k))};
    return convergence_scores(unpack_valid(raw, apply_abtt(packed, b, subtract_mean), valid));
  };

  std::vector<std::pair<std::string, std::vector<std::optional<double>>>> regimes;
  regimes.emplace_back("raw", scores_for(0, false));
  std::vector<std::size_t> ks;
  for (std::size_t k : k_values) {
    if (std::find(ks.begin(), ks.end(), k) != ks.end()) continue;
    ks.push_back(k);
    regimes.emplace_back("k=" + std::to_string(k), scores_for(k, true));
  }

  // concepts scored in every regime
  std::vector<std::size_t> common;
  for (std::size_t c = 0; c < store.n_concepts(); ++c)
    if (std::all_of(regimes.begin(), regimes.end(), [&](const auto& r) { return r.second[c].has_value(); }))
      common.push_back(c);
  auto vec_of = [&](const std::vector<std::optional<double>>& s) {
    std::vector<double> v;
    for (std::size_t c : common) v.push_back(*s[c]);
    return v;
  };
  const auto& ref_scores = regimes[1 + static_cast<std::size_t>(
                                           std::find(ks.begin(), ks.end(), reference_k) - ks.begin())]
                               .second;
  const auto ref = vec_of(ref_scores);

  auto agreement_json = [&](const std::vector<double>& v, const std::string& what) {
    std::string note;
    const auto a = rank_agreement(v, ref, &note);
    if (!note.empty()) rep.diagnostics.push_back(what + ": " + note);
    if (!a) return json{{"rho", nullptr}, {"p_value", nullptr}};
    return json{{"rho", a->rho}, {"p_value", number_or_sentinel(a->p_value)}};
  };

  json sweep = json::array();
  json sweep_rows = json::array();
  for (std::size_t i = 0; i < ks.size(); ++i) {
    const json a = agreement_json(vec_of(regimes[i + 1].second), "k=" + std::to_string(ks[i]));
    sweep.push_back({{"k", ks[i]}, {"rho", a["rho"]}, {"p_value", a["p_value"]}});
    sweep_rows.push_back({{"k", ks[i]}, {"rho", a["rho"]}});
  }
  const json raw_vs = agreement_json(vec_of(regimes[0].second), "raw");

  json lists = json::object();
  for (const auto& [name, s] : regimes) {
    const auto r = ranked(s);
    lists[name] = {{"top", top_bottom(store, r, 10, true)}, {"bottom", top_bottom(store, r, 10, false)}};
  }
  json scatter = json::array();
  const auto raw_v = vec_of(regimes[0].second);
  for (std::size_t i = 0; i < common.size(); ++i)
    scatter.push_back({{"concept", store.concepts()[common[i]].gloss},
                       {"category", store.concepts()[common[i]].category},
                       {"raw", raw_v[i]},
                       {"corrected", ref[i]}});

  rep.results = {{"n_concepts", common.size()},
                 {"k_sweep", sweep},
                 {"raw_vs_corrected", raw_vs},
                 {"regimes", lists}};
  rep.figure_data = {{"k_sweep", sweep_rows}, {"raw_vs_corrected", scatter}};
  return rep;
}

ExperimentReport exp_carrier_robustness(const EmbeddingStore& store_ctx, const EmbeddingStore& store_dectx,
                                        std::size_t layer, const CorrectionConfig& correction) {
  require_same_lists(store_ctx, store_dectx, true);
  require(store_ctx.condition() == Condition::contextual, "condition mismatch: first store must be contextual");
  require(store_dectx.condition() == Condition::decontextual,
          "condition mismatch: second store must be decontextual");
  require(layer < store_dectx.n_layers(), "layer position out of range for decontextual store");
  ExperimentReport rep = make_report("carrier", store_ctx, layer, correction);
  rep.provenance["decontextual_store"] = store_provenance(store_dectx);

  const auto sc = convergence_scores(corrected_slice(store_ctx, layer, correction));
  const auto sd = convergence_scores(corrected_slice(store_dectx, layer, correction));
  std::vector<std::size_t> common;
  std::vector<double> a;
  std::vector<double> b;
  for (std::size_t c = 0; c < sc.size(); ++c)
    if (sc[c] && sd[c]) {
      common.push_back(c);
      a.push_back(*sc[c]);
      b.push_back(*sd[c]);
    }
  require(common.size() >= 3, "fewer than 3 concepts scored under both conditions");

  std::string note;
  const auto rho = rank_agreement(a, b, &note);
  if (!note.empty()) rep.diagnostics.push_back("spearman: " + note);
  KahanSum abs_diff;
  for (std::size_t i = 0; i < a.size(); ++i) abs_diff.add(std::fabs(a[i] - b[i]));

  json paired = nullptr;
  bool exact_equality = false;
  try {
    paired = to_json(paired_t(a, b));
  } catch (const Error& e) {
    exact_equality = std::string(e.what()).find("zero difference variance") != std::string::npos;
    rep.diagnostics.push_back(e.what());
  }

  const auto rank_a = average_ranks(a);
  const auto rank_b = average_ranks(b);
  std::vector<std::size_t> order(common.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return a[i] > a[j]; });
  json slope = json::array();
  const double n = static_cast<double>(common.size());
  for (std::size_t i = 0; i < std::min<std::size_t>(20, order.size()); ++i) {
    const std::size_t k = order[i];
    slope.push_back({{"concept", store_ctx.concepts()[common[k]].gloss},
                     {"contextual", a[k]},
                     {"decontextual", b[k]},
                     {"rank_contextual", n + 1.0 - rank_a[k]},
                     {"rank_decontextual", n + 1.0 - rank_b[k]}});
  }
  rep.results = {{"n_concepts", common.size()},
                 {"spearman_rho", rho ? json(rho->rho) : json(nullptr)},
                 {"spearman_p", rho ? number_or_sentinel(rho->p_value) : json(nullptr)},
                 {"mean_abs_diff", abs_diff.value() / n},
                 {"paired_t", paired},
                 {"exact_equality", exact_equality}};
  rep.figure_data = {{"slopegraph", slope}};
  return rep;
}

ExperimentReport exp_layerwise(const EmbeddingStore& store, const CorrectionConfig& correction) {
  require(store.n_layers() >= 2, "layer-wise analysis needs at least 2 layers");
  ExperimentReport rep;
  rep.experiment = "layers";
  rep.config = {{"layers", store.layers()}, {"correction", correction_json(correction)}};
  rep.provenance = {{"store", store_provenance(store)}};

  CorrectionConfig base = correction;
  base.center_languages = false;
  std::vector<double> mean_conv;
  std::vector<double> raw_ratio;
  std::vector<double> centered_ratio;
  json heat = json::array();
  json traj = json::array();
  for (std::size_t p = 0; p < store.n_layers(); ++p) {
    const LayerSlice s = corrected_slice(store, p, base);
    const auto scores = convergence_scores(s);
    const auto r = ranked(scores);
    require(!r.empty(), "no concept has 2 or more valid languages");
    mean_conv.push_back(mean(values_of(r)));
    raw_ratio.push_back(conceptual_store_stats(s).ratio);
    centered_ratio.push_back(conceptual_store_stats(corrected_slice(s, CorrectionConfig{0, false, true})).ratio);
    for (const auto& sc : r)
      heat.push_back({{"concept", store.concepts()[sc.concept_index].gloss}, {"layer", store.layers()[p]}, {"score", sc.score}});
    traj.push_back({{"layer", store.layers()[p]},
                    {"mean_convergence", mean_conv.back()},
                    {"raw_ratio", number_or_sentinel(raw_ratio.back())},
                    {"centered_ratio", number_or_sentinel(centered_ratio.back())}});
  }

  std::optional<std::size_t> transition;
  double best = -kInf;
  json diffs = json::array();
  for (std::size_t i = 0; i + 1 < centered_ratio.size(); ++i) {
    const double d = centered_ratio[i + 1] - centered_ratio[i];
    diffs.push_back(number_or_sentinel(d));
    if (std::isfinite(d) && d > best) {
      best = d;
      transition = i + 1;
    }
  }
  if (!transition) rep.diagnostics.push_back("no finite first difference of the centered ratio");

  rep.results = {{"mean_convergence", mean_conv},
                 {"raw_ratio", json::array()},
                 {"centered_ratio", json::array()},
                 {"centered_ratio_first_difference", diffs},
                 {"transition_layer", transition ? json(store.layers()[*transition]) : json(nullptr)}};
  for (std::size_t p = 0; p < store.n_layers(); ++p) {
    rep.results["raw_ratio"].push_back(number_or_sentinel(raw_ratio[p]));
    rep.results["centered_ratio"].push_back(number_or_sentinel(centered_ratio[p]));
  }
  rep.figure_data = {{"trajectory", traj}, {"heatmap", heat}};
  return rep;
}

ExperimentReport exp_phylogenetic(const EmbeddingStore& store, std::size_t layer, const CorrectionConfig& correction,
                                  const DistanceMatrix& asjp, const PhyloConfig& config) {
  ExperimentReport rep = make_report("phylo", store, layer, correction);
  rep.config["n_perm"] = config.n_perm;
  rep.config["seed"] = config.seed;
  rep.config["method"] = config.method == MantelMethod::spearman ? "spearman" : "pearson";

  // correction is fit on the full layer, then restricted to the shared languages
  const Aligned aligned = align_languages(store, asjp, config.mapping);
  const std::size_t n = aligned.matrix.size();
  require(n >= 4, "intersection has fewer than 4 languages");

  const DistanceMatrix full = pairwise_language_distance(corrected_slice(store, layer, correction), store.languages());
  DistanceMatrix emb = DistanceMatrix::zeros(aligned.matrix.labels);
  std::vector<std::size_t> idx;
  for (const auto& code : aligned.matrix.labels) idx.push_back(*store.language_index(code));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) emb.at(i, j) = full.at(idx[i], idx[j]);

  const TestResult test = mantel(emb, aligned.matrix, config.n_perm, config.seed, config.method);
  const Dendrogram tree = upgma_cluster(emb);

  json merges = json::array();
  for (const auto& m : tree.merges) merges.push_back({{"a", m.a}, {"b", m.b}, {"height", m.height}, {"size", m.size}});
  json order = json::array();
  for (std::size_t leaf : tree.leaf_order()) order.push_back(emb.labels[leaf]);

  auto family_of = [&](std::size_t i) { return store.languages()[idx[i]].family; };
  auto sub_of = [&](std::size_t i) -> const std::string* {
    auto it = config.subfamilies.find(emb.labels[i]);
    return it == config.subfamilies.end() ? nullptr : &it->second;
  };
  std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> tiers;
  json scatter = json::array();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      std::string tier = "cross_family";
      if (family_of(i) == family_of(j)) {
        const std::string* si = sub_of(i);
        const std::string* sj = sub_of(j);
        tier = (si && sj && *si == *sj) ? "same_subfamily" : "cross_branch";
      }
      tiers[tier].first.push_back(aligned.matrix.at(i, j));
      tiers[tier].second.push_back(emb.at(i, j));
      scatter.push_back({{"language_a", emb.labels[i]},
                         {"language_b", emb.labels[j]},
                         {"asjp_distance", aligned.matrix.at(i, j)},
                         {"embedding_distance", emb.at(i, j)},
                         {"tier", tier}});
    }
  json tier_json = json::object();
  for (const auto& [name, xy] : tiers) {
    json t = {{"n_pairs", xy.first.size()}, {"spearman_rho", nullptr}};
    if (xy.first.size() >= 3) {
      try {
        t["spearman_rho"] = spearman(xy.first, xy.second).rho;
      } catch (const Error& e) {
        rep.diagnostics.push_back("tier " + name + ": " + e.what());
      }
    }
    tier_json[name] = t;
  }

  rep.results = {{"n_languages", n},
                 {"mantel", to_json(test)},
                 {"languages", emb.labels},
                 {"dendrogram", {{"merges", merges}, {"leaf_order", order}}},
                 {"tiers", tier_json}};
  rep.figure_data = {{"scatter", scatter}};
  return rep;
}

ExperimentReport exp_colexification(const EmbeddingStore& store, std::size_t layer, const CorrectionConfig& correction,
                                    const ColexEdgeList& edges, const std::vector<GlossPair>& pair_universe,
                                    const ColexConfig& config) {
  ExperimentReport rep = make_report("colex", store, layer, correction);
  rep.config["binary_threshold"] = config.binary_threshold;
  rep.config["similarity"] = config.similarity == ColexSimilarity::centroid ? "centroid" : "per_language";
  rep.config["alternative"] = "greater";

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  if (pair_universe.empty()) {
    rep.config["pair_universe"] = "all_concept_pairs";
    for (std::size_t a = 0; a < store.n_concepts(); ++a)
      for (std::size_t b = a + 1; b < store.n_concepts(); ++b) pairs.emplace_back(a, b);
  } else {
    rep.config["pair_universe"] = pair_universe.size();
    for (const auto& [a, b] : pair_universe) pairs.emplace_back(find_concept(store, a), find_concept(store, b));
  }
  require(!pairs.empty(), "pair universe is empty");

  const LayerSlice slice = corrected_slice(store, layer, correction);
  const RowMatrix centroids = concept_centroids(slice);

  std::vector<double> counts;
  std::vector<double> sims;
  std::vector<double> colexified;
  std::vector<double> control;
  json rows = json::array();
  for (const auto& [a, b] : pairs) {
    const auto& ga = store.concepts()[a].gloss;
    const auto& gb = store.concepts()[b].gloss;
    std::optional<double> sim;
    if (config.similarity == ColexSimilarity::centroid) {
      const auto ca = row_span(centroids, static_cast<Eigen::Index>(a));
      const auto cb = row_span(centroids, static_cast<Eigen::Index>(b));
      if (dot(ca, ca) > 0.0 && dot(cb, cb) > 0.0) sim = cosine_similarity(ca, cb);
    } else {
      KahanSum s;
      std::size_t n = 0;
      for (std::size_t l = 0; l < store.n_languages(); ++l) {
        if (!slice.present(a, l) || !slice.present(b, l)) continue;
        s.add(cosine_similarity(slice.row(a, l), slice.row(b, l)));
        ++n;
      }
      if (n > 0) sim = s.value() / static_cast<double>(n);
    }
    if (!sim) {
      rep.diagnostics.push_back("pair (" + ga + ", " + gb + ") has no usable vectors; excluded");
      continue;
    }
    const std::uint32_t count = edges.count(ga, gb);
    counts.push_back(count);
    sims.push_back(*sim);
    const bool is_colex = count >= config.binary_threshold;
    if (is_colex) colexified.push_back(*sim);
    if (count == 0) control.push_back(*sim);
    rows.push_back({{"concept_a", ga},
                    {"concept_b", gb},
                    {"family_count", count},
                    {"similarity", *sim},
                    {"colexified", is_colex}});
  }

  json continuous = nullptr;
  if (sims.size() >= 3) {
    try {
      const Correlation c = spearman(counts, sims);
      continuous = {{"rho", c.rho}, {"p_value", c.p_value}, {"n", sims.size()}};
    } catch (const Error& e) {
      rep.diagnostics.push_back(std::string("spearman: ") + e.what());
    }
  } else {
    rep.diagnostics.push_back("spearman: fewer than 3 pairs");
  }

  json binary = nullptr;
  if (!colexified.empty() && !control.empty()) {
    TestResult t = mann_whitney_u(colexified, control, Alternative::greater);
    try {
      t.effect_size = cohens_d(colexified, control);
    } catch (const Error& e) {
      rep.diagnostics.push_back(std::string("cohens_d: ") + e.what());
    }
    binary = to_json(t);
  } else {
    rep.diagnostics.push_back("binary split has an empty group");
  }

  rep.results = {{"n_pairs", sims.size()},
                 {"n_colexified", colexified.size()},
                 {"n_control", control.size()},
                 {"n_intermediate", sims.size() - colexified.size() - control.size()},
                 {"continuous", continuous},
                 {"binary", binary}};
  rep.figure_data = {{"scatter", rows}};
  return rep;
}

ExperimentReport exp_conceptual_store(const EmbeddingStore& store, std::size_t layer,
                                      const CorrectionConfig& correction, std::size_t n_boot, std::uint64_t seed) {
  require(store.n_concepts() >= 2 && store.n_languages() >= 2, "needs at least 2 concepts and 2 languages");
  CorrectionConfig base = correction;
  base.center_languages = false;
  ExperimentReport rep = make_report("storeratio", store, layer, base);
  rep.config["n_bootstrap"] = n_boot;
  rep.config["seed"] = seed;
  rep.config["zero_within_tolerance"] = kZeroWithinTolerance;

  const LayerSlice raw = corrected_slice(store, layer, base);
  const LayerSlice centered = corrected_slice(raw, CorrectionConfig{0, false, true});
  const ConceptualStoreStats a = conceptual_store_stats(raw);
  const ConceptualStoreStats b = conceptual_store_stats(centered);

  auto summarize = [&](const ConceptualStoreStats& st, const std::string& name) {
    json j = {{"within", st.within_mean},
              {"between", st.between_mean},
              {"ratio", number_or_sentinel(st.ratio)},
              {"n_concepts", st.concepts.size()},
              {"zero_vectors_skipped", st.zero_vectors},
              {"ci", nullptr}};
    if (std::isinf(st.ratio)) {
      rep.diagnostics.push_back(name + ": within-concept distance is zero; ratio reported as +inf");
    } else if (n_boot > 0) {
      try {
        j["ci"] = to_json(bootstrap_ci(
            st.concepts.size(), [&](std::span<const std::size_t> s) { return st.ratio_for(s); }, n_boot, 0.95, seed));
      } catch (const Error& e) {
        rep.diagnostics.push_back(name + " bootstrap: " + e.what());
      }
    }
    return j;
  };
  json ja = summarize(a, "raw");
  json jb = summarize(b, "centered");

  json factor = nullptr;
  if (std::isfinite(a.ratio) && std::isfinite(b.ratio)) {
    factor = b.ratio / a.ratio;
  } else if (std::isfinite(a.ratio)) {
    factor = "inf";
  }
  json overlap = nullptr;
  if (ja["ci"].is_object() && jb["ci"].is_object()) {
    const bool disjoint = ja["ci"]["upper"].get<double>() < jb["ci"]["lower"].get<double>() ||
                          jb["ci"]["upper"].get<double>() < ja["ci"]["lower"].get<double>();
    overlap = !disjoint;
  }
  rep.results = {{"raw", ja}, {"centered", jb}, {"improvement_factor", factor}, {"cis_overlap", overlap}};

  json rows = json::array();
  for (std::size_t i = 0; i < a.concepts.size(); ++i)
    rows.push_back({{"concept", store.concepts()[a.concepts[i]].gloss}, {"condition", "raw"}, {"within", a.within[i]}});
  for (std::size_t i = 0; i < b.concepts.size(); ++i)
    rows.push_back(
        {{"concept", store.concepts()[b.concepts[i]].gloss}, {"condition", "centered"}, {"within", b.within[i]}});
  rep.figure_data = {{"within_by_concept", rows}};
  return rep;
}

const std::vector<std::string>& basic_color_terms() {
  static const std::vector<std::string> terms{"white", "black",  "red",    "green", "yellow", "blue",
                                              "brown", "purple", "pink",   "orange", "grey"};
  return terms;
}

ExperimentReport exp_color_circle(const EmbeddingStore& color_store, std::size_t layer,
                                  const CorrectionConfig& correction, std::size_t n_components) {
  require(n_components == 2 || n_components == 3, "n_components must be 2 or 3");
  ExperimentReport rep = make_report("colors", color_store, layer, correction);
  rep.config["n_components"] = n_components;

  std::vector<std::size_t> idx;
  for (const auto& term : basic_color_terms()) {
    auto c = color_store.concept_index(term);
    if (!c && term == "grey") c = color_store.concept_index("gray");
    if (!c) fail("missing color gloss '" + term + "'");
    idx.push_back(*c);
  }
  const LayerSlice slice = corrected_slice(color_store, layer, correction);
  const RowMatrix all_centroids = concept_centroids(slice);
  RowMatrix centroids(static_cast<Eigen::Index>(idx.size()), all_centroids.cols());
  for (std::size_t i = 0; i < idx.size(); ++i)
    centroids.row(static_cast<Eigen::Index>(i)) = all_centroids.row(static_cast<Eigen::Index>(idx[i]));

  const PcaResult pca = pca_project(centroids, n_components);

  json centroid_rows = json::array();
  json point_rows = json::array();
  json hull_rows = json::array();
  for (std::size_t i = 0; i < idx.size(); ++i) {
    const std::string& term = basic_color_terms()[i];
    json row = {{"concept", term}};
    for (std::size_t k = 0; k < n_components; ++k)
      row["pc" + std::to_string(k + 1)] = pca.projected(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k));
    centroid_rows.push_back(row);

    std::vector<std::pair<double, double>> pts;
    for (std::size_t l = 0; l < color_store.n_languages(); ++l) {
      if (!slice.present(idx[i], l)) continue;
      const auto r = slice.row(idx[i], l);
      RowMatrix x = Eigen::Map<const RowMatrix>(r.data(), 1, static_cast<Eigen::Index>(r.size()));
      const RowMatrix p = pca.project(x);
      json pr = {{"concept", term}, {"language", color_store.languages()[l].code}};
      for (std::size_t k = 0; k < n_components; ++k) pr["pc" + std::to_string(k + 1)] = p(0, static_cast<Eigen::Index>(k));
      point_rows.push_back(pr);
      pts.emplace_back(p(0, 0), p(0, 1));
    }
    const auto hull = convex_hull(pts);
    for (std::size_t v = 0; v < hull.size(); ++v)
      hull_rows.push_back({{"concept", term}, {"vertex", v}, {"pc1", hull[v].first}, {"pc2", hull[v].second}});
  }

  rep.results = {{"explained_variance_ratio", pca.explained_variance_ratio},
                 {"centroids", centroid_rows},
                 {"achromatic_component", nullptr}};
  if (n_components == 3) {
    const std::set<std::string> achromatic{"white", "black", "grey"};
    json gaps = json::array();
    std::size_t best = 0;
    double best_gap = -1.0;
    for (std::size_t k = 0; k < 3; ++k) {
      std::vector<double> ach;
      std::vector<double> chrom;
      std::vector<double> all;
      for (std::size_t i = 0; i < idx.size(); ++i) {
        const double v = pca.projected(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k));
        (achromatic.contains(basic_color_terms()[i]) ? ach : chrom).push_back(v);
        all.push_back(v);
      }
      const double sd = sample_sd(all);
      const double gap = sd > 0.0 ? std::fabs(mean(ach) - mean(chrom)) / sd : 0.0;
      gaps.push_back(gap);
      if (gap > best_gap) {
        best_gap = gap;
        best = k;
      }
    }
    rep.results["achromatic_gaps"] = gaps;
    rep.results["achromatic_component"] = best + 1;
  }
  rep.figure_data = {{"centroids", centroid_rows}, {"points", point_rows}, {"hulls", hull_rows}};
  return rep;
}

ExperimentReport exp_offset_invariance(const EmbeddingStore& store, std::size_t layer,
                                       const CorrectionConfig& correction, const std::vector<GlossPair>& pairs) {
  require(!pairs.empty(), "no offset pairs given");
  ExperimentReport rep = make_report("offsets", store, layer, correction);
  json pair_cfg = json::array();
  for (const auto& [a, b] : pairs) pair_cfg.push_back({a, b});
  rep.config["pairs"] = pair_cfg;

  const LayerSlice slice = corrected_slice(store, layer, correction);
  json per_pair = json::array();
  json bar_rows = json::array();
  json family_rows = json::array();
  json excluded = json::array();
  std::vector<double> consistencies;
  std::optional<std::pair<std::string, double>> best;

  for (const auto& [ga, gb] : pairs) {
    const std::size_t a = find_concept(store, ga);
    const std::size_t b = find_concept(store, gb);
    require(a != b, "offset pair uses the same concept twice: " + ga);
    const std::string name = store.concepts()[a].gloss + "-" + store.concepts()[b].gloss;

    std::vector<std::size_t> langs;
    for (std::size_t l = 0; l < store.n_languages(); ++l)
      if (slice.present(a, l) && slice.present(b, l)) langs.push_back(l);
    require(langs.size() >= 2, "pair " + name + " has fewer than 2 shared languages");

    std::vector<std::vector<double>> offsets;
    std::vector<KahanSum> acc(slice.dim);
    double norm_sum = 0.0;
    for (std::size_t l : langs) {
      const auto ra = slice.row(a, l);
      const auto rb = slice.row(b, l);
      std::vector<double> o(slice.dim);
      for (std::size_t d = 0; d < slice.dim; ++d) {
        o[d] = ra[d] - rb[d];
        acc[d].add(o[d]);
      }
      norm_sum += std::sqrt(dot(o, o));
      offsets.push_back(std::move(o));
    }
    std::vector<double> centroid(slice.dim);
    for (std::size_t d = 0; d < slice.dim; ++d) centroid[d] = acc[d].value() / static_cast<double>(langs.size());
    const double cn = std::sqrt(dot(centroid, centroid));
    if (!(cn > 1e-12 * (norm_sum / static_cast<double>(langs.size())))) {
      rep.diagnostics.push_back("pair " + name + ": degenerate centroid; excluded");
      excluded.push_back(name);
      continue;
    }

    KahanSum total;
    std::size_t used = 0;
    std::map<std::string, std::pair<KahanSum, std::size_t>> by_family;
    for (std::size_t i = 0; i < langs.size(); ++i) {
      if (!(dot(offsets[i], offsets[i]) > 0.0)) {
        rep.diagnostics.push_back("pair " + name + ": zero offset in " + store.languages()[langs[i]].code +
                                  "; skipped");
        continue;
      }
      const double c = cosine_similarity(offsets[i], centroid);
      total.add(c);
      ++used;
      auto& f = by_family[store.languages()[langs[i]].family];
      f.first.add(c);
      ++f.second;
    }
    if (used == 0) {
      excluded.push_back(name);
      continue;
    }
    const double consistency = total.value() / static_cast<double>(used);
    consistencies.push_back(consistency);
    if (!best || consistency > best->second) best = {name, consistency};

    json fam = json::object();
    for (const auto& [family, fs] : by_family) {
      const double v = fs.first.value() / static_cast<double>(fs.second);
      fam[family] = v;
      family_rows.push_back({{"pair", name}, {"family", family}, {"consistency", v}, {"n_languages", fs.second}});
    }
    per_pair.push_back({{"pair", name}, {"consistency", consistency}, {"n_languages", used}, {"by_family", fam}});
    bar_rows.push_back({{"pair", name}, {"consistency", consistency}});
  }
  require(!consistencies.empty(), "every offset pair was excluded");

  rep.results = {{"pairs", per_pair},
                 {"mean_consistency", mean(consistencies)},
                 {"min_consistency", *std::min_element(consistencies.begin(), consistencies.end())},
                 {"max_consistency", *std::max_element(consistencies.begin(), consistencies.end())},
                 {"best_pair", best->first},
                 {"excluded", excluded}};
  rep.figure_data = {{"consistency", bar_rows}, {"by_family", family_rows}};
  return rep;
}

ExperimentReport exp_concept_map(const EmbeddingStore& store, std::size_t layer, const CorrectionConfig& correction) {
  ExperimentReport rep = make_report("conceptmap", store, layer, correction);
  const LayerSlice slice = corrected_slice(store, layer, correction);

  std::vector<std::size_t> used;
  for (std::size_t c = 0; c < store.n_concepts(); ++c)
    if (slice.valid_languages(c) > 0) used.push_back(c);
  require(used.size() >= 2, "concept map needs at least 2 concepts with valid vectors");
  const std::size_t n_components = used.size() >= 3 ? 2 : 1;
  rep.config["n_components"] = n_components;
  if (n_components == 1) rep.diagnostics.push_back("only 2 concepts; PCA reduced to 1 component");

  const RowMatrix all = concept_centroids(slice);
  RowMatrix centroids(static_cast<Eigen::Index>(used.size()), all.cols());
  for (std::size_t i = 0; i < used.size(); ++i)
    centroids.row(static_cast<Eigen::Index>(i)) = all.row(static_cast<Eigen::Index>(used[i]));
  const PcaResult pca = pca_project(centroids, n_components);

  auto coords = [&](const RowMatrix& p, Eigen::Index r, json& row) {
    row["pc1"] = p(r, 0);
    row["pc2"] = n_components > 1 ? p(r, 1) : 0.0;
  };

  json centroid_rows = json::array();
  std::map<std::string, std::vector<std::pair<double, double>>> by_category;
  for (std::size_t i = 0; i < used.size(); ++i) {
    const auto& c = store.concepts()[used[i]];
    json row = {{"concept", c.gloss}, {"category", c.category}};
    coords(pca.projected, static_cast<Eigen::Index>(i), row);
    by_category[c.category].emplace_back(row["pc1"].get<double>(), row["pc2"].get<double>());
    centroid_rows.push_back(row);
  }

  json family_rows = json::array();
  std::set<std::string> families;
  for (const auto& l : store.languages()) families.insert(l.family);
  for (std::size_t i = 0; i < used.size(); ++i) {
    const std::size_t c = used[i];
    for (const auto& family : families) {
      std::vector<KahanSum> acc(slice.dim);
      std::size_t n = 0;
      for (std::size_t l = 0; l < store.n_languages(); ++l) {
        if (store.languages()[l].family != family || !slice.present(c, l)) continue;
        const auto r = slice.row(c, l);
        for (std::size_t d = 0; d < slice.dim; ++d) acc[d].add(r[d]);
        ++n;
      }
      if (n == 0) continue;
      RowMatrix x(1, static_cast<Eigen::Index>(slice.dim));
      for (std::size_t d = 0; d < slice.dim; ++d) x(0, static_cast<Eigen::Index>(d)) = acc[d].value() / static_cast<double>(n);
      const RowMatrix p = pca.project(x);
      json row = {{"concept", store.concepts()[c].gloss},
                  {"category", store.concepts()[c].category},
                  {"family", family},
                  {"n_languages", n}};
      coords(p, 0, row);
      family_rows.push_back(row);
    }
  }

  json hull_rows = json::array();
  for (const auto& [category, pts] : by_category) {
    const auto hull = convex_hull(pts);
    for (std::size_t v = 0; v < hull.size(); ++v)
      hull_rows.push_back({{"category", category}, {"vertex", v}, {"pc1", hull[v].first}, {"pc2", hull[v].second}});
  }

  rep.results = {{"n_concepts", used.size()},
                 {"explained_variance_ratio", pca.explained_variance_ratio},
                 {"centroids", centroid_rows}};
  rep.figure_data = {{"centroids", centroid_rows}, {"family_centroids", family_rows}, {"category_hulls", hull_rows}};
  return rep;
}

}  // namespace lexgeo
