// Acceptance suite: one PASS/FAIL line per criterion, detail lines indented.
// Usage: lexgeo_acceptance [path/to/lexgeo [report.txt]]
// Exit status is non-zero when a criterion fails outside the documented known-red lines.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "lexgeo/cli.hpp"
#include "lexgeo/error.hpp"
#include "lexgeo/experiments.hpp"
#include "lexgeo/geometry.hpp"
#include "lexgeo/lgeo.hpp"
#include "lexgeo/parallel.hpp"
#include "lexgeo/stats.hpp"
#include "lexgeo/synth.hpp"
#include "lexgeo/text.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace lexgeo;
namespace fs = std::filesystem;

namespace {

// Tolerances and thresholds.
constexpr double kOracleRel = 1e-9;
constexpr int kOracleInstances = 200;
constexpr double kMwuApproxAbs = 0.05;
constexpr double kOracleSeconds = 30.0;
constexpr double kRatioImprovement = 1.1;
constexpr double kTreeRho = 0.5;
constexpr double kTreeP = 0.001;
constexpr double kColexP = 0.01;
constexpr double kColexD = 0.8;
constexpr double kOffsetConsistency = 0.95;
constexpr double kPlantedSeconds = 60.0;
constexpr double kSweepRho = 0.9;
constexpr double kMantelSeconds = 1.0;
constexpr double kPipelineSeconds = 60.0;

// Sub-checks expected to be red; each has its analysis in the decisions ledger.
const std::set<std::string> kKnownRed{"C1.mwu_normal_approx", "C3.planted_sweep"};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

struct Criterion {
  std::string id;
  std::string title;
  std::vector<std::tuple<std::string, bool, std::string>> checks;  // key, ok, detail

  void check(const std::string& key, bool ok, const std::string& detail) { checks.emplace_back(key, ok, detail); }
  void info(const std::string& detail) { checks.emplace_back("", true, detail); }

  bool ok() const {
    for (const auto& [k, ok, d] : checks)
      if (!ok) return false;
    return true;
  }
  bool unexpected_red() const {
    for (const auto& [k, ok, d] : checks)
      if (!ok && !kKnownRed.contains(id + "." + k)) return true;
    return false;
  }
  void print(std::ostream& os) const {
    os << (ok() ? "PASS " : "FAIL ") << id << " " << title << "\n";
    for (const auto& [k, ok, d] : checks) {
      if (k.empty()) {
        os << "       info  " << d << "\n";
      } else {
        const bool known = !ok && kKnownRed.contains(id + "." + k);
        os << "       " << (ok ? "ok   " : (known ? "red* " : "RED  ")) << k << ": " << d << "\n";
      }
    }
  }
};

struct MaxErr {
  double rel = 0.0;
  int n = 0;
  int bad = 0;

  void add(double got, double want) {
    ++n;
    const double scale = std::max(1e-12, std::fabs(want));
    const double e = std::fabs(got - want) / scale;
    if (std::isnan(got) != std::isnan(want) || e > kOracleRel) ++bad;
    if (!std::isnan(e)) rel = std::max(rel, e);
  }
  std::string text() const {
    return std::to_string(n) + " comparisons, max rel err " + fmt("%.2e", rel) + ", " + std::to_string(bad) +
           " over tolerance";
  }
};

void write_json(const fs::path& path, const json& j) { std::ofstream(path) << j.dump(2); }

// ---------------------------------------------------------------------------

Criterion oracle_equivalence() {
  Criterion cr{"C1", "oracle equivalence", {}};
  const auto t0 = Clock::now();
  auto alt_of = [](int a) {
    return a == 0 ? Alternative::greater : (a == 1 ? Alternative::less : Alternative::two_sided);
  };

  std::map<std::string, MaxErr> errs;
  Rng rng(1001);
  for (int it = 0; it < kOracleInstances; ++it) {
    const std::size_t n = 3 + rng.below(6);
    const bool ties = it % 2 == 0;
    auto x = oracle::random_values(n, rng, ties);
    auto y = oracle::random_values(n, rng, ties);
    while (oracle::variance(x) == 0) x = oracle::random_values(n, rng, ties);
    while (oracle::variance(y) == 0) y = oracle::random_values(n, rng, ties);

    errs["pearson"].add(pearson(x, y), oracle::pearson(x, y));
    const auto s = spearman(x, y);
    const auto so = oracle::spearman(x, y);
    errs["spearman"].add(s.rho, so.rho);
    errs["spearman"].add(s.p_value, so.p);

    const auto a = oracle::random_values(1 + rng.below(6), rng, ties);
    const auto b = oracle::random_values(1 + rng.below(6), rng, ties);
    const int alt = it % 3;
    const auto u = mann_whitney_u(a, b, alt_of(alt));
    errs["mann_whitney_u"].add(u.statistic, oracle::mwu_statistic(a, b));
    errs["mann_whitney_u"].add(u.p_value, oracle::mwu_exact_p(a, b, alt));

    const auto g1 = oracle::random_values(2 + rng.below(7), rng, false);
    const auto g2 = oracle::random_values(2 + rng.below(7), rng, false);
    errs["cohens_d"].add(cohens_d(g1, g2), oracle::cohens_d(g1, g2));

    const auto xr = oracle::random_values(n, rng, false);
    const auto yr = oracle::random_values(n, rng, false);
    const auto fit = ols_r2(xr, yr);
    const auto fo = oracle::ols(xr, yr);
    errs["ols_r2"].add(fit.slope, fo.slope);
    errs["ols_r2"].add(fit.intercept, fo.intercept);
    errs["ols_r2"].add(fit.r2, fo.r2);

    const auto pt = paired_t(xr, yr);
    const auto [t, p] = oracle::paired_t(xr, yr);
    errs["paired_t"].add(pt.statistic, t);
    errs["paired_t"].add(pt.p_value, p);

    const auto d1 = oracle::random_distances(4, rng);
    const auto d2 = oracle::random_distances(4, rng);
    const auto m = mantel_exhaustive(d1, d2, MantelMethod::spearman);
    const auto [mr, mp] = oracle::mantel_exhaustive(d1, d2, true);
    errs["mantel"].add(m.statistic, mr);
    errs["mantel"].add(m.p_value, mp);

    const std::u32string alphabet = U"abcéšα";
    std::u32string sa;
    std::u32string sb;
    for (std::size_t i = rng.below(9); i > 0; --i) sa.push_back(alphabet[rng.below(alphabet.size())]);
    for (std::size_t i = rng.below(9); i > 0; --i) sb.push_back(alphabet[rng.below(alphabet.size())]);
    const std::size_t longest = std::max(sa.size(), sb.size());
    const double lev_want =
        longest == 0 ? 1.0 : 1.0 - static_cast<double>(oracle::edit_distance(sa, sb)) / static_cast<double>(longest);
    errs["levenshtein_similarity"].add(levenshtein_similarity(utf8_encode(CodePoints(sa.begin(), sa.end())),
                                                              utf8_encode(CodePoints(sb.begin(), sb.end()))),
                                       lev_want);

    const auto dm = oracle::random_distances(2 + rng.below(7), rng);
    const auto got = upgma_cluster(dm);
    const auto want = oracle::upgma(dm);
    bool same_topology = got.merges.size() == want.size();
    for (std::size_t i = 0; same_topology && i < want.size(); ++i) {
      same_topology = got.merges[i].a == want[i].a && got.merges[i].b == want[i].b;
      errs["upgma"].add(got.merges[i].height, want[i].height);
    }
    if (!same_topology) errs["upgma"].add(0.0, 1.0);
  }
  for (const auto& [name, e] : errs) cr.check(name, e.bad == 0 && e.n >= kOracleInstances, e.text());

  // normal approximation against the exact null over the whole small-sample domain
  struct Gap {
    double value = 0.0;
    std::string at;
    void add(double g, std::size_t na, std::size_t nb, Alternative alt) {
      if (g <= value) return;
      value = g;
      at = "sizes (" + std::to_string(na) + "," + std::to_string(nb) + ") " + to_string(alt);
    }
  };
  Gap all_sizes;
  Gap both_groups;
  Gap tied;
  Rng mw(1002);
  for (std::size_t na = 1; na <= 11; ++na)
    for (std::size_t nb = 1; na + nb <= 12; ++nb)
      for (int rep = 0; rep < 10; ++rep) {
        const bool ties = rep >= 8;
        const auto a = oracle::random_values(na, mw, ties);
        const auto b = oracle::random_values(nb, mw, ties);
        for (int alt = 0; alt < 3; ++alt) {
          const double gap = std::fabs(mann_whitney_u_exact(a, b, alt_of(alt)).p_value -
                                       mann_whitney_u_normal(a, b, alt_of(alt)).p_value);
          if (ties) {
            tied.add(gap, na, nb, alt_of(alt));
            continue;
          }
          all_sizes.add(gap, na, nb, alt_of(alt));
          if (alt == 2 ? (na >= 3 && nb >= 3) : (na >= 2 && nb >= 2)) both_groups.add(gap, na, nb, alt_of(alt));
        }
      }
  cr.check("mwu_normal_approx", all_sizes.value <= kMwuApproxAbs && tied.value <= kMwuApproxAbs,
           "max |approx - exact| over |a|+|b| <= 12: " + fmt("%.4f", all_sizes.value) + " at " + all_sizes.at +
               " (distinct values); " + fmt("%.4f", tied.value) + " at " + tied.at + " (values on a 5-point grid)");
  cr.check("mwu_normal_approx_no_singletons", both_groups.value <= kMwuApproxAbs,
           "distinct values, groups >= 2 (one-sided) or >= 3 (two-sided): max gap " + fmt("%.4f", both_groups.value) +
               " at " + both_groups.at);

  const double elapsed = seconds_since(t0);
  cr.check("runtime", elapsed < kOracleSeconds, fmt("%.2f s", elapsed));
  return cr;
}

// ---------------------------------------------------------------------------

PlantSpec planted_spec(std::uint64_t seed) {
  PlantSpec spec;
  spec.n_concepts = 40;
  spec.n_languages = 30;
  spec.dim = 64;
  spec.concept_scale = 1.0;
  spec.noise_scale = 0.1;
  spec.offset_scale = 1.0;
  spec.seed = seed;
  spec.tree = random_tree(30, 0.1, 1.0, seed);
  for (std::size_t c = 0; c < 16; c += 2) spec.colex_pairs.push_back({c, c + 1, 0.9});
  return spec;
}

std::vector<GlossPair> offset_pairs(const EmbeddingStore& s) {
  std::vector<GlossPair> out;
  for (std::size_t c = 0; c + 1 < 8; c += 2) out.push_back({s.concepts()[c].gloss, s.concepts()[c + 1].gloss});
  return out;
}

Criterion planted_structure() {
  Criterion cr{"C2", "planted-structure recovery", {}};
  setenv("LEXGEO_THREADS", "1", 1);
  const auto t0 = Clock::now();

  const Plant p = gen_planted(planted_spec(7));
  const CorrectionConfig def{};

  const auto ratio = exp_conceptual_store(p.store, 0, def, 1000, 7);
  const double factor = ratio.results["improvement_factor"].get<double>();
  cr.check("a_store_ratio", factor >= kRatioImprovement,
           "centered/raw ratio improvement " + fmt("%.3f", factor) + " (raw " +
               fmt("%.3f", ratio.results["raw"]["ratio"].get<double>()) + ", centered " +
               fmt("%.3f", ratio.results["centered"]["ratio"].get<double>()) + ")");

  PhyloConfig phylo;
  phylo.n_perm = 999;
  phylo.seed = 7;
  const auto tree_k0 = exp_phylogenetic(p.store, 0, {0, true, false}, p.truth.tree_distances, phylo);
  const double rho = tree_k0.results["mantel"]["statistic"].get<double>();
  const double pv = tree_k0.results["mantel"]["p_value"].get<double>();
  cr.check("b_tree_mantel", rho > kTreeRho && pv <= kTreeP,
           "mean-only correction: rho " + fmt("%.3f", rho) + ", p " + fmt("%.4f", pv) + " (999 permutations)");
  const auto tree_k3 = exp_phylogenetic(p.store, 0, def, p.truth.tree_distances, phylo);
  cr.info("with k=3 top components removed: rho " +
          fmt("%.3f", tree_k3.results["mantel"]["statistic"].get<double>()) + ", p " +
          fmt("%.4f", tree_k3.results["mantel"]["p_value"].get<double>()));

  ColexEdgeList edges;
  for (const auto& cp : p.truth.colex_pairs)
    edges.edges.push_back({p.store.concepts()[cp.concept_a].gloss, p.store.concepts()[cp.concept_b].gloss, 10});
  const auto colex = exp_colexification(p.store, 0, def, edges, {}, {});
  const double cp = colex.results["binary"]["p_value"].get<double>();
  const double cd = colex.results["binary"]["effect_size"].get<double>();
  cr.check("c_colex", cp < kColexP && cd > kColexD,
           std::to_string(colex.results["n_colexified"].get<int>()) + " planted vs " +
               std::to_string(colex.results["n_control"].get<int>()) + " other pairs: p " + fmt("%.2e", cp) +
               ", d " + fmt("%.2f", cd));

  PlantSpec quiet = planted_spec(8);
  quiet.noise_scale = 0.05;
  quiet.tree.reset();
  const Plant q = gen_planted(quiet);
  const auto off = exp_offset_invariance(q.store, 0, def, offset_pairs(q.store));
  const double consistency = off.results["mean_consistency"].get<double>();
  cr.check("d_offsets", consistency > kOffsetConsistency,
           "mean consistency " + fmt("%.4f", consistency) + " at 5% noise over 4 pairs");

  const double elapsed = seconds_since(t0);
  cr.check("runtime", elapsed < kPlantedSeconds, fmt("%.2f s single-threaded", elapsed));
  unsetenv("LEXGEO_THREADS");
  return cr;
}

// ---------------------------------------------------------------------------

double min_sweep_rho(const EmbeddingStore& s, std::string* detail) {
  const auto rep = exp_isotropy_validation(s, 0, {0, 1, 3, 5});
  double worst = 1.0;
  std::string d;
  for (const auto& e : rep.results["k_sweep"]) {
    const double r = e["rho"].is_number() ? e["rho"].get<double>() : -1.0;
    worst = std::min(worst, r);
    d += "k=" + std::to_string(e["k"].get<int>()) + " " + fmt("%.3f", r) + "  ";
  }
  *detail = d;
  return worst;
}

Criterion correction_sanity() {
  Criterion cr{"C3", "correction sanity (k-sweep agreement)", {}};
  std::string d;

  double worst = 1.0;
  std::string per_seed;
  for (std::uint64_t seed : {7, 8, 9}) {
    const double w = min_sweep_rho(gen_planted(planted_spec(seed)).store, &d);
    worst = std::min(worst, w);
    per_seed += "seed " + std::to_string(seed) + ": " + d + "| ";
  }
  cr.check("planted_sweep", worst > kSweepRho, "min rho " + fmt("%.3f", worst) + " ; " + per_seed);

  PlantSpec lang = planted_spec(7);
  lang.tree.reset();
  lang.offset_scale = 4.0;
  lang.offset_rank = 8;
  lang.concept_scale_spread = 3.0;
  double lang_worst = 1.0;
  for (std::uint64_t seed : {7, 8, 9}) {
    lang.seed = seed;
    lang_worst = std::min(lang_worst, min_sweep_rho(gen_planted(lang).store, &d));
  }
  cr.check("language_dominated_sweep", lang_worst > kSweepRho,
           "offsets in a rank-8 subspace at 4x concept scale, concept scales spread 1..4: min rho " +
               fmt("%.3f", lang_worst));

  PlantSpec full;
  full.n_concepts = 101;
  full.n_languages = 135;
  full.dim = 1024;
  full.seed = 3;
  full.tree = random_tree(135, 0.1, 1.0, 3);
  const double full_worst = min_sweep_rho(gen_planted(full).store, &d);
  cr.check("full_scale_sweep", full_worst > kSweepRho, "101 x 135 x 1024 plant, stated noise and offset scales: " + d);

  PlantSpec clean = planted_spec(7);
  clean.noise_scale = 0.0;
  clean.offset_scale = 0.0;
  const double exact = min_sweep_rho(gen_planted(clean).store, &d);
  cr.check("noise_free_exact", exact == 1.0, d);
  return cr;
}

// ---------------------------------------------------------------------------

void write_forms(const EmbeddingStore& s, const fs::path& path, std::uint64_t seed) {
  Rng rng(seed);
  const std::string letters = "ptkbdgmnslraeiou";
  std::ofstream out(path);
  out << "gloss,language_code,form\n";
  for (const auto& c : s.concepts()) {
    std::string stem;
    for (int i = 0; i < 4; ++i) stem.push_back(letters[rng.below(letters.size())]);
    for (const auto& l : s.languages()) {
      std::string form = stem;
      form[rng.below(form.size())] = letters[rng.below(letters.size())];
      out << c.gloss << "," << l.code << "," << form << "\n";
    }
  }
}

// Plant, resources and an `all` config under dir; returns the config path.
fs::path prepare_pipeline(const fs::path& dir, const json& synth) {
  write_json(dir / "synth.json", {{"synth", synth}, {"out", "plant"}});
  std::ostringstream sink;
  if (run_cli({"synth", "--config", (dir / "synth.json").string()}, sink, sink) != 0)
    throw std::runtime_error("synth failed: " + sink.str());
  write_forms(load_store(dir / "plant" / "plant.lgeo"), dir / "forms.csv", 5);
  const fs::path config = dir / "run.json";
  write_json(config, {{"store", "plant/plant.lgeo"},
                      {"asjp", "plant/plant_tree.csv"},
                      {"colex_edges", "plant/plant_colex.csv"},
                      {"offset_pairs", "plant/plant_offsets.csv"},
                      {"word_forms", "forms.csv"},
                      {"out", "out"}});
  return config;
}

int run_binary(const std::string& cli, const fs::path& config, const fs::path& out, const std::string& threads) {
  const std::string cmd = "LEXGEO_THREADS=" + threads + " '" + cli + "' all --config '" + config.string() +
                          "' --out '" + out.string() + "' > /dev/null 2>&1";
  return std::system(cmd.c_str());
}

std::map<std::string, std::string> json_outputs(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().extension() == ".json") {
      std::ifstream in(e.path(), std::ios::binary);
      out[e.path().filename().string()] = std::string(std::istreambuf_iterator<char>(in), {});
    }
  return out;
}

Criterion determinism(const std::string& cli) {
  Criterion cr{"C4", "determinism", {}};
  const auto dir = support::temp_dir("acceptance_determinism");
  json synth = {{"n_concepts", 40}, {"n_languages", 30}, {"dim", 64}, {"n_layers", 3}, {"seed", 11},
                {"tree", {{"kind", "random"}}}, {"layer_offset_decay", 0.6},
                {"colex_pairs", json::array({{{"concept_a", 0}, {"concept_b", 1}}, {{"concept_a", 2}, {"concept_b", 3}}})}};
  const auto config = prepare_pipeline(dir, synth);
  const int a = run_binary(cli, config, dir / "run_a", "8");
  const int b = run_binary(cli, config, dir / "run_b", "8");
  const int c = run_binary(cli, config, dir / "run_c", "1");
  cr.check("exit_status", a == 0 && b == 0 && c == 0,
           "exit codes " + std::to_string(a) + " " + std::to_string(b) + " " + std::to_string(c));
  if (a != 0 || b != 0 || c != 0) return cr;
  const auto ja = json_outputs(dir / "run_a");
  const auto jb = json_outputs(dir / "run_b");
  const auto jc = json_outputs(dir / "run_c");
  cr.check("repeat_run", ja == jb, std::to_string(ja.size()) + " JSON files compared, two runs at 8 threads");
  cr.check("threads_1_vs_8", ja == jc, std::to_string(ja.size()) + " JSON files compared, 1 vs 8 threads");
  return cr;
}

// ---------------------------------------------------------------------------

Criterion performance(const std::string& cli) {
  Criterion cr{"C5", "performance", {}};
  {
    setenv("LEXGEO_THREADS", "1", 1);
    Rng rng(5);
    const auto d1 = oracle::random_distances(88, rng);
    const auto d2 = oracle::random_distances(88, rng);
    const auto t0 = Clock::now();
    const auto m = mantel(d1, d2, 999, 1);
    const double s = seconds_since(t0);
    unsetenv("LEXGEO_THREADS");
    cr.check("mantel_88", s < kMantelSeconds, fmt("%.3f s single-threaded", s) + " (rho " + fmt("%.3f", m.statistic) + ")");
  }
  const auto dir = support::temp_dir("acceptance_performance");
  json synth = {{"n_concepts", 101}, {"n_languages", 135}, {"dim", 1024}, {"n_layers", 1}, {"seed", 3},
                {"tree", {{"kind", "random"}}},
                {"colex_pairs", json::array({{{"concept_a", 0}, {"concept_b", 1}}, {{"concept_a", 2}, {"concept_b", 3}}})}};
  const auto config = prepare_pipeline(dir, synth);
  const auto t0 = Clock::now();
  const int code = run_binary(cli, config, dir / "out", std::to_string(worker_count()));
  const double s = seconds_since(t0);
  cr.check("pipeline_101x135x1024", code == 0 && s < kPipelineSeconds,
           "lexgeo all: exit " + std::to_string(code) + ", " + fmt("%.2f s", s) + " with " +
               std::to_string(worker_count()) + " workers");
  return cr;
}

// ---------------------------------------------------------------------------

Criterion format_robustness() {
  Criterion cr{"C6", "format robustness", {}};
  Rng rng(77);
  int structured = 0;
  int other = 0;
  int accepted = 0;
  for (int it = 0; it < 1000; ++it) {
    auto image = encode_store(support::random_store(rng));
    if (it % 2 == 0) {
      image.resize(static_cast<std::size_t>(rng.below(image.size())));
    } else {
      for (std::size_t f = 1 + rng.below(3); f > 0; --f)
        image[rng.below(16)] ^= static_cast<std::uint8_t>(1u << rng.below(8));
    }
    try {
      decode_store(image);
      ++accepted;
    } catch (const Error& e) {
      (e.kind() == ErrorKind::format && std::strlen(e.what()) > 0 ? structured : other)++;
    } catch (...) {
      ++other;
    }
  }
  cr.check("fuzz_1000", structured == 1000,
           std::to_string(structured) + " format errors, " + std::to_string(other) + " other exceptions, " +
               std::to_string(accepted) + " accepted (truncation and preamble bit flips)");

  int meta_ok = 0;
  int meta_err = 0;
  for (int it = 0; it < 1000; ++it) {
    auto image = encode_store(support::random_store(rng));
    std::uint64_t meta_len = 0;
    std::memcpy(&meta_len, image.data() + 8, 8);
    image[16 + rng.below(meta_len)] ^= static_cast<std::uint8_t>(1u << rng.below(8));
    try {
      decode_store(image);
      ++meta_ok;
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::format) ++meta_err;
    }
  }
  cr.check("metadata_flips", meta_ok + meta_err == 1000,
           std::to_string(meta_err) + " format errors, " + std::to_string(meta_ok) +
               " decoded to a valid store (metadata is not checksummed)");

  int round_trips = 0;
  for (int it = 0; it < 200; ++it) {
    const auto s = support::random_store(rng);
    const auto image = encode_store(s);
    const auto back = decode_store(image);
    if (back == s && encode_store(back) == image) ++round_trips;
  }
  cr.check("round_trip_200", round_trips == 200, std::to_string(round_trips) + "/200 bit-exact");
  return cr;
}

}  // namespace

int main(int argc, char** argv) {
  std::string cli = argc > 1 ? argv[1] : "";
  if (cli.empty()) {
    const fs::path sibling = fs::path(argv[0]).parent_path().parent_path() / "lexgeo";
    cli = sibling.string();
  }
  std::vector<std::function<Criterion()>> suite{
      oracle_equivalence, planted_structure, correction_sanity, [&] { return determinism(cli); },
      [&] { return performance(cli); }, format_robustness};

  std::ofstream report;
  if (argc > 2) report.open(argv[2]);
  int failed = 0;
  int unexpected = 0;
  for (const auto& run : suite) {
    Criterion c;
    try {
      c = run();
    } catch (const std::exception& e) {
      c.id = "C?";
      c.title = "crashed";
      c.check("exception", false, e.what());
    }
    c.print(std::cout);
    std::cout.flush();
    if (report.is_open()) c.print(report);
    failed += c.ok() ? 0 : 1;
    unexpected += c.unexpected_red() ? 1 : 0;
  }
  std::ostringstream summary;
  summary << "summary: " << (6 - failed) << "/6 criteria pass";
  if (failed > 0) summary << "; red sub-checks marked red* are documented known deviations";
  summary << "\n";
  std::cout << summary.str();
  if (report.is_open()) report << summary.str();
  return unexpected == 0 ? 0 : 1;
}
