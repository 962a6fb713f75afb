#include "lexgeo/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cstdio>
#include <fstream>
#include <memory>
#include <set>
#include <sstream>

#include "lexgeo/error.hpp"
#include "lexgeo/experiments.hpp"
#include "lexgeo/lgeo.hpp"
#include "lexgeo/resources.hpp"
#include "lexgeo/synth.hpp"
#include "lexgeo/text.hpp"

namespace lexgeo {

namespace fs = std::filesystem;

namespace {

const std::set<std::string> kMapSubcommands{"colors", "conceptmap"};

// Inputs each subcommand cannot run without.
std::vector<std::string> required_inputs(const std::string& sub) {
  if (sub == "synth") return {};
  if (sub == "surface") return {"store", "word_forms"};
  if (sub == "compare") return {"store", "comparison_store"};
  if (sub == "carrier") return {"store", "decontextual_store"};
  if (sub == "phylo") return {"store", "asjp"};
  if (sub == "colex") return {"store", "colex_edges"};
  if (sub == "offsets") return {"store", "offset_pairs"};
  if (sub == "all") return {"store", "asjp", "colex_edges", "word_forms", "offset_pairs"};
  return {"store"};
}

const std::optional<fs::path>& path_field(const RunConfig& c, const std::string& name) {
  static const std::optional<fs::path> none;
  if (name == "store") return c.store;
  if (name == "decontextual_store") return c.decontextual_store;
  if (name == "comparison_store") return c.comparison_store;
  if (name == "color_store") return c.color_store;
  if (name == "asjp") return c.asjp;
  if (name == "colex_edges") return c.colex_edges;
  if (name == "pair_universe") return c.pair_universe;
  if (name == "word_forms") return c.word_forms;
  if (name == "subfamilies") return c.subfamilies;
  if (name == "language_mapping") return c.language_mapping;
  if (name == "offset_pairs") return c.offset_pairs;
  return none;
}

const std::vector<std::string>& path_fields() {
  static const std::vector<std::string> names{"store",       "decontextual_store", "comparison_store", "color_store",
                                              "asjp",        "colex_edges",        "pair_universe",    "word_forms",
                                              "subfamilies", "language_mapping",   "offset_pairs"};
  return names;
}

std::optional<fs::path>& path_field(RunConfig& c, const std::string& name) {
  return const_cast<std::optional<fs::path>&>(path_field(static_cast<const RunConfig&>(c), name));
}

template <typename T>
T field(const json& j, const std::string& key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    fail("config field '" + key + "': wrong type");
  }
}

// Stores are read once per invocation.
class StoreCache {
 public:
  const EmbeddingStore& get(const fs::path& path) {
    auto it = stores_.find(path.string());
    if (it == stores_.end()) it = stores_.emplace(path.string(), load_store(path)).first;
    return it->second;
  }

 private:
  std::map<std::string, EmbeddingStore> stores_;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string fmt(const json& v) {
  if (v.is_number()) return fmt(v.get<double>());
  if (v.is_null()) return "n/a";
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

std::string summarize(const ExperimentReport& r) {
  const json& x = r.results;
  std::ostringstream s;
  s << r.experiment << ": ";
  if (r.experiment == "convergence") {
    s << x["n_scored"] << " concepts scored; mean " << fmt(x["mean"]) << " (sd " << fmt(x["sd"]) << "), range "
      << fmt(x["min"]) << " to " << fmt(x["max"]);
    if (!x["top"].empty()) s << "; top '" << fmt(x["top"][0]["concept"]) << "'";
    if (!x["bottom"].empty()) s << ", bottom '" << fmt(x["bottom"].back()["concept"]) << "'";
    s << ".";
  } else if (r.experiment == "surface") {
    s << "R2 orthographic " << fmt(x["r2_orthographic"]) << ", R2 phonetic " << fmt(x["r2_phonetic"]) << " over "
      << x["n_concepts"] << " concepts.";
  } else if (r.experiment == "categories") {
    s << x["categories"].size() << " categories; overall mean " << fmt(x["overall_mean"]);
    if (!x["categories"].empty())
      s << "; highest '" << fmt(x["categories"][0]["category"]) << "' at " << fmt(x["categories"][0]["mean"]);
    s << ".";
  } else if (r.experiment == "compare") {
    s << "Mann-Whitney U " << fmt(x["test"]["statistic"]) << ", p " << fmt(x["test"]["p_value"]) << " ("
      << fmt(x["test"]["alternative"]) << "), Cohen's d " << fmt(x["cohens_d"]) << ".";
  } else if (r.experiment == "isotropy") {
    s << "raw vs corrected rho " << fmt(x["raw_vs_corrected"]["rho"]) << "; k-sweep rho";
    for (const auto& e : x["k_sweep"]) s << " k=" << e["k"] << ":" << fmt(e["rho"]);
    s << ".";
  } else if (r.experiment == "carrier") {
    s << "rho " << fmt(x["spearman_rho"]) << ", mean |diff| " << fmt(x["mean_abs_diff"]);
    if (x["paired_t"].is_object())
      s << ", paired t " << fmt(x["paired_t"]["statistic"]) << " (p " << fmt(x["paired_t"]["p_value"]) << ")";
    s << ".";
  } else if (r.experiment == "layers") {
    s << "mean convergence " << fmt(x["mean_convergence"].front()) << " to " << fmt(x["mean_convergence"].back())
      << "; transition layer " << fmt(x["transition_layer"]) << ".";
  } else if (r.experiment == "phylo") {
    s << "Mantel rho " << fmt(x["mantel"]["statistic"]) << ", p " << fmt(x["mantel"]["p_value"]) << " ("
      << x["mantel"]["n_resamples"] << " permutations, seed " << x["mantel"]["seed"] << ") over " << x["n_languages"]
      << " languages.";
  } else if (r.experiment == "colex") {
    s << x["n_pairs"] << " pairs";
    if (x["continuous"].is_object()) s << "; Spearman " << fmt(x["continuous"]["rho"]) << " (p " << fmt(x["continuous"]["p_value"]) << ")";
    if (x["binary"].is_object())
      s << "; U " << fmt(x["binary"]["statistic"]) << ", p " << fmt(x["binary"]["p_value"]) << ", d "
        << fmt(x["binary"]["effect_size"]);
    s << ".";
  } else if (r.experiment == "storeratio") {
    s << "raw ratio " << fmt(x["raw"]["ratio"]) << ", centered " << fmt(x["centered"]["ratio"]) << ", factor "
      << fmt(x["improvement_factor"]) << ".";
  } else if (r.experiment == "colors") {
    s << "explained variance";
    for (const auto& v : x["explained_variance_ratio"]) s << " " << fmt(v);
    if (!x["achromatic_component"].is_null()) s << "; achromatic terms separate on PC" << x["achromatic_component"];
    s << ".";
  } else if (r.experiment == "offsets") {
    s << "mean consistency " << fmt(x["mean_consistency"]) << " (range " << fmt(x["min_consistency"]) << " to "
      << fmt(x["max_consistency"]) << "), best pair " << fmt(x["best_pair"]) << ".";
  } else if (r.experiment == "conceptmap") {
    s << x["n_concepts"] << " concepts projected; explained variance";
    for (const auto& v : x["explained_variance_ratio"]) s << " " << fmt(v);
    s << ".";
  }
  if (!r.diagnostics.empty()) s << " " << r.diagnostics.size() << " diagnostic(s).";
  return s.str();
}

class Runner {
 public:
  Runner(const RunConfig& c, std::ostream& out) : c_(c), out_(out) {}

  void run(const std::string& sub) {
    if (sub == "synth") return synth();
    if (sub == "all") return all();
    emit(experiment(sub));
  }

 private:
  CorrectionConfig correction(const std::string& sub) const {
    CorrectionConfig cc;
    cc.k = static_cast<std::size_t>(c_.k);
    cc.apply_global_mean = c_.apply_global_mean;
    cc.center_languages = c_.center_languages_for_maps && kMapSubcommands.contains(sub);
    return cc;
  }

  std::size_t layer_pos(const EmbeddingStore& s) const {
    if (!c_.layer) return s.n_layers() - 1;
    auto p = s.layer_position(static_cast<std::uint32_t>(*c_.layer));
    if (!p) fail("layer: " + std::to_string(*c_.layer) + " is not in the store");
    return *p;
  }

  json resources(std::initializer_list<const char*> names) const {
    json j = json::object();
    for (const char* n : names)
      if (const auto& p = path_field(c_, n)) j[n] = p->generic_string();
    return j;
  }

  ExperimentReport experiment(const std::string& sub) {
    const EmbeddingStore& store = stores_.get(*c_.store);
    const std::size_t layer = layer_pos(store);
    const CorrectionConfig cc = correction(sub);
    ExperimentReport r;
    if (sub == "convergence") {
      r = exp_convergence_ranking(store, layer, cc);
    } else if (sub == "surface") {
      SurfaceSimilarityConfig sc;
      sc.scripts = {c_.scripts.begin(), c_.scripts.end()};
      sc.strip_diacritics = c_.strip_diacritics;
      if (c_.phonetic_map) {
        std::map<char32_t, char32_t> rules;
        for (const auto& [from, to] : *c_.phonetic_map) rules[utf8_decode(from).at(0)] = utf8_decode(to).at(0);
        sc.phonetic_map = PhoneticMap(rules);
      }
      r = exp_surface_regression(store, layer, cc, load_word_forms(*c_.word_forms), sc);
      r.provenance["resources"] = resources({"word_forms"});
    } else if (sub == "categories") {
      r = exp_category_summary(store, layer, cc);
    } else if (sub == "compare") {
      r = exp_group_comparison(store, stores_.get(*c_.comparison_store), layer, cc,
                               alternative_from_string(c_.alternative));
    } else if (sub == "isotropy") {
      std::vector<std::size_t> ks;
      for (auto k : c_.k_values) ks.push_back(static_cast<std::size_t>(k));
      r = exp_isotropy_validation(store, layer, ks);
    } else if (sub == "carrier") {
      r = exp_carrier_robustness(store, stores_.get(*c_.decontextual_store), layer, cc);
    } else if (sub == "layers") {
      r = exp_layerwise(store, cc);
    } else if (sub == "phylo") {
      PhyloConfig pc;
      pc.n_perm = static_cast<std::size_t>(c_.perms);
      pc.seed = c_.seed;
      pc.method = c_.mantel_method == "pearson" ? MantelMethod::pearson : MantelMethod::spearman;
      if (c_.language_mapping) pc.mapping = load_key_value(*c_.language_mapping);
      if (c_.subfamilies) pc.subfamilies = load_key_value(*c_.subfamilies);
      r = exp_phylogenetic(store, layer, cc, load_asjp_matrix(*c_.asjp), pc);
      r.provenance["resources"] = resources({"asjp", "language_mapping", "subfamilies"});
    } else if (sub == "colex") {
      ColexConfig xc;
      xc.binary_threshold = static_cast<std::uint32_t>(c_.binary_threshold);
      xc.similarity = c_.colex_similarity == "per_language" ? ColexSimilarity::per_language : ColexSimilarity::centroid;
      std::vector<GlossPair> universe;
      if (c_.pair_universe) universe = load_gloss_pairs(*c_.pair_universe);
      r = exp_colexification(store, layer, cc, load_colex_edges(*c_.colex_edges), universe, xc);
      r.config["seed"] = c_.seed;
      r.provenance["resources"] = resources({"colex_edges", "pair_universe"});
    } else if (sub == "storeratio") {
      r = exp_conceptual_store(store, layer, cc, static_cast<std::size_t>(c_.n_boot), c_.seed);
    } else if (sub == "colors") {
      const EmbeddingStore& cs = c_.color_store ? stores_.get(*c_.color_store) : store;
      r = exp_color_circle(cs, layer_pos(cs), cc, static_cast<std::size_t>(c_.color_components));
    } else if (sub == "offsets") {
      r = exp_offset_invariance(store, layer, cc, load_gloss_pairs(*c_.offset_pairs));
      r.provenance["resources"] = resources({"offset_pairs"});
    } else if (sub == "conceptmap") {
      r = exp_concept_map(store, layer, cc);
    } else {
      fail("unknown subcommand '" + sub + "'");
    }
    return r;
  }

  void emit(const ExperimentReport& r) {
    write_report(r, c_.out);
    out_ << summarize(r) << "\n";
  }

  void all() {
    const EmbeddingStore& store = stores_.get(*c_.store);
    std::vector<std::string> subs{"convergence", "surface", "categories", "isotropy", "phylo",
                                  "colex",       "storeratio", "offsets", "conceptmap"};
    if (c_.comparison_store) subs.push_back("compare");
    if (c_.decontextual_store) subs.push_back("carrier");
    if (store.n_layers() >= 2) subs.push_back("layers");
    bool colors = static_cast<bool>(c_.color_store);
    if (!colors) {
      colors = std::all_of(basic_color_terms().begin(), basic_color_terms().end(), [&](const std::string& t) {
        return store.concept_index(t) || (t == "grey" && store.concept_index("gray"));
      });
    }
    if (colors) subs.push_back("colors");
    std::sort(subs.begin(), subs.end());
    for (const auto& s : subs) emit(experiment(s));
  }

  void synth() {
    json spec = c_.synth;
    if (!spec.contains("seed")) spec["seed"] = c_.seed;
    const Plant plant = gen_planted(plant_spec_from_json(spec));
    const auto files = write_plant(plant, c_.out, "plant");
    out_ << "synth: wrote " << files.size() << " files to " << c_.out.generic_string() << " ("
         << plant.store.n_concepts() << " concepts x " << plant.store.n_languages() << " languages x "
         << plant.store.n_layers() << " layers, dim " << plant.store.dim() << ").\n";
  }

  const RunConfig& c_;
  std::ostream& out_;
  StoreCache stores_;
};

}  // namespace

namespace {

std::string subcommand_help(const std::string& name) {
  static const std::map<std::string, std::string> help{
      {"convergence", "rank concepts by cross-lingual convergence"},
      {"surface", "regress convergence on orthographic and phonetic similarity"},
      {"categories", "convergence summary per semantic category"},
      {"compare", "compare convergence between two stores"},
      {"isotropy", "ranking agreement across top-component removal settings"},
      {"carrier", "contextual vs decontextual ranking agreement"},
      {"layers", "convergence and store ratio per layer"},
      {"phylo", "Mantel test against a phylogenetic distance matrix"},
      {"colex", "similarity of colexified vs other concept pairs"},
      {"storeratio", "between/within concept distance ratio, raw vs centered"},
      {"colors", "PCA of basic color term centroids"},
      {"offsets", "cross-language consistency of concept offsets"},
      {"conceptmap", "2-D map of concept centroids"},
      {"synth", "write a planted synthetic store and resources"},
      {"all", "run every experiment whose inputs are configured"}};
  auto it = help.find(name);
  return it == help.end() ? std::string() : it->second;
}

}  // namespace

const std::vector<std::string>& subcommand_names() {
  static const std::vector<std::string> names{"convergence", "surface", "categories", "compare",    "isotropy",
                                              "carrier",     "layers",  "phylo",      "colex",      "storeratio",
                                              "colors",      "offsets", "conceptmap", "synth",      "all"};
  return names;
}

RunConfig parse_run_config(const json& j, const fs::path& base_dir) {
  require(j.is_object(), "config must be a JSON object");
  static const std::set<std::string> scalar_keys{
      "layer",          "k",      "apply_global_mean", "center_languages_for_maps", "seed",
      "perms",          "n_boot", "binary_threshold",  "colex_similarity",          "k_values",
      "alternative",    "mantel_method", "color_components", "scripts",             "strip_diacritics",
      "phonetic_map",   "synth",  "out"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    const auto& names = path_fields();
    if (!scalar_keys.contains(it.key()) && std::find(names.begin(), names.end(), it.key()) == names.end())
      fail("config field '" + it.key() + "': unknown key");
  }
  RunConfig c;
  auto resolve = [&](const std::string& p) {
    const fs::path path(p);
    return path.is_absolute() ? path : base_dir / path;
  };
  for (const auto& name : path_fields())
    if (j.contains(name) && !j.at(name).is_null()) path_field(c, name) = resolve(field<std::string>(j, name));
  if (j.contains("layer") && !j.at("layer").is_null()) c.layer = field<std::int64_t>(j, "layer");
  if (j.contains("k")) c.k = field<std::int64_t>(j, "k");
  if (j.contains("apply_global_mean")) c.apply_global_mean = field<bool>(j, "apply_global_mean");
  if (j.contains("center_languages_for_maps")) c.center_languages_for_maps = field<bool>(j, "center_languages_for_maps");
  if (j.contains("seed")) c.seed = field<std::uint64_t>(j, "seed");
  if (j.contains("perms")) c.perms = field<std::int64_t>(j, "perms");
  if (j.contains("n_boot")) c.n_boot = field<std::int64_t>(j, "n_boot");
  if (j.contains("binary_threshold")) c.binary_threshold = field<std::int64_t>(j, "binary_threshold");
  if (j.contains("colex_similarity")) c.colex_similarity = field<std::string>(j, "colex_similarity");
  if (j.contains("k_values")) c.k_values = field<std::vector<std::int64_t>>(j, "k_values");
  if (j.contains("alternative")) c.alternative = field<std::string>(j, "alternative");
  if (j.contains("mantel_method")) c.mantel_method = field<std::string>(j, "mantel_method");
  if (j.contains("color_components")) c.color_components = field<std::int64_t>(j, "color_components");
  if (j.contains("scripts")) c.scripts = field<std::vector<std::string>>(j, "scripts");
  if (j.contains("strip_diacritics")) c.strip_diacritics = field<bool>(j, "strip_diacritics");
  if (j.contains("phonetic_map")) c.phonetic_map = field<std::map<std::string, std::string>>(j, "phonetic_map");
  if (j.contains("synth")) {
    c.synth = j.at("synth");
    require(c.synth.is_object(), "config field 'synth': must be an object");
  }
  if (j.contains("out")) c.out = resolve(field<std::string>(j, "out"));
  return c;
}

RunConfig load_run_config(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail_io("cannot open config '" + path.string() + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    fail("config '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return parse_run_config(j, path.parent_path());
}

std::vector<Violation> validate_config(const RunConfig& c, const std::string& sub) {
  std::vector<Violation> v;
  const auto& names = subcommand_names();
  if (std::find(names.begin(), names.end(), sub) == names.end()) {
    v.push_back({"subcommand", "unknown subcommand '" + sub + "'"});
    return v;
  }
  for (const auto& name : required_inputs(sub))
    if (!path_field(c, name)) v.push_back({name, "required by '" + sub + "' but not set"});
  for (const auto& name : path_fields()) {
    const auto& p = path_field(c, name);
    if (p && !fs::is_regular_file(*p)) v.push_back({name, "file does not exist: " + p->generic_string()});
  }

  if (c.k < 0) v.push_back({"k", "must be >= 0"});
  if (c.perms < 1) v.push_back({"perms", "must be >= 1"});
  if (c.n_boot != 0 && c.n_boot < 100) v.push_back({"n_boot", "must be 0 (disabled) or >= 100"});
  if (c.binary_threshold < 1) v.push_back({"binary_threshold", "must be >= 1"});
  if (c.colex_similarity != "centroid" && c.colex_similarity != "per_language")
    v.push_back({"colex_similarity", "must be 'centroid' or 'per_language'"});
  if (c.alternative != "two_sided" && c.alternative != "greater" && c.alternative != "less")
    v.push_back({"alternative", "must be 'two_sided', 'greater' or 'less'"});
  if (c.mantel_method != "spearman" && c.mantel_method != "pearson")
    v.push_back({"mantel_method", "must be 'spearman' or 'pearson'"});
  if (c.color_components != 2 && c.color_components != 3) v.push_back({"color_components", "must be 2 or 3"});
  if (c.k_values.empty()) v.push_back({"k_values", "must not be empty"});
  for (auto k : c.k_values)
    if (k < 0) v.push_back({"k_values", "entries must be >= 0"});
  if (c.layer && *c.layer < 0) v.push_back({"layer", "must be >= 0"});
  if (c.phonetic_map) {
    for (const auto& [from, to] : *c.phonetic_map)
      if (utf8_decode(from).size() != 1 || utf8_decode(to).size() != 1)
        v.push_back({"phonetic_map", "entries must map one character to one character"});
  }

  // store metadata checks
  auto peek = [&](const std::string& name) -> std::optional<StoreInfo> {
    const auto& p = path_field(c, name);
    if (!p || !fs::is_regular_file(*p)) return std::nullopt;
    try {
      return peek_store(*p);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::validation) throw;
      v.push_back({name, std::string("unreadable store: ") + e.what()});
      return std::nullopt;
    }
  };
  const auto main = sub == "synth" ? std::nullopt : peek("store");
  if (main) {
    if (c.layer && *c.layer >= 0 &&
        std::find(main->layers.begin(), main->layers.end(), static_cast<std::uint32_t>(*c.layer)) == main->layers.end())
      v.push_back({"layer", "layer " + std::to_string(*c.layer) + " is not in the store"});
    if (c.k >= 0 && static_cast<std::size_t>(c.k) >= main->dim) v.push_back({"k", "must be below the store dim"});
    if (sub == "layers" && main->layers.size() < 2) v.push_back({"store", "layer-wise analysis needs >= 2 layers"});
  }
  const bool wants_carrier = sub == "carrier" || (sub == "all" && c.decontextual_store);
  if (wants_carrier) {
    if (main && main->condition != Condition::contextual)
      v.push_back({"store", "condition mismatch: expected contextual, found " + to_string(main->condition)});
    if (const auto d = peek("decontextual_store")) {
      if (d->condition != Condition::decontextual)
        v.push_back({"decontextual_store",
                     "condition mismatch: expected decontextual, found " + to_string(d->condition)});
      if (main && d->layers != main->layers) v.push_back({"decontextual_store", "layer list differs from store"});
    }
  }
  if (sub == "compare" || (sub == "all" && c.comparison_store))
    if (const auto d = peek("comparison_store"); d && main && d->layers != main->layers)
      v.push_back({"comparison_store", "layer list differs from store"});
  if (sub == "colors" || sub == "all") peek("color_store");
  return v;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"lexgeo: cross-lingual embedding geometry experiments", "lexgeo"};
  app.require_subcommand(1, 1);
  std::string config_path;
  std::optional<std::string> store;
  std::optional<std::int64_t> k;
  std::optional<std::int64_t> layer;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> perms;
  std::optional<std::string> out_dir;
  for (const auto& name : subcommand_names()) {
    CLI::App* s = app.add_subcommand(name, subcommand_help(name));
    s->add_option("--config", config_path, "JSON run configuration");
    s->add_option("--store", store, "embedding store (.lgeo)");
    s->add_option("--k", k, "number of principal components removed");
    s->add_option("--layer", layer, "layer number");
    s->add_option("--seed", seed, "random seed");
    s->add_option("--perms", perms, "Mantel permutations");
    s->add_option("--out", out_dir, "output directory");
  }

  std::vector<std::string> argv(args.rbegin(), args.rend());
  try {
    app.parse(argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return 1;
  }
  const std::string sub = app.get_subcommands().front()->get_name();

  try {
    RunConfig c = config_path.empty() ? RunConfig{} : load_run_config(config_path);
    if (store) c.store = fs::path(*store);
    if (k) c.k = *k;
    if (layer) c.layer = *layer;
    if (seed) c.seed = *seed;
    if (perms) c.perms = *perms;
    if (out_dir) c.out = fs::path(*out_dir);

    const auto violations = validate_config(c, sub);
    if (!violations.empty()) {
      for (const auto& v : violations) err << "config error: " << v.field << ": " << v.message << "\n";
      return 1;
    }
    Runner(c, out).run(sub);
    return 0;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.kind() == ErrorKind::validation ? 1 : 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace lexgeo
