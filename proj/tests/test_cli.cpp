#include <doctest.h>

#include <fstream>
#include <sstream>

#include "lexgeo/cli.hpp"
#include "lexgeo/error.hpp"
#include "support.hpp"

using namespace lexgeo;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

void write_json(const fs::path& path, const json& j) { std::ofstream(path) << j.dump(2); }

// Plant plus an all-inputs config in `dir`.
fs::path setup(const fs::path& dir) {
  write_json(dir / "synth.json", {{"synth", {{"n_concepts", 12}, {"n_languages", 8}, {"dim", 16}, {"n_layers", 2},
                                             {"tree", {{"kind", "random"}}},
                                             {"colex_pairs", json::array({{{"concept_a", 0}, {"concept_b", 1}}})}}},
                                  {"out", "plant"}});
  REQUIRE(run({"synth", "--config", (dir / "synth.json").string()}).code == 0);
  std::ofstream forms(dir / "forms.csv");
  forms << "gloss,language_code,form\n";
  const char* words[] = {"pata", "bata", "tapa", "pada", "mapa", "napa", "kapa", "gapa"};
  for (int c = 0; c < 12; ++c)
    for (int l = 0; l < 8; ++l) {
      const std::string code = std::string("aa") + static_cast<char>('a' + l) + "_Latn";
      forms << "c" << (c < 10 ? "00" : "0") << c << "," << code << "," << words[(c + l) % 8] << c << "\n";
    }
  forms.close();
  const fs::path config = dir / "run.json";
  write_json(config, {{"store", "plant/plant.lgeo"},
                      {"asjp", "plant/plant_tree.csv"},
                      {"colex_edges", "plant/plant_colex.csv"},
                      {"offset_pairs", "plant/plant_offsets.csv"},
                      {"word_forms", "forms.csv"},
                      {"perms", 99},
                      {"n_boot", 100},
                      {"k_values", {0, 1, 3}},
                      {"out", "out"}});
  return config;
}

}  // namespace

TEST_CASE("all writes one report per experiment") {
  const auto dir = support::temp_dir("cli_all");
  const auto config = setup(dir);
  const auto r = run({"all", "--config", config.string()});
  INFO(r.err);
  REQUIRE(r.code == 0);
  for (const char* name : {"convergence", "surface", "categories", "isotropy", "layers", "phylo", "colex", "storeratio",
                           "offsets", "conceptmap"})
    CHECK(fs::exists(dir / "out" / (std::string(name) + ".json")));
}

TEST_CASE("flags override the config") {
  const auto dir = support::temp_dir("cli_flags");
  const auto config = setup(dir);
  const auto r = run({"convergence", "--config", config.string(), "--k", "1", "--out", (dir / "o2").string()});
  REQUIRE(r.code == 0);
  std::ifstream in(dir / "o2" / "convergence.json");
  const json j = json::parse(in);
  CHECK(j["config"]["correction"]["k"] == 1);
}

TEST_CASE("validation failures exit 1 and name the field") {
  const auto dir = support::temp_dir("cli_validation");
  const auto config = setup(dir);
  auto r = run({"phylo", "--store", (dir / "plant" / "plant.lgeo").string()});
  CHECK(r.code == 1);
  CHECK(r.err.find("asjp") != std::string::npos);
  r = run({"convergence", "--config", config.string(), "--k", "99"});
  CHECK(r.code == 1);
  CHECK(r.err.find("k:") != std::string::npos);
  write_json(dir / "bad.json", {{"stor", "x"}});
  r = run({"convergence", "--config", (dir / "bad.json").string()});
  CHECK(r.code == 1);
  CHECK(r.err.find("stor") != std::string::npos);
  CHECK(run({}).code == 1);
  CHECK(run({"nonsense"}).code == 1);
}

TEST_CASE("corrupt or missing files exit 2") {
  const auto dir = support::temp_dir("cli_io");
  setup(dir);
  const auto store = dir / "plant" / "plant.lgeo";
  fs::resize_file(store, fs::file_size(store) - 1);
  const auto r = run({"convergence", "--store", store.string(), "--out", (dir / "o").string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("truncated") != std::string::npos);
  CHECK(run({"convergence", "--config", (dir / "missing.json").string()}).code == 2);
}

TEST_CASE("validate_config checks required inputs without loading tensors") {
  RunConfig c;
  auto v = validate_config(c, "colex");
  CHECK(!v.empty());
  v = validate_config(c, "bogus");
  REQUIRE(v.size() == 1);
  CHECK(v[0].field == "subcommand");
  c.n_boot = 5;
  bool found = false;
  for (const auto& x : validate_config(c, "storeratio")) found |= x.field == "n_boot";
  CHECK(found);
}
