#include <doctest.h>

#include "lexgeo/error.hpp"
#include "lexgeo/resources.hpp"
#include "lexgeo/text.hpp"
#include "oracles.hpp"

using namespace lexgeo;

TEST_CASE("utf8 round trip and replacement") {
  const std::string s = "na\xc3\xafve \xe2\x82\xac \xf0\x9f\x98\x80";
  CHECK(utf8_encode(utf8_decode(s)) == s);
  CHECK(utf8_decode("\xff") == CodePoints{0xFFFD});
  CHECK(utf8_decode("\xc3") == CodePoints{0xFFFD});
}

TEST_CASE("levenshtein similarity matches recursive edit distance") {
  const std::u32string alphabet = U"abcéšα";
  Rng rng(41);
  for (int it = 0; it < 300; ++it) {
    std::u32string a;
    std::u32string b;
    const std::size_t la = rng.below(9);
    const std::size_t lb = rng.below(9);
    for (std::size_t i = 0; i < la; ++i) a.push_back(alphabet[rng.below(alphabet.size())]);
    for (std::size_t i = 0; i < lb; ++i) b.push_back(alphabet[rng.below(alphabet.size())]);
    const CodePoints ca(a.begin(), a.end());
    const CodePoints cb(b.begin(), b.end());
    const std::size_t longest = std::max(la, lb);
    const double want = longest == 0 ? 1.0 : 1.0 - static_cast<double>(oracle::edit_distance(a, b)) / static_cast<double>(longest);
    CHECK(oracle::close(levenshtein_similarity(utf8_encode(ca), utf8_encode(cb)), want));
  }
  CHECK(levenshtein_similarity("", "") == 1.0);
  CHECK(levenshtein_similarity("abc", "") == 0.0);
  CHECK(levenshtein_similarity("kitten", "sitting") == doctest::Approx(1.0 - 3.0 / 7.0));
}

TEST_CASE("phonetic normalization") {
  SurfaceSimilarityConfig config;
  CHECK(phonetic_normalize("Dog", config) == "tok");
  CHECK(phonetic_normalize("\xc3\x89t\xc3\xa9", config) == "ete");
  CHECK(phonetic_normalize("\xc5\xbe", config) == "s");
  config.strip_diacritics = false;
  CHECK(phonetic_normalize("\xc3\xa9", config) == "e\xcc\x81");
  CHECK(orthographic_normalize("\xc3\x89T\xc3\x89") == "\xc3\xa9t\xc3\xa9");
}

TEST_CASE("phonetic map closes chains and rejects cycles") {
  const PhoneticMap m({{U'a', U'b'}, {U'b', U'c'}});
  CHECK(m.apply(U'a') == U'c');
  CHECK(m.apply(U'z') == U'z');
  CHECK_THROWS_AS(PhoneticMap({{U'a', U'b'}, {U'b', U'a'}}), Error);
}

TEST_CASE("csv quoting and blank lines") {
  const auto rows = parse_csv("a,\"b,c\",\"d\"\"e\"\r\n\r\nx,y,z\n");
  REQUIRE(rows.size() == 2);
  CHECK(rows[0] == std::vector<std::string>{"a", "b,c", "d\"e"});
  CHECK(rows[1] == std::vector<std::string>{"x", "y", "z"});
}

TEST_CASE("asjp matrix parsing") {
  const auto m = parse_asjp_matrix(",a,b,c\na,0,1,2\nb,1,0,3\nc,2,3,0\n");
  CHECK(m.labels == std::vector<std::string>{"a", "b", "c"});
  CHECK(m.at(1, 2) == 3.0);
  const auto bare = parse_asjp_matrix("a,b\n0,1\n1,0\n");
  CHECK(bare.at(0, 1) == 1.0);
  CHECK_THROWS_WITH_AS(parse_asjp_matrix("a,b\n0,1\n2,0\n"), doctest::Contains("asymmetric"), Error);
  CHECK_THROWS_WITH_AS(parse_asjp_matrix("a,b\n0,1\n"), doctest::Contains("non-square"), Error);
  CHECK_THROWS_AS(parse_asjp_matrix("a,b\n1,1\n1,0\n"), Error);
}

TEST_CASE("colex edges normalize glosses and reject bad rows") {
  const auto edges = parse_colex_edges("concept_a,concept_b,family_count\n Hand ,ARM,12\ntree,wood,3\n");
  CHECK(edges.count("arm", "hand") == 12);
  CHECK(edges.count("hand", "arm") == 12);
  CHECK(edges.count("hand", "tree") == 0);
  CHECK_THROWS_AS(parse_colex_edges("a,a,1\n"), Error);
  CHECK_THROWS_AS(parse_colex_edges("a,b,1\nb,a,2\n"), Error);
  CHECK_THROWS_AS(parse_colex_edges("a,b,1.5\n"), Error);
  CHECK_THROWS_AS(parse_colex_edges("a,b,-1\n"), Error);
}
