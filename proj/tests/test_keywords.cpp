#include <catch2/catch_amalgamated.hpp>

#include "leakforge/keywords.hpp"
#include "leakforge/stopwords.hpp"

#include <filesystem>
#include <set>
#include <string>

using namespace leakforge;

TEST_CASE("stopword list is the fixed 179-word english set", "[keywords]") {
    const StopwordList& stop = bundled_stopwords();
    CHECK(stop.words.size() == 179);
    CHECK(stop.version_tag == "english-179-v1");
    for (const std::string& w : stop.words) {
        for (char c : w) CHECK((c == '\'' || (c >= 'a' && c <= 'z')));
    }
    CHECK(stop.contains("the"));
    CHECK(stop.contains("over"));
    CHECK_FALSE(stop.contains("quick"));
}

TEST_CASE("tokenize splits on whitespace runs only", "[keywords]") {
    CHECK(tokenize("The quick  brown") == std::vector<std::string>{"The", "quick", "brown"});
    CHECK(tokenize("") == std::vector<std::string>{});
    CHECK(tokenize("jumps over the lazy dog.") ==
          std::vector<std::string>{"jumps", "over", "the", "lazy", "dog."});
    CHECK(tokenize("  \t a\nb  ") == std::vector<std::string>{"a", "b"});
}

TEST_CASE("filter_and_normalize applies steps 2-5 in order", "[keywords]") {
    const StopwordList& stop = bundled_stopwords();
    CHECK(filter_and_normalize({"The", "quick", "dog."}, stop) == std::vector<std::string>{"quick"});
    CHECK(filter_and_normalize({"ab"}, stop).empty());
    CHECK(filter_and_normalize({"Antidisestablishmentarianism"}, stop).empty());  // 28 chars
    // a word that lowercases into a stopword is dropped
    CHECK(filter_and_normalize({"OVER", "Fox"}, stop) == std::vector<std::string>{"fox"});
    // containment semantics: punctuation discards the whole word
    CHECK(filter_and_normalize({"don't", "end-of-day"}, stop).empty());
}

TEST_CASE("to_keyword_doc reproduces the worked sentence", "[keywords]") {
    Document doc{"d1", "The quick brown fox jumps over the lazy dog", Origin::real};
    KeywordDoc kd = to_keyword_doc(doc, bundled_stopwords());
    CHECK(kd.stems == std::set<std::string>{"jump", "brown", "fox", "lazi", "dog", "quick"});
}

TEST_CASE("to_keyword_doc edge cases", "[keywords]") {
    const StopwordList& stop = bundled_stopwords();
    CHECK(to_keyword_doc(Document{"d", "", Origin::real}, stop).stems.empty());
    CHECK(to_keyword_doc(Document{"d", "run running runs", Origin::real}, stop).stems ==
          std::set<std::string>{"run"});
}

TEST_CASE("to_keyword_doc invariants over arbitrary bodies", "[keywords]") {
    const StopwordList& stop = bundled_stopwords();
    const std::string bodies[] = {
        "Hello, World! it's 2024 and the Meeting is at 3pm...",
        "alpha beta GAMMA delta-epsilon zeta    eta theta",
        "aa bbb cccc ddddd eeeeee fff GG hh I jj kkk",
    };
    for (const std::string& body : bodies) {
        Document doc{"d", body, Origin::real};
        KeywordDoc kd = to_keyword_doc(doc, stop);
        KeywordDoc again = to_keyword_doc(doc, stop);
        CHECK(kd.stems == again.stems);  // pure function
        CHECK(kd.stems.size() <= tokenize(body).size());
        for (const std::string& s : kd.stems) {
            CHECK(!s.empty());
            for (char c : s) CHECK((c >= 'a' && c <= 'z'));
        }
    }
}

TEST_CASE("keyword file round-trips with sorted stems", "[keywords]") {
    namespace fs = std::filesystem;
    fs::path tmp = fs::temp_directory_path() / "lf_test_keywords.jsonl";
    std::vector<KeywordDoc> docs{{"b", {"zeta", "alpha"}}, {"a", {"mid"}}};
    write_keyword_file(tmp, docs);
    std::vector<KeywordDoc> back = read_keyword_file(tmp);
    REQUIRE(back.size() == 2);
    CHECK(back[0].doc_id == "b");
    CHECK(back[0].stems == std::set<std::string>{"alpha", "zeta"});
    CHECK(back[1].stems == std::set<std::string>{"mid"});
    fs::remove(tmp);
}
