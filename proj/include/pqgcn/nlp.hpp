#ifndef PQGCN_NLP_HPP
#define PQGCN_NLP_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "pqgcn/common.hpp"

namespace pqgcn::nlp {

enum class Tag : uint8_t {
    ADJ, ADP, ADV, AUX, CONJ, DET, NOUN, NUM, PART, PRON, PROPN, VERB, X
};
constexpr int kTagCount = 13;

const char* tag_name(Tag tag);
std::optional<Tag> tag_from_name(std::string_view name);

// Single-letter codes used by pattern regexes:
//   ADJ=J ADP=I ADV=R AUX=A CONJ=C DET=D NOUN=N NUM=M PART=T PRON=O PROPN=Q VERB=V X=X
char tag_code(Tag tag);
std::optional<Tag> tag_from_code(char code);

struct TaggedToken {
    std::string token;
    Tag tag;
};

class Tagger {
public:
    virtual ~Tagger() = default;
    // one tag per token; total (never fails)
    virtual std::vector<Tag> tag(const std::vector<std::string>& tokens) const = 0;
};

// Closed-class word lexicon plus suffix heuristics; final fallback NOUN.
class HeuristicTagger : public Tagger {
public:
    HeuristicTagger();
    std::vector<Tag> tag(const std::vector<std::string>& tokens) const override;
    Tag tag_one(const std::string& token) const;

private:
    std::unordered_map<std::string, Tag> lexicon_;
};

// Serves tags recorded offline in a `token/TAG` file (one question per line);
// questions not present in the file fall back to the heuristic tagger.
class PretaggedTagger : public Tagger {
public:
    explicit PretaggedTagger(const std::string& path);
    std::vector<Tag> tag(const std::vector<std::string>& tokens) const override;

private:
    std::unordered_map<std::string, std::vector<Tag>> by_sentence_;
    HeuristicTagger fallback_;
    mutable bool warned_ = false;
};

std::vector<TaggedToken> tag_tokens(const std::vector<std::string>& tokens,
                                    const Tagger& tagger);

enum class PhraseKind { NounPhrase, VerbPhrase };
const char* phrase_kind_name(PhraseKind kind);

struct PhraseMatch {
    std::string text;              // space-joined matched tokens
    std::vector<Tag> tag_seq;
    std::string phrase_tag;        // tag names joined with "_"
    int start = 0, end = 0;        // token span [start, end)
    PhraseKind kind = PhraseKind::NounPhrase;
};

// Regex over single-letter tag codes, compiled to a Thompson NFA so matching
// is leftmost-longest (the std::regex ECMAScript rule is leftmost-first,
// which silently prefers the earlier alternative). Supported syntax:
// literals, classes [JN], groups ( ), alternation |, postfix ? * +.
class TagRegex {
public:
    static TagRegex compile(std::string_view pattern);
    // length of the longest match starting exactly at `start`, 0 if none
    int longest_match(std::string_view codes, int start) const;
    const std::string& pattern() const { return pattern_; }

private:
    struct State {
        // -1 = no char transition; otherwise a bitmask over tag codes
        uint32_t char_mask = 0;
        int char_next = -1;
        int eps[2] = {-1, -1};
    };
    std::string pattern_;
    std::vector<State> states_;
    int start_ = 0;
    int accept_ = 0;

    friend class TagRegexCompiler;
};

struct PatternSet {
    struct Entry {
        PhraseKind kind;
        TagRegex regex;
    };
    std::vector<Entry> entries;

    // NP: (DET)?(ADJ)*(NOUN|PROPN)+ and (ADJ)(NOUN); VP: (AUX)?(VERB)+(PART|ADP)?
    static PatternSet defaults();
    // one `kind<TAB>regex` per line; kind is noun_phrase or verb_phrase;
    // '#' lines and blank lines are skipped
    static PatternSet load(const std::string& path);
};

// Leftmost-longest, non-overlapping matches per phrase kind, scanned left to
// right; noun and verb matches may overlap each other. Result sorted by span.
std::vector<PhraseMatch> extract_phrases(const std::vector<TaggedToken>& tagged,
                                         const PatternSet& patterns);

struct EntityMatch {
    std::string surface;       // space-joined matched tokens, a lexicon key
    int start = 0, end = 0;    // token span [start, end)
};

class EntityLexicon {
public:
    // one surface form per line, cleaned with corpus::clean_text rules
    static EntityLexicon load(const std::string& path);
    void add(std::string_view surface);
    bool contains(const std::string& surface) const { return surfaces_.count(surface) > 0; }
    bool empty() const { return surfaces_.empty(); }
    size_t size() const { return surfaces_.size(); }
    int max_tokens() const { return max_tokens_; }

private:
    std::unordered_set<std::string> surfaces_;
    int max_tokens_ = 0;
};

// Greedy longest-match-first over token n-grams, non-overlapping, left to right.
std::vector<EntityMatch> match_entities(std::string_view clean_text,
                                        const EntityLexicon& lexicon);

}  // namespace pqgcn::nlp

#endif
