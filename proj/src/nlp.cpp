#include "pqgcn/nlp.hpp"

#include <algorithm>
#include <sstream>

#include "pqgcn/corpus.hpp"

namespace pqgcn::nlp {

namespace {

struct TagInfo {
    Tag tag;
    const char* name;
    char code;
};

constexpr TagInfo kTagTable[kTagCount] = {
    {Tag::ADJ, "ADJ", 'J'},   {Tag::ADP, "ADP", 'I'},     {Tag::ADV, "ADV", 'R'},
    {Tag::AUX, "AUX", 'A'},   {Tag::CONJ, "CONJ", 'C'},   {Tag::DET, "DET", 'D'},
    {Tag::NOUN, "NOUN", 'N'}, {Tag::NUM, "NUM", 'M'},     {Tag::PART, "PART", 'T'},
    {Tag::PRON, "PRON", 'O'}, {Tag::PROPN, "PROPN", 'Q'}, {Tag::VERB, "VERB", 'V'},
    {Tag::X, "X", 'X'},
};

}  // namespace

const char* tag_name(Tag tag) { return kTagTable[static_cast<int>(tag)].name; }

std::optional<Tag> tag_from_name(std::string_view name) {
    for (const auto& t : kTagTable) {
        if (name == t.name) return t.tag;
    }
    return std::nullopt;
}

char tag_code(Tag tag) { return kTagTable[static_cast<int>(tag)].code; }

std::optional<Tag> tag_from_code(char code) {
    for (const auto& t : kTagTable) {
        if (code == t.code) return t.tag;
    }
    return std::nullopt;
}

const char* phrase_kind_name(PhraseKind kind) {
    return kind == PhraseKind::NounPhrase ? "noun_phrase" : "verb_phrase";
}

// ---------------------------------------------------------------------------
// HeuristicTagger
// ---------------------------------------------------------------------------

HeuristicTagger::HeuristicTagger() {
    auto add_all = [this](std::initializer_list<const char*> words, Tag tag) {
        for (const char* w : words) lexicon_.emplace(w, tag);
    };
    add_all({"the", "a", "an", "this", "that", "these", "those", "each", "every",
             "either", "neither", "both", "all", "some", "any", "no", "another",
             "such", "which"},
            Tag::DET);
    add_all({"i", "you", "he", "she", "it", "we", "they", "me", "him", "her", "us",
             "them", "mine", "yours", "his", "hers", "ours", "theirs", "myself",
             "yourself", "himself", "herself", "itself", "ourselves", "yourselves",
             "themselves", "who", "whom", "whose", "what", "someone", "anyone",
             "everyone", "somebody", "anybody", "everybody", "nobody", "something",
             "anything", "everything", "nothing"},
            Tag::PRON);
    add_all({"where", "when", "why", "how", "very", "too", "also", "just", "only",
             "even", "still", "never", "always", "often", "sometimes", "usually",
             "rarely", "again", "once", "twice", "here", "there", "now", "then",
             "soon", "already", "almost", "quite", "rather", "really", "perhaps",
             "maybe", "more", "most", "less", "least", "further", "however"},
            Tag::ADV);
    add_all({"is", "are", "was", "were", "am", "be", "been", "being", "do", "does",
             "did", "have", "has", "had", "will", "would", "can", "could", "shall",
             "should", "may", "might", "must", "ought"},
            Tag::AUX);
    add_all({"of", "in", "on", "at", "by", "for", "with", "from", "about", "into",
             "over", "under", "between", "among", "through", "during", "against",
             "within", "without", "upon", "across", "behind", "beyond", "near",
             "above", "below", "off", "around", "toward", "towards", "per", "via",
             "onto"},
            Tag::ADP);
    add_all({"and", "or", "but", "nor", "because", "although", "though", "whether",
             "while", "if", "unless", "since"},
            Tag::CONJ);
    add_all({"not", "to"}, Tag::PART);
    add_all({"zero", "one", "two", "three", "four", "five", "six", "seven", "eight",
             "nine", "ten", "eleven", "twelve", "twenty", "thirty", "forty", "fifty",
             "sixty", "seventy", "eighty", "ninety", "hundred", "thousand",
             "million", "billion"},
            Tag::NUM);
    add_all({"discuss", "describe", "explain", "define", "compare", "contrast",
             "solve", "find", "calculate", "identify", "give", "tell", "write",
             "draw", "derive", "evaluate", "analyze", "analyse", "determine",
             "show", "prove", "express", "convert", "measure", "classify",
             "outline", "summarize", "summarise", "illustrate", "mention",
             "differentiate", "distinguish", "enumerate", "justify", "predict",
             "estimate", "implement", "apply", "demonstrate", "examine",
             "interpret", "locate", "recall", "recognize", "recognise", "relate",
             "select", "translate", "construct", "develop", "organize", "organise",
             "produce", "propose", "create", "compose", "formulate", "assess",
             "argue", "critique", "judge", "defend", "appraise", "recommend",
             "use", "make", "take", "get", "go", "come", "say", "know", "think",
             "see", "want", "mean", "need", "work", "help", "call", "ask",
             "answer", "read", "play", "run", "move", "live", "believe", "bring",
             "begin", "keep", "hold", "stand", "hear", "let", "put", "set",
             "seem", "turn", "start", "include", "provide", "serve", "cause",
             "become", "leave", "feel", "consider", "suggest", "occur", "happen",
             "affect", "improve", "reduce", "increase", "obtain", "perform",
             "involve", "represent", "indicate"},
            Tag::VERB);
    add_all({"main", "major", "minor", "good", "bad", "new", "old", "first",
             "second", "third", "high", "low", "large", "small", "big", "little",
             "long", "short", "great", "important", "common", "different", "same",
             "similar", "various", "several", "many", "few", "much", "early",
             "late", "young", "best", "worst", "better", "worse", "true", "false",
             "real", "possible", "difficult", "easy", "hard", "free", "full",
             "empty", "general", "specific", "particular", "certain", "electric",
             "electrical", "chemical", "physical", "biological", "mathematical",
             "scientific", "human", "natural", "social", "economic", "political",
             "historical", "cultural", "famous", "ancient", "modern", "primary",
             "secondary"},
            Tag::ADJ);
    // words the suffix rules below would mistag
    add_all({"objective", "alternative", "initiative", "representative", "native",
             "family", "supply", "thing", "king", "ring", "wing", "string",
             "spring", "morning", "evening", "music", "topic", "logic", "magic",
             "traffic"},
            Tag::NOUN);
}

Tag HeuristicTagger::tag_one(const std::string& token) const {
    if (token.empty()) return Tag::X;
    if (auto it = lexicon_.find(token); it != lexicon_.end()) return it->second;
    if (token[0] >= '0' && token[0] <= '9') return Tag::NUM;
    size_t n = token.size();
    if (n >= 5 && ends_with(token, "ing")) return Tag::VERB;
    if (n >= 4 && ends_with(token, "ed")) return Tag::VERB;
    if (n >= 4 && ends_with(token, "ly")) return Tag::ADV;
    for (const char* suf : {"ous", "ful", "ive", "able", "ible", "ic", "less", "ish"}) {
        std::string_view sv(suf);
        if (n > sv.size() + 1 && ends_with(token, sv)) return Tag::ADJ;
    }
    return Tag::NOUN;
}

std::vector<Tag> HeuristicTagger::tag(const std::vector<std::string>& tokens) const {
    std::vector<Tag> out;
    out.reserve(tokens.size());
    for (const auto& t : tokens) out.push_back(tag_one(t));
    return out;
}

// ---------------------------------------------------------------------------
// PretaggedTagger
// ---------------------------------------------------------------------------

PretaggedTagger::PretaggedTagger(const std::string& path) {
    std::istringstream in(read_text_file(path));
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> words;
        std::vector<Tag> tags;
        for (const auto& piece : split_ws(line)) {
            size_t slash = piece.rfind('/');
            if (slash == std::string::npos || slash == 0 || slash + 1 == piece.size()) {
                throw config_error("nlp: " + path + ":" + std::to_string(line_no) +
                                   ": expected `token/TAG`, got '" + piece + "'");
            }
            auto tag = tag_from_name(piece.substr(slash + 1));
            if (!tag) {
                throw config_error("nlp: " + path + ":" + std::to_string(line_no) +
                                   ": unknown tag '" + piece.substr(slash + 1) + "'");
            }
            words.push_back(piece.substr(0, slash));
            tags.push_back(*tag);
        }
        by_sentence_[join(words, " ")] = std::move(tags);
    }
}

std::vector<Tag> PretaggedTagger::tag(const std::vector<std::string>& tokens) const {
    auto it = by_sentence_.find(join(tokens, " "));
    if (it != by_sentence_.end()) return it->second;
    if (!warned_) {
        warn("nlp: sentence not covered by the pre-tagged file; using the heuristic tagger");
        warned_ = true;
    }
    return fallback_.tag(tokens);
}

std::vector<TaggedToken> tag_tokens(const std::vector<std::string>& tokens,
                                    const Tagger& tagger) {
    std::vector<Tag> tags = tagger.tag(tokens);
    std::vector<TaggedToken> out;
    out.reserve(tokens.size());
    for (size_t i = 0; i < tokens.size(); ++i) out.push_back({tokens[i], tags[i]});
    return out;
}

// ---------------------------------------------------------------------------
// TagRegex: Thompson NFA with leftmost-longest matching
// ---------------------------------------------------------------------------

class TagRegexCompiler {
public:
    explicit TagRegexCompiler(std::string_view pattern) : pattern_(pattern) {}

    TagRegex compile() {
        TagRegex re;
        re.pattern_ = std::string(pattern_);
        states_ = &re.states_;
        Frag frag = parse_alternation();
        if (pos_ != pattern_.size()) fail("unexpected ')'");
        int accept = new_state();
        patch(frag.out, accept);
        re.start_ = frag.start;
        re.accept_ = accept;
        states_ = nullptr;
        return re;
    }

private:
    // a dangling transition slot waiting for its target state
    enum Slot { kCharNext, kEps0, kEps1 };
    struct Dangling {
        int state;
        Slot slot;
    };
    struct Frag {
        int start;
        std::vector<Dangling> out;
    };

    std::string_view pattern_;
    size_t pos_ = 0;
    std::vector<TagRegex::State>* states_ = nullptr;

    [[noreturn]] void fail(const std::string& why) {
        throw config_error("nlp: bad tag pattern '" + std::string(pattern_) + "': " + why);
    }

    int new_state() {
        states_->push_back({});
        return static_cast<int>(states_->size()) - 1;
    }

    void patch(const std::vector<Dangling>& out, int target) {
        for (const auto& d : out) {
            auto& s = (*states_)[d.state];
            if (d.slot == kCharNext) s.char_next = target;
            else if (d.slot == kEps0) s.eps[0] = target;
            else s.eps[1] = target;
        }
    }

    uint32_t code_bit(char c) {
        auto tag = tag_from_code(c);
        if (!tag) fail(std::string("unknown tag code '") + c + "'");
        return 1u << static_cast<int>(*tag);
    }

    bool peek_is(char c) const { return pos_ < pattern_.size() && pattern_[pos_] == c; }

    Frag parse_alternation() {
        Frag left = parse_concat();
        while (peek_is('|')) {
            ++pos_;
            Frag right = parse_concat();
            int split = new_state();
            (*states_)[split].eps[0] = left.start;
            (*states_)[split].eps[1] = right.start;
            left.out.insert(left.out.end(), right.out.begin(), right.out.end());
            left.start = split;
        }
        return left;
    }

    Frag parse_concat() {
        std::optional<Frag> acc;
        while (pos_ < pattern_.size() && pattern_[pos_] != '|' && pattern_[pos_] != ')') {
            Frag next = parse_repeat();
            if (!acc) {
                acc = next;
            } else {
                patch(acc->out, next.start);
                acc->out = next.out;
            }
        }
        if (!acc) {
            int s = new_state();
            return {s, {{s, kEps0}}};
        }
        return *acc;
    }

    Frag parse_repeat() {
        Frag frag = parse_atom();
        while (pos_ < pattern_.size()) {
            char c = pattern_[pos_];
            if (c == '?') {
                ++pos_;
                int split = new_state();
                (*states_)[split].eps[0] = frag.start;
                frag.out.push_back({split, kEps1});
                frag.start = split;
            } else if (c == '*') {
                ++pos_;
                int split = new_state();
                (*states_)[split].eps[0] = frag.start;
                patch(frag.out, split);
                frag = {split, {{split, kEps1}}};
            } else if (c == '+') {
                ++pos_;
                int split = new_state();
                (*states_)[split].eps[0] = frag.start;
                patch(frag.out, split);
                frag.out = {{split, kEps1}};
            } else {
                break;
            }
        }
        return frag;
    }

    Frag parse_atom() {
        if (pos_ >= pattern_.size()) fail("pattern ends where a tag code was expected");
        char c = pattern_[pos_];
        if (c == '(') {
            ++pos_;
            Frag inner = parse_alternation();
            if (!peek_is(')')) fail("missing ')'");
            ++pos_;
            return inner;
        }
        if (c == '[') {
            ++pos_;
            uint32_t mask = 0;
            while (pos_ < pattern_.size() && pattern_[pos_] != ']') {
                mask |= code_bit(pattern_[pos_]);
                ++pos_;
            }
            if (!peek_is(']')) fail("missing ']'");
            if (mask == 0) fail("empty class");
            ++pos_;
            int s = new_state();
            (*states_)[s].char_mask = mask;
            return {s, {{s, kCharNext}}};
        }
        if (c == '?' || c == '*' || c == '+' || c == ')' || c == ']') {
            fail(std::string("unexpected '") + c + "'");
        }
        ++pos_;
        int s = new_state();
        (*states_)[s].char_mask = code_bit(c);
        return {s, {{s, kCharNext}}};
    }
};

TagRegex TagRegex::compile(std::string_view pattern) {
    if (pattern.empty()) throw config_error("nlp: empty tag pattern");
    return TagRegexCompiler(pattern).compile();
}

int TagRegex::longest_match(std::string_view codes, int start) const {
    std::vector<uint8_t> in_set(states_.size(), 0);
    std::vector<int> current;

    auto add = [&](int s, auto&& self) -> void {
        if (s < 0 || in_set[s]) return;
        in_set[s] = 1;
        current.push_back(s);
        const State& st = states_[s];
        if (st.char_mask == 0) {
            self(st.eps[0], self);
            self(st.eps[1], self);
        }
    };

    add(start_, add);
    int best = 0;  // zero-length matches are discarded
    for (int pos = start; pos < static_cast<int>(codes.size()); ++pos) {
        auto tag = tag_from_code(codes[pos]);
        uint32_t bit = tag ? (1u << static_cast<int>(*tag)) : 0;
        std::vector<int> prev;
        prev.swap(current);
        std::fill(in_set.begin(), in_set.end(), 0);
        for (int s : prev) {
            const State& st = states_[s];
            if (st.char_mask & bit) add(st.char_next, add);
        }
        if (current.empty()) break;
        if (in_set[accept_]) best = pos - start + 1;
    }
    return best;
}

// ---------------------------------------------------------------------------
// PatternSet and phrase extraction
// ---------------------------------------------------------------------------

PatternSet PatternSet::defaults() {
    PatternSet p;
    p.entries.push_back({PhraseKind::NounPhrase, TagRegex::compile("D?J*[NQ]+")});
    p.entries.push_back({PhraseKind::NounPhrase, TagRegex::compile("JN")});
    p.entries.push_back({PhraseKind::VerbPhrase, TagRegex::compile("A?V+[TI]?")});
    return p;
}

PatternSet PatternSet::load(const std::string& path) {
    PatternSet p;
    std::istringstream in(read_text_file(path));
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        size_t tab = line.find('\t');
        if (tab == std::string::npos) {
            throw config_error("nlp: " + path + ":" + std::to_string(line_no) +
                               ": expected `kind<TAB>regex`");
        }
        std::string kind_name = line.substr(0, tab);
        PhraseKind kind;
        if (kind_name == "noun_phrase") kind = PhraseKind::NounPhrase;
        else if (kind_name == "verb_phrase") kind = PhraseKind::VerbPhrase;
        else {
            throw config_error("nlp: " + path + ":" + std::to_string(line_no) +
                               ": unknown phrase kind '" + kind_name + "'");
        }
        p.entries.push_back({kind, TagRegex::compile(line.substr(tab + 1))});
    }
    if (p.entries.empty()) {
        throw config_error("nlp: " + path + ": no patterns found");
    }
    return p;
}

std::vector<PhraseMatch> extract_phrases(const std::vector<TaggedToken>& tagged,
                                         const PatternSet& patterns) {
    std::string codes;
    codes.reserve(tagged.size());
    for (const auto& t : tagged) codes += tag_code(t.tag);

    std::vector<PhraseMatch> out;
    for (PhraseKind kind : {PhraseKind::NounPhrase, PhraseKind::VerbPhrase}) {
        int pos = 0;
        int n = static_cast<int>(tagged.size());
        while (pos < n) {
            int best = 0;
            for (const auto& entry : patterns.entries) {
                if (entry.kind != kind) continue;
                best = std::max(best, entry.regex.longest_match(codes, pos));
            }
            if (best == 0) {
                ++pos;
                continue;
            }
            PhraseMatch m;
            m.kind = kind;
            m.start = pos;
            m.end = pos + best;
            std::vector<std::string> words, names;
            for (int i = pos; i < pos + best; ++i) {
                words.push_back(tagged[i].token);
                names.push_back(tag_name(tagged[i].tag));
                m.tag_seq.push_back(tagged[i].tag);
            }
            m.text = join(words, " ");
            m.phrase_tag = join(names, "_");
            out.push_back(std::move(m));
            pos += best;
        }
    }
    std::sort(out.begin(), out.end(), [](const PhraseMatch& a, const PhraseMatch& b) {
        if (a.start != b.start) return a.start < b.start;
        if (a.end != b.end) return a.end < b.end;
        return static_cast<int>(a.kind) < static_cast<int>(b.kind);
    });
    return out;
}

// ---------------------------------------------------------------------------
// Entity matching
// ---------------------------------------------------------------------------

EntityLexicon EntityLexicon::load(const std::string& path) {
    EntityLexicon lex;
    std::istringstream in(read_text_file(path));
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lex.add(line);
    }
    return lex;
}

void EntityLexicon::add(std::string_view surface) {
    std::string cleaned = corpus::clean_text(surface);
    if (cleaned.empty()) return;
    int tokens = static_cast<int>(split_ws(cleaned).size());
    max_tokens_ = std::max(max_tokens_, tokens);
    surfaces_.insert(std::move(cleaned));
}

std::vector<EntityMatch> match_entities(std::string_view clean_text,
                                        const EntityLexicon& lexicon) {
    std::vector<EntityMatch> out;
    if (lexicon.empty()) return out;
    std::vector<std::string> tokens = split_ws(clean_text);
    int n = static_cast<int>(tokens.size());
    int i = 0;
    while (i < n) {
        int max_len = std::min(lexicon.max_tokens(), n - i);
        int matched = 0;
        for (int len = max_len; len >= 1; --len) {
            std::string candidate = tokens[i];
            for (int k = 1; k < len; ++k) {
                candidate += ' ';
                candidate += tokens[i + k];
            }
            if (lexicon.contains(candidate)) {
                out.push_back({std::move(candidate), i, i + len});
                matched = len;
                break;
            }
        }
        i += matched > 0 ? matched : 1;
    }
    return out;
}

}  // namespace pqgcn::nlp
