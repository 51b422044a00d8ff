//! Closed word lists and suffix rules used by the span chunker, the question
//! generator and the lexical QA baseline. All lookups take lowercase input.

pub(crate) const DETERMINERS: &[&str] = &[
    "the", "a", "an", "this", "that", "these", "those", "his", "her", "its", "their", "our", "my",
    "your", "some", "several", "many", "each", "every", "another",
];

pub(crate) const AUX_BE: &[&str] = &["am", "is", "are", "was", "were", "be", "been", "being"];
pub(crate) const AUX_HAVE: &[&str] = &["has", "have", "had"];
pub(crate) const AUX_DO: &[&str] = &["do", "does", "did"];
pub(crate) const MODALS: &[&str] = &[
    "can", "could", "will", "would", "shall", "should", "may", "might", "must",
];

const OTHER_FUNCTION_WORDS: &[&str] = &[
    "i", "you", "he", "she", "it", "we", "they", "me", "him", "us", "them", "who", "whom", "whose",
    "what", "which", "when", "where", "why", "how", "and", "or", "but", "nor", "so", "yet", "if",
    "then", "than", "because", "while", "although", "though", "however", "also", "not", "no",
    "of", "in", "on", "at", "to", "for", "from", "by", "with", "about", "after", "before", "since",
    "during", "into", "onto", "over", "under", "between", "through", "across", "near", "around",
    "against", "without", "within", "outside", "inside", "throughout", "up", "down", "out", "off",
    "as", "there", "here", "few", "more", "most", "less", "least", "very", "just", "only", "even",
    "still", "already", "again", "all", "both", "any", "such", "other", "own", "same", "too",
    "almost", "nearly", "about", "around", "roughly", "approximately", "some", "long", "much",
    "now", "then", "once", "ago", "last", "next", "later", "earlier",
];

pub(crate) const WH_WORDS: &[&str] = &["who", "whom", "whose", "what", "which", "when", "where", "why", "how"];

pub(crate) const MONTHS: &[&str] = &[
    "january", "february", "march", "april", "may", "june", "july", "august", "september",
    "october", "november", "december",
];

pub(crate) const WEEKDAYS: &[&str] = &[
    "monday", "tuesday", "wednesday", "thursday", "friday", "saturday", "sunday",
];

pub(crate) const TIME_UNITS: &[&str] = &[
    "second", "seconds", "minute", "minutes", "hour", "hours", "day", "days", "week", "weeks",
    "month", "months", "year", "years", "decade", "decades", "century", "centuries",
];

pub(crate) const NUMBER_WORDS: &[&str] = &[
    "one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten", "eleven",
    "twelve", "thirteen", "fourteen", "fifteen", "sixteen", "seventeen", "eighteen", "nineteen",
    "twenty", "thirty", "forty", "fifty", "sixty", "seventy", "eighty", "ninety", "hundred",
    "thousand", "million", "billion", "dozen", "dozens", "hundreds", "thousands", "millions",
];

pub(crate) const TITLES: &[&str] = &["mr", "mrs", "ms", "miss", "dr", "sir", "dame", "lord", "lady", "prof"];

/// Capitalized job titles that precede a name without being part of it.
pub(crate) const ROLE_NOUNS: &[&str] = &[
    "winger", "striker", "midfielder", "defender", "goalkeeper", "captain", "coach", "manager",
    "president", "chancellor", "minister", "senator", "governor", "judge", "officer", "spokesman",
    "spokeswoman", "chairman", "director", "inspector", "detective", "sergeant", "constable",
    "professor", "author", "singer", "actor", "actress", "chef", "king", "queen", "prince",
    "princess", "duke", "duchess",
];

pub(crate) const ORG_KEYWORDS: &[&str] = &[
    "league", "club", "university", "college", "school", "hospital", "inspectorate", "party",
    "council", "police", "association", "company", "corporation", "inc", "ltd", "trust", "museum",
    "court", "government", "ministry", "department", "agency", "committee", "olympics", "cup",
    "championship", "airlines", "airways", "news", "times", "bank", "group", "foundation",
    "institute", "service", "army", "navy", "force", "united", "city", "fc", "commission",
];

pub(crate) const LOCATIVE_PREPOSITIONS: &[&str] = &[
    "in", "at", "from", "near", "across", "into", "outside", "inside", "throughout", "to",
];

/// Adverbs that modify a following quantity and are dropped with it.
pub(crate) const SPAN_MODIFIERS: &[&str] = &[
    "almost", "nearly", "about", "around", "roughly", "approximately", "over", "just", "only",
];

/// Irregular past tense / participle forms and their base forms.
pub(crate) const IRREGULAR: &[(&str, &str)] = &[
    ("ate", "eat"), ("eaten", "eat"), ("went", "go"), ("gone", "go"), ("saw", "see"),
    ("seen", "see"), ("took", "take"), ("taken", "take"), ("made", "make"), ("said", "say"),
    ("gave", "give"), ("given", "give"), ("came", "come"), ("found", "find"), ("got", "get"),
    ("told", "tell"), ("left", "leave"), ("won", "win"), ("lost", "lose"), ("met", "meet"),
    ("began", "begin"), ("begun", "begin"), ("brought", "bring"), ("bought", "buy"),
    ("built", "build"), ("caught", "catch"), ("chose", "choose"), ("chosen", "choose"),
    ("drew", "draw"), ("drawn", "draw"), ("drove", "drive"), ("driven", "drive"),
    ("fell", "fall"), ("fallen", "fall"), ("felt", "feel"), ("flew", "fly"), ("flown", "fly"),
    ("forgot", "forget"), ("forgotten", "forget"), ("grew", "grow"), ("grown", "grow"),
    ("heard", "hear"), ("held", "hold"), ("kept", "keep"), ("knew", "know"), ("known", "know"),
    ("led", "lead"), ("ran", "run"), ("sold", "sell"), ("sent", "send"), ("sat", "sit"),
    ("spoke", "speak"), ("spoken", "speak"), ("spent", "spend"), ("stood", "stand"),
    ("thought", "think"), ("threw", "throw"), ("thrown", "throw"), ("wrote", "write"),
    ("written", "write"), ("became", "become"), ("paid", "pay"), ("struck", "strike"),
    ("rose", "rise"), ("risen", "rise"), ("shot", "shoot"), ("taught", "teach"),
    ("understood", "understand"), ("wore", "wear"), ("worn", "wear"), ("broke", "break"),
    ("broken", "break"), ("hid", "hide"), ("hidden", "hide"), ("fought", "fight"),
    ("sang", "sing"), ("sung", "sing"), ("swam", "swim"), ("born", "bear"), ("died", "die"),
    ("lay", "lie"), ("laid", "lay"), ("beat", "beat"), ("beaten", "beat"), ("hit", "hit"),
    ("put", "put"), ("read", "read"), ("set", "set"), ("cut", "cut"), ("let", "let"),
    ("stole", "steal"), ("stolen", "steal"), ("rode", "ride"), ("ridden", "ride"),
    ("woke", "wake"), ("woken", "wake"), ("froze", "freeze"), ("frozen", "freeze"),
    ("fed", "feed"), ("fled", "flee"), ("dealt", "deal"), ("meant", "mean"), ("lent", "lend"),
    ("sought", "seek"), ("slept", "sleep"), ("swept", "sweep"), ("wept", "weep"), ("won", "win"),
    ("was", "be"), ("were", "be"), ("been", "be"), ("had", "have"), ("has", "have"),
    ("did", "do"), ("done", "do"), ("does", "do"),
];

/// Participles that appear after a bare `born`-style passive or perfect.
const IRREGULAR_PARTICIPLES_ONLY: &[&str] = &["born", "been", "done"];

pub(crate) fn is_function_word(w: &str) -> bool {
    DETERMINERS.contains(&w)
        || AUX_BE.contains(&w)
        || AUX_HAVE.contains(&w)
        || AUX_DO.contains(&w)
        || MODALS.contains(&w)
        || OTHER_FUNCTION_WORDS.contains(&w)
}

pub(crate) fn is_auxiliary(w: &str) -> bool {
    AUX_BE.contains(&w) || AUX_HAVE.contains(&w) || AUX_DO.contains(&w) || MODALS.contains(&w)
}

pub(crate) fn irregular_base(w: &str) -> Option<&'static str> {
    IRREGULAR.iter().find(|(form, _)| *form == w).map(|(_, base)| *base)
}

fn is_vowel(c: char) -> bool {
    matches!(c, 'a' | 'e' | 'i' | 'o' | 'u')
}

/// Looks like a past tense or past participle.
pub(crate) fn is_past_form(w: &str) -> bool {
    (irregular_base(w).is_some() && !AUX_DO.contains(&w) && w != "has")
        || IRREGULAR_PARTICIPLES_ONLY.contains(&w)
        || (w.len() > 3 && w.ends_with("ed") && w.chars().all(char::is_alphabetic))
}

/// Participle heuristic used to tell perfect `has` from possessive `has`.
pub(crate) fn is_participle(w: &str) -> bool {
    is_past_form(w) || (w.len() > 4 && w.ends_with("en") && w.chars().all(char::is_alphabetic))
}

/// Base form of a verb, from a closed irregular table and suffix rules.
pub(crate) fn lemmatize_verb(w: &str) -> String {
    let w = w.to_lowercase();
    if let Some(base) = irregular_base(&w) {
        return base.to_string();
    }
    if let Some(stem) = w.strip_suffix("ied") {
        return format!("{stem}y");
    }
    if let Some(stem) = w.strip_suffix("ed").filter(|s| s.len() >= 2) {
        return restore_stem(stem);
    }
    if let Some(stem) = w.strip_suffix("ies").filter(|s| s.len() >= 2) {
        return format!("{stem}y");
    }
    for suffix in ["sses", "ches", "shes", "xes", "zes", "oes"] {
        if w.ends_with(suffix) {
            return w[..w.len() - 2].to_string();
        }
    }
    if let Some(stem) = w.strip_suffix('s').filter(|s| s.len() >= 2 && !s.ends_with('s')) {
        return stem.to_string();
    }
    w
}

fn restore_stem(stem: &str) -> String {
    let chars: Vec<char> = stem.chars().collect();
    let n = chars.len();
    if n >= 2 && chars[n - 1] == chars[n - 2] && !is_vowel(chars[n - 1]) && !matches!(chars[n - 1], 'l' | 's' | 'z' | 'f') {
        return chars[..n - 1].iter().collect();
    }
    if matches!(chars[n - 1], 'v' | 'z' | 'c' | 'u') {
        return format!("{stem}e");
    }
    let vowel_groups = chars
        .iter()
        .enumerate()
        .filter(|&(i, &c)| is_vowel(c) && (i == 0 || !is_vowel(chars[i - 1])))
        .count();
    let cvc = n >= 3
        && !is_vowel(chars[n - 3])
        && is_vowel(chars[n - 2])
        && !is_vowel(chars[n - 1])
        && !matches!(chars[n - 1], 'w' | 'x' | 'y');
    if vowel_groups == 1 && cvc {
        return format!("{stem}e");
    }
    stem.to_string()
}

/// Coarse stem used only for overlap matching: `visited`, `visits` and
/// `visit` share a key, as do `lived` and `live`.
pub(crate) fn match_key(w: &str) -> String {
    let w = w.to_lowercase();
    if let Some(base) = irregular_base(&w) {
        return base.to_string();
    }
    let mut key = w.as_str();
    for suffix in ["ing", "ed", "es", "s"] {
        if let Some(stem) = key.strip_suffix(suffix) {
            if stem.chars().count() >= 3 {
                key = stem;
                break;
            }
        }
    }
    let key = if key.chars().count() > 3 {
        key.strip_suffix('e').unwrap_or(key)
    } else {
        key
    };
    key.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lemmatizer() {
        for (form, base) in [
            ("ate", "eat"),
            ("visited", "visit"),
            ("lived", "live"),
            ("hoped", "hope"),
            ("stopped", "stop"),
            ("called", "call"),
            ("played", "play"),
            ("carried", "carry"),
            ("watches", "watch"),
            ("eats", "eat"),
            ("has", "have"),
            ("landed", "land"),
            ("moved", "move"),
            ("looked", "look"),
            ("return", "return"),
        ] {
            assert_eq!(lemmatize_verb(form), base, "{form}");
        }
    }

    #[test]
    fn match_keys_unify_inflections() {
        assert_eq!(match_key("visited"), match_key("visit"));
        assert_eq!(match_key("lived"), match_key("live"));
        assert_eq!(match_key("lives"), match_key("live"));
        assert_eq!(match_key("ate"), match_key("eat"));
        assert_eq!(match_key("returns"), "return");
    }

    #[test]
    fn past_forms() {
        assert!(is_past_form("born"));
        assert!(is_past_form("landed"));
        assert!(is_past_form("ate"));
        assert!(!is_past_form("red"));
        assert!(!is_past_form("did"));
        assert!(!is_past_form("plane"));
    }
}
