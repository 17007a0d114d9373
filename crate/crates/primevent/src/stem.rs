//! Classic Porter suffix-stripping stemmer (the original 1980 algorithm).
//!
//! The implementation follows the published rule tables, not the later
//! "Porter2"/Snowball revision, so e.g. `generalization` stems to `gener`
//! and `agreed` to `agre` exactly as the original algorithm prescribes.
//! Within a step the longest matching suffix is selected and consumes the
//! step whether or not its measure condition passes. Like the author's
//! reference implementation, words of one or two letters are returned
//! unchanged.

/// Stems a single lowercase ASCII word. Words containing anything other
/// than `a-z` are returned unchanged, as are words shorter than 3 letters.
pub fn stem(word: &str) -> String {
    if word.len() < 3 || !word.bytes().all(|b| b.is_ascii_lowercase()) {
        return word.to_string();
    }
    let mut w = Stemmer {
        b: word.as_bytes().to_vec(),
    };
    w.step1a();
    w.step1b();
    w.step1c();
    w.step2();
    w.step3();
    w.step4();
    w.step5a();
    w.step5b();
    String::from_utf8(w.b).expect("stemmer operates on ASCII")
}

struct Stemmer {
    b: Vec<u8>,
}

impl Stemmer {
    /// True when position `i` holds a consonant. `y` counts as a vowel
    /// only when preceded by a consonant.
    fn consonant(&self, i: usize) -> bool {
        match self.b[i] {
            b'a' | b'e' | b'i' | b'o' | b'u' => false,
            b'y' => i == 0 || !self.consonant(i - 1),
            _ => true,
        }
    }

    /// Porter's measure m of the prefix `b[..j]`: the number of
    /// vowel-consonant sequences in the form `[C](VC)^m[V]`.
    fn measure(&self, j: usize) -> usize {
        let mut m = 0;
        let mut i = 0;
        while i < j && self.consonant(i) {
            i += 1;
        }
        loop {
            while i < j && !self.consonant(i) {
                i += 1;
            }
            if i >= j {
                return m;
            }
            m += 1;
            while i < j && self.consonant(i) {
                i += 1;
            }
        }
    }

    /// True when the prefix `b[..j]` contains a vowel (`*v*`).
    fn vowel_in_stem(&self, j: usize) -> bool {
        (0..j).any(|i| !self.consonant(i))
    }

    /// True when the prefix `b[..j]` ends in a double consonant (`*d`).
    fn double_consonant(&self, j: usize) -> bool {
        j >= 2 && self.b[j - 1] == self.b[j - 2] && self.consonant(j - 1)
    }

    /// True when the prefix `b[..j]` ends consonant-vowel-consonant with
    /// the final consonant not `w`, `x` or `y` (`*o`).
    fn cvc(&self, j: usize) -> bool {
        j >= 3
            && self.consonant(j - 3)
            && !self.consonant(j - 2)
            && self.consonant(j - 1)
            && !matches!(self.b[j - 1], b'w' | b'x' | b'y')
    }

    fn ends(&self, suffix: &[u8]) -> bool {
        self.b.len() >= suffix.len() && self.b.ends_with(suffix)
    }

    /// Replaces the trailing `strip` bytes with `with`.
    fn set_suffix(&mut self, strip: usize, with: &[u8]) {
        let keep = self.b.len() - strip;
        self.b.truncate(keep);
        self.b.extend_from_slice(with);
    }

    /// Applies the first rule whose suffix matches (tables are ordered
    /// longest-first) when the stem before the suffix has measure greater
    /// than `min_measure`. A matching suffix consumes the step even when
    /// the measure condition fails.
    fn apply_table(&mut self, rules: &[(&[u8], &[u8])], min_measure: usize) {
        for &(suffix, with) in rules {
            if self.ends(suffix) {
                let stem_len = self.b.len() - suffix.len();
                if self.measure(stem_len) > min_measure {
                    self.set_suffix(suffix.len(), with);
                }
                return;
            }
        }
    }

    /// SSES -> SS, IES -> I, SS -> SS, S -> "".
    fn step1a(&mut self) {
        if self.ends(b"sses") {
            self.set_suffix(2, b"");
        } else if self.ends(b"ies") {
            self.set_suffix(2, b"");
        } else if self.ends(b"ss") {
            // unchanged
        } else if self.ends(b"s") {
            self.set_suffix(1, b"");
        }
    }

    /// (m>0) EED -> EE, and (*v*) ED / ING removal with cleanup.
    fn step1b(&mut self) {
        if self.ends(b"eed") {
            if self.measure(self.b.len() - 3) > 0 {
                self.set_suffix(1, b"");
            }
            return;
        }
        let stripped = if self.ends(b"ed") && self.vowel_in_stem(self.b.len() - 2) {
            self.set_suffix(2, b"");
            true
        } else if self.ends(b"ing") && self.vowel_in_stem(self.b.len() - 3) {
            self.set_suffix(3, b"");
            true
        } else {
            false
        };
        if !stripped {
            return;
        }
        if self.ends(b"at") || self.ends(b"bl") || self.ends(b"iz") {
            self.b.push(b'e');
        } else if self.double_consonant(self.b.len())
            && !matches!(self.b[self.b.len() - 1], b'l' | b's' | b'z')
        {
            self.b.pop();
        } else if self.measure(self.b.len()) == 1 && self.cvc(self.b.len()) {
            self.b.push(b'e');
        }
    }

    /// (*v*) Y -> I.
    fn step1c(&mut self) {
        if self.ends(b"y") && self.vowel_in_stem(self.b.len() - 1) {
            let last = self.b.len() - 1;
            self.b[last] = b'i';
        }
    }

    fn step2(&mut self) {
        const RULES: &[(&[u8], &[u8])] = &[
            (b"ational", b"ate"),
            (b"ization", b"ize"),
            (b"iveness", b"ive"),
            (b"fulness", b"ful"),
            (b"ousness", b"ous"),
            (b"biliti", b"ble"),
            (b"tional", b"tion"),
            (b"ation", b"ate"),
            (b"alism", b"al"),
            (b"aliti", b"al"),
            (b"iviti", b"ive"),
            (b"ousli", b"ous"),
            (b"entli", b"ent"),
            (b"enci", b"ence"),
            (b"anci", b"ance"),
            (b"izer", b"ize"),
            (b"abli", b"able"),
            (b"alli", b"al"),
            (b"ator", b"ate"),
            (b"eli", b"e"),
        ];
        self.apply_table(RULES, 0);
    }

    fn step3(&mut self) {
        const RULES: &[(&[u8], &[u8])] = &[
            (b"icate", b"ic"),
            (b"ative", b""),
            (b"alize", b"al"),
            (b"iciti", b"ic"),
            (b"ical", b"ic"),
            (b"ness", b""),
            (b"ful", b""),
        ];
        self.apply_table(RULES, 0);
    }

    fn step4(&mut self) {
        // ION carries an extra guard (stem must end in s or t), applied
        // inline in the loop below.
        const RULES: &[(&[u8], &[u8])] = &[
            (b"ement", b""),
            (b"ance", b""),
            (b"ence", b""),
            (b"able", b""),
            (b"ible", b""),
            (b"ment", b""),
            (b"ant", b""),
            (b"ent", b""),
            (b"ism", b""),
            (b"ate", b""),
            (b"iti", b""),
            (b"ous", b""),
            (b"ive", b""),
            (b"ize", b""),
            (b"ion", b""),
            (b"al", b""),
            (b"er", b""),
            (b"ic", b""),
            (b"ou", b""),
        ];
        for &(suffix, with) in RULES {
            if self.ends(suffix) {
                let stem_len = self.b.len() - suffix.len();
                let ion_guard = suffix != b"ion"
                    || (stem_len >= 1 && matches!(self.b[stem_len - 1], b's' | b't'));
                if self.measure(stem_len) > 1 && ion_guard {
                    self.set_suffix(suffix.len(), with);
                }
                return;
            }
        }
    }

    /// (m>1) E -> "", and (m=1 and not *o) E -> "".
    fn step5a(&mut self) {
        if !self.ends(b"e") {
            return;
        }
        let stem_len = self.b.len() - 1;
        let m = self.measure(stem_len);
        if m > 1 || (m == 1 && !self.cvc(stem_len)) {
            self.b.pop();
        }
    }

    /// (m>1 and *d and *L) -> single letter.
    fn step5b(&mut self) {
        let len = self.b.len();
        if len >= 1
            && self.b[len - 1] == b'l'
            && self.double_consonant(len)
            && self.measure(len) > 1
        {
            self.b.pop();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::stem;

    #[test]
    fn plural_and_participle_forms() {
        assert_eq!(stem("running"), "run");
        assert_eq!(stem("runs"), "run");
        assert_eq!(stem("ran"), "ran");
    }

    #[test]
    fn step1_examples() {
        for (word, expect) in [
            ("caresses", "caress"),
            ("ponies", "poni"),
            ("ties", "ti"),
            ("caress", "caress"),
            ("cats", "cat"),
            ("feed", "feed"),
            ("agreed", "agre"),
            ("plastered", "plaster"),
            ("bled", "bled"),
            ("motoring", "motor"),
            ("sing", "sing"),
            ("conflated", "conflat"),
            ("troubled", "troubl"),
            ("sized", "size"),
            ("hopping", "hop"),
            ("tanned", "tan"),
            ("falling", "fall"),
            ("hissing", "hiss"),
            ("fizzed", "fizz"),
            ("failing", "fail"),
            ("filing", "file"),
            ("happy", "happi"),
            ("sky", "sky"),
        ] {
            assert_eq!(stem(word), expect, "stem({word})");
        }
    }

    #[test]
    fn longer_suffix_chains() {
        for (word, expect) in [
            ("relational", "relat"),
            ("conditional", "condit"),
            ("rational", "ration"),
            ("digitizer", "digit"),
            ("operator", "oper"),
            ("feudalism", "feudal"),
            ("decisiveness", "decis"),
            ("hopefulness", "hope"),
            ("callousness", "callous"),
            ("formaliti", "formal"),
            ("sensitiviti", "sensit"),
            ("sensibiliti", "sensibl"),
            ("triplicate", "triplic"),
            ("formative", "form"),
            ("formalize", "formal"),
            ("electriciti", "electr"),
            ("electrical", "electr"),
            ("hopeful", "hope"),
            ("goodness", "good"),
            ("revival", "reviv"),
            ("allowance", "allow"),
            ("inference", "infer"),
            ("airliner", "airlin"),
            ("gyroscopic", "gyroscop"),
            ("adjustable", "adjust"),
            ("defensible", "defens"),
            ("irritant", "irrit"),
            ("replacement", "replac"),
            ("adjustment", "adjust"),
            ("dependent", "depend"),
            ("adoption", "adopt"),
            ("communism", "commun"),
            ("activate", "activ"),
            ("angulariti", "angular"),
            ("homologous", "homolog"),
            ("effective", "effect"),
            ("bowdlerize", "bowdler"),
            ("probate", "probat"),
            ("rate", "rate"),
            ("cease", "ceas"),
            ("controlling", "control"),
            ("rolling", "roll"),
            ("generalization", "gener"),
            ("oscillators", "oscil"),
        ] {
            assert_eq!(stem(word), expect, "stem({word})");
        }
    }

    #[test]
    fn short_words_and_non_alpha_pass_through() {
        assert_eq!(stem("is"), "is");
        assert_eq!(stem("a"), "a");
        assert_eq!(stem(""), "");
        assert_eq!(stem("s&p500"), "s&p500");
    }
}
