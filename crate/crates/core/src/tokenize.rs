//! The normalization shared by the generator, the evaluator and the miner:
//! lowercase, whitespace-separated, sentence punctuation split off.

/// Lowercases `text` and splits it into tokens, separating `.`, `,`, `?`,
/// `!` and `;` from adjacent words. A `:` is kept attached so task prefixes
/// such as `quest:` stay single tokens.
pub fn normalize(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    for word in text.split_whitespace() {
        let lower = word.to_lowercase();
        let mut current = String::new();
        for ch in lower.chars() {
            if matches!(ch, '.' | ',' | '?' | '!' | ';') {
                if !current.is_empty() {
                    out.push(std::mem::take(&mut current));
                }
                out.push(ch.to_string());
            } else {
                current.push(ch);
            }
        }
        if !current.is_empty() {
            out.push(current);
        }
    }
    out
}

/// Splits already-normalized text on whitespace.
pub fn split(text: &str) -> Vec<String> {
    text.split_whitespace().map(str::to_string).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splits_punctuation_and_lowercases() {
        assert_eq!(
            normalize("Haben die Hunde, die deine Löwen bewundern können, gewartet?"),
            split("haben die hunde , die deine löwen bewundern können , gewartet ?")
        );
        assert_eq!(normalize("  quest: Has it?"), split("quest: has it ?"));
        assert_eq!(normalize("hasn't"), vec!["hasn't"]);
        assert!(normalize("").is_empty());
    }
}
