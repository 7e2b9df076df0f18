use unicode_normalization::UnicodeNormalization;

/// Splits text into case-folded, NFKC-normalised tokens on non-alphanumeric
/// boundaries. A hyphenated word yields its joined form followed by each part:
/// `"Self-Checksumming!"` becomes `["selfchecksumming", "self", "checksumming"]`.
pub fn normalize(text: &str) -> Vec<String> {
    let folded: String = text.nfkc().flat_map(char::to_lowercase).collect();
    let mut tokens = Vec::new();
    for word in folded.split(|c: char| !(c.is_alphanumeric() || c == '-')) {
        let parts: Vec<&str> = word.split('-').filter(|p| !p.is_empty()).collect();
        match parts.len() {
            0 => {}
            1 => tokens.push(parts[0].to_owned()),
            _ => {
                tokens.push(parts.concat());
                tokens.extend(parts.iter().map(|p| (*p).to_owned()));
            }
        }
    }
    tokens
}
