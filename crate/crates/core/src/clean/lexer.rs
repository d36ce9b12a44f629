//! A comment-aware scanner. It only distinguishes what the strip passes
//! need: comments, strings, whitespace, a leading hashbang, and everything
//! else as code.

use std::ops::Range;

use super::grammar::CommentGrammar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenKind {
    Code,
    Whitespace,
    Hashbang,
    LineComment,
    BlockComment,
    String { doc: bool },
}

impl TokenKind {
    pub fn is_comment(self) -> bool {
        matches!(self, TokenKind::LineComment | TokenKind::BlockComment)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub span: Range<usize>,
}

#[derive(Debug, Clone, Default)]
pub struct Lexed {
    pub tokens: Vec<Token>,
    /// Start offset of a block comment that runs off the end of the text.
    pub unterminated_block: Option<usize>,
}

enum Opener<'g> {
    Block(&'g super::grammar::BlockDelimiter),
    Line(&'g str),
    Str(&'g super::grammar::StringDelimiter),
}

impl Opener<'_> {
    fn len(&self) -> usize {
        match self {
            Opener::Block(b) => b.open.len(),
            Opener::Line(m) => m.len(),
            Opener::Str(s) => s.open.len(),
        }
    }

    fn rank(&self) -> u8 {
        match self {
            Opener::Block(_) => 2,
            Opener::Line(_) => 1,
            Opener::Str(_) => 0,
        }
    }
}

pub fn lex(text: &str, grammar: &CommentGrammar) -> Lexed {
    let bytes = text.as_bytes();
    let mut out = Lexed::default();
    let mut i = 0;

    if grammar.hashbang && text.starts_with("#!") {
        let end = line_end(bytes, 0);
        push(&mut out.tokens, TokenKind::Hashbang, 0..end);
        i = end;
    }

    while i < bytes.len() {
        let b = bytes[i];
        if b.is_ascii_whitespace() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_whitespace() {
                i += 1;
            }
            push(&mut out.tokens, TokenKind::Whitespace, start..i);
            continue;
        }
        match best_opener(bytes, i, grammar) {
            Some(Opener::Line(_)) => {
                let end = line_end(bytes, i);
                push(&mut out.tokens, TokenKind::LineComment, i..end);
                i = end;
            }
            Some(Opener::Block(delim)) => {
                let (end, closed) = block_end(bytes, i, delim, grammar.nested_blocks);
                if !closed && out.unterminated_block.is_none() {
                    out.unterminated_block = Some(i);
                }
                push(&mut out.tokens, TokenKind::BlockComment, i..end);
                i = end;
            }
            Some(Opener::Str(delim)) => {
                let end = string_end(bytes, i, delim);
                let doc = grammar.doc_strings.iter().any(|d| d == &delim.open)
                    && only_space_before(bytes, i);
                push(&mut out.tokens, TokenKind::String { doc }, i..end);
                i = end;
            }
            None => {
                let width = utf8_width(b);
                push(&mut out.tokens, TokenKind::Code, i..(i + width).min(bytes.len()));
                i += width;
            }
        }
    }
    out
}

fn push(tokens: &mut Vec<Token>, kind: TokenKind, span: Range<usize>) {
    if kind == TokenKind::Code {
        if let Some(last) = tokens.last_mut() {
            if last.kind == TokenKind::Code && last.span.end == span.start {
                last.span.end = span.end;
                return;
            }
        }
    }
    tokens.push(Token { kind, span });
}

fn best_opener<'g>(bytes: &[u8], i: usize, g: &'g CommentGrammar) -> Option<Opener<'g>> {
    let rest = &bytes[i..];
    let mut best: Option<Opener<'g>> = None;
    let mut consider = |cand: Opener<'g>| {
        let better = match &best {
            None => true,
            Some(b) => (cand.len(), cand.rank()) > (b.len(), b.rank()),
        };
        if better {
            best = Some(cand);
        }
    };
    for b in &g.block_comments {
        if rest.starts_with(b.open.as_bytes())
            && (!b.line_start || anchored_at(bytes, i, &b.open))
        {
            consider(Opener::Block(b));
        }
    }
    for m in &g.line_comments {
        if rest.starts_with(m.as_bytes())
            && (!g.word_start_line_comments || word_start(bytes, i))
        {
            consider(Opener::Line(m));
        }
    }
    for s in &g.strings {
        if rest.starts_with(s.open.as_bytes()) {
            consider(Opener::Str(s));
        }
    }
    best
}

/// End of the line containing `i`, excluding `\n` and a `\r` before it.
fn line_end(bytes: &[u8], i: usize) -> usize {
    let nl = bytes[i..]
        .iter()
        .position(|&b| b == b'\n')
        .map_or(bytes.len(), |p| i + p);
    if nl > i && nl < bytes.len() && bytes[nl - 1] == b'\r' {
        nl - 1
    } else {
        nl
    }
}

fn at_line_start(bytes: &[u8], i: usize) -> bool {
    i == 0 || bytes[i - 1] == b'\n'
}

/// A line-anchored delimiter sits at column 0. If it ends in a word
/// character it must be followed by a non-word character (`=begin`), and
/// otherwise by a letter (`=head1`).
fn anchored_at(bytes: &[u8], i: usize, delim: &str) -> bool {
    if !at_line_start(bytes, i) || !bytes[i..].starts_with(delim.as_bytes()) {
        return false;
    }
    let next = bytes.get(i + delim.len()).copied();
    let last = *delim.as_bytes().last().expect("non-empty delimiter");
    if last.is_ascii_alphanumeric() {
        !next.is_some_and(|n| n.is_ascii_alphanumeric() || n == b'_')
    } else {
        next.is_some_and(|n| n.is_ascii_alphabetic())
    }
}

fn word_start(bytes: &[u8], i: usize) -> bool {
    i == 0 || matches!(bytes[i - 1], b' ' | b'\t' | b'\n' | b'\r' | b';' | b'|' | b'&' | b'(' | b')' | b'{' | b'}')
}

fn only_space_before(bytes: &[u8], i: usize) -> bool {
    bytes[..i]
        .iter()
        .rev()
        .take_while(|&&b| b != b'\n')
        .all(|&b| b == b' ' || b == b'\t')
}

fn block_end(bytes: &[u8], start: usize, d: &super::grammar::BlockDelimiter, nested: bool) -> (usize, bool) {
    let open = d.open.as_bytes();
    let close = d.close.as_bytes();
    let mut depth = 1usize;
    let mut j = start + open.len();
    while j < bytes.len() {
        if d.line_start {
            if anchored_at(bytes, j, &d.close) {
                return (line_end(bytes, j), true);
            }
            j += 1;
            continue;
        }
        if bytes[j..].starts_with(close) {
            depth -= 1;
            j += close.len();
            if depth == 0 {
                return (j, true);
            }
            continue;
        }
        if nested && bytes[j..].starts_with(open) {
            depth += 1;
            j += open.len();
            continue;
        }
        j += 1;
    }
    (bytes.len(), false)
}

fn string_end(bytes: &[u8], start: usize, d: &super::grammar::StringDelimiter) -> usize {
    let close = d.close.as_bytes();
    let escape = d.escape.map(|c| c as u32 as u8);
    let mut j = start + d.open.len();
    while j < bytes.len() {
        let b = bytes[j];
        if Some(b) == escape {
            // Never let an escape swallow the newline of a single-line string.
            if !d.multiline && bytes.get(j + 1) == Some(&b'\n') {
                return j + 1;
            }
            j += 2;
            continue;
        }
        if bytes[j..].starts_with(close) {
            return j + close.len();
        }
        if b == b'\n' && !d.multiline {
            return j;
        }
        j += 1;
    }
    bytes.len()
}

fn utf8_width(lead: u8) -> usize {
    match lead {
        0x00..=0x7f => 1,
        0xc0..=0xdf => 2,
        0xe0..=0xef => 3,
        0xf0..=0xf7 => 4,
        _ => 1,
    }
}

pub(crate) fn openers(g: &CommentGrammar) -> impl Iterator<Item = &str> {
    g.line_comments
        .iter()
        .map(String::as_str)
        .chain(g.block_comments.iter().map(|b| b.open.as_str()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clean::GrammarSet;

    fn kinds(text: &str, lang: &str) -> Vec<(TokenKind, String)> {
        let set = GrammarSet::builtin();
        let lexed = lex(text, set.get(lang).unwrap());
        lexed
            .tokens
            .into_iter()
            .filter(|t| t.kind != TokenKind::Whitespace)
            .map(|t| (t.kind, text[t.span].to_string()))
            .collect()
    }

    #[test]
    fn c_comments_and_strings() {
        let toks = kinds("int a = 1; // x\nchar *s = \"/* no */\"; /* yes */", "C");
        assert_eq!(
            toks,
            vec![
                (TokenKind::Code, "int".into()),
                (TokenKind::Code, "a".into()),
                (TokenKind::Code, "=".into()),
                (TokenKind::Code, "1;".into()),
                (TokenKind::LineComment, "// x".into()),
                (TokenKind::Code, "char".into()),
                (TokenKind::Code, "*s".into()),
                (TokenKind::Code, "=".into()),
                (TokenKind::String { doc: false }, "\"/* no */\"".into()),
                (TokenKind::Code, ";".into()),
                (TokenKind::BlockComment, "/* yes */".into()),
            ]
        );
    }

    #[test]
    fn python_triple_quote_beats_single() {
        let toks = kinds("\"\"\"doc # not\"\"\"\nx = '#'", "Python");
        assert_eq!(toks[0], (TokenKind::String { doc: true }, "\"\"\"doc # not\"\"\"".into()));
        assert_eq!(toks.last().unwrap(), &(TokenKind::String { doc: false }, "'#'".into()));
    }

    #[test]
    fn hashbang_only_at_file_start() {
        let toks = kinds("#!/bin/sh\necho hi # c\n", "Shell");
        assert_eq!(toks[0].0, TokenKind::Hashbang);
        assert_eq!(toks.last().unwrap().0, TokenKind::LineComment);
    }

    #[test]
    fn shell_dollar_hash_is_code() {
        let toks = kinds("if [ $# -eq 0 ]; then exit; fi", "Shell");
        assert!(toks.iter().all(|(k, _)| !k.is_comment()), "{toks:?}");
    }

    #[test]
    fn perl_pod_block() {
        let text = "my $x = 1;\n=pod\n\nDocs # here\n\n=cut\nprint $x;\n";
        let toks = kinds(text, "Perl");
        let pod: Vec<_> = toks.iter().filter(|(k, _)| *k == TokenKind::BlockComment).collect();
        assert_eq!(pod.len(), 1);
        assert_eq!(pod[0].1, "=pod\n\nDocs # here\n\n=cut");
        // An assignment continuation is not POD.
        assert!(kinds("my $x\n= 1;\n", "Perl").iter().all(|(k, _)| !k.is_comment()));
    }

    #[test]
    fn ruby_begin_end() {
        let toks = kinds("=begin\nnotes\n=end\nputs 1\n", "Ruby");
        assert_eq!(toks[0], (TokenKind::BlockComment, "=begin\nnotes\n=end".into()));
    }

    #[test]
    fn unterminated_block_runs_to_end() {
        let set = GrammarSet::builtin();
        let lexed = lex("int x; /* open", set.get("C").unwrap());
        assert_eq!(lexed.unterminated_block, Some(7));
        assert_eq!(lexed.tokens.last().unwrap().span, 7..14);
    }

    #[test]
    fn single_line_string_recovers_at_newline() {
        // An apostrophe in C++ digit separators must not swallow the file.
        let toks = kinds("int n = 1'000;\n// real comment\n", "C++");
        assert!(toks.iter().any(|(k, t)| *k == TokenKind::LineComment && t == "// real comment"));
    }

    #[test]
    fn html_comment() {
        let toks = kinds("<p>don't</p><!-- x -->", "HTML");
        assert_eq!(toks.last().unwrap(), &(TokenKind::BlockComment, "<!-- x -->".into()));
    }

    #[test]
    fn crlf_line_comment_excludes_carriage_return() {
        let set = GrammarSet::builtin();
        let lexed = lex("// a\r\nx", set.get("C").unwrap());
        assert_eq!(lexed.tokens[0].span, 0..4);
    }

    #[test]
    fn spans_tile_the_input() {
        let set = GrammarSet::builtin();
        let text = "#!/usr/bin/env python\n# c\ns = 'é' # ü\n\"\"\"x\"\"\"\n";
        let lexed = lex(text, set.get("Python").unwrap());
        let mut pos = 0;
        for t in &lexed.tokens {
            assert_eq!(t.span.start, pos);
            pos = t.span.end;
        }
        assert_eq!(pos, text.len());
    }
}
