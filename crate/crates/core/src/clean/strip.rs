use std::ops::Range;

use super::grammar::CommentGrammar;
use super::lexer::{lex, openers, Token, TokenKind};
use super::{CleanMode, CleanedFile};

/// Removes the leading run of comments and blank lines. A hashbang line
/// stays, and stripping stops at the first code or string token, so a
/// leading docstring and everything after it is untouched.
///
/// An unterminated block comment in the header leaves the text unchanged
/// and sets `unterminated_block`.
pub fn strip_header_boilerplate(text: &str, grammar: &CommentGrammar) -> CleanedFile {
    let lexed = lex(text, grammar);
    let bytes = text.as_bytes();

    let mut tokens = lexed.tokens.iter().peekable();
    let mut keep_until = 0;
    if let Some(Token {
        kind: TokenKind::Hashbang,
        span,
    }) = tokens.peek()
    {
        keep_until = after_newline(bytes, span.end);
        tokens.next();
    }

    let mut comments = Vec::new();
    let mut body_start = text.len();
    for t in tokens {
        if t.span.start < keep_until {
            continue;
        }
        match t.kind {
            TokenKind::Whitespace => {}
            TokenKind::LineComment | TokenKind::BlockComment => {
                if lexed.unterminated_block == Some(t.span.start) {
                    return CleanedFile::unchanged(text, CleanMode::HeaderStripped, true);
                }
                comments.push(t.span.clone());
            }
            _ => {
                body_start = t.span.start;
                break;
            }
        }
    }

    let region = &bytes[keep_until..body_start];
    let last_newline = region.iter().rposition(|&b| b == b'\n').map(|p| keep_until + p);
    let last_comment_end = comments.last().map(|c| c.end);
    let cut = match (last_comment_end, last_newline) {
        // Code shares a line with the last comment: drop up to the code.
        (Some(c), Some(n)) if c > n => body_start,
        (Some(_), None) => body_start,
        (_, Some(n)) => n + 1,
        (None, None) => keep_until,
    };

    let mut out = String::with_capacity(text.len() - (cut - keep_until));
    out.push_str(&text[..keep_until]);
    out.push_str(&text[cut..]);
    CleanedFile {
        origin: None,
        bytes_removed: text.len() - out.len(),
        text: out,
        mode: CleanMode::HeaderStripped,
        removed_comments: comments,
        unterminated_block: false,
    }
}

/// Removes every line and block comment. Lines left blank by the removal
/// are dropped, whitespace before a trailing comment goes with it, and a
/// comment wedged between two tokens that would otherwise fuse is replaced
/// by one space. Comment markers inside strings are left alone.
///
/// An unterminated block comment is removed through the end of the text
/// and flagged.
pub fn strip_all_comments(text: &str, grammar: &CommentGrammar) -> CleanedFile {
    let lexed = lex(text, grammar);
    let bytes = text.as_bytes();
    let fuse_markers: Vec<&str> = openers(grammar).collect();
    let tokens: Vec<(bool, Range<usize>)> = lexed
        .tokens
        .iter()
        .map(|t| (t.kind.is_comment(), t.span.clone()))
        .collect();

    let mut out = String::with_capacity(text.len());
    let mut first = 0;
    let mut pos = 0;
    let mut segments = Vec::new();
    loop {
        let newline = bytes[pos..].iter().position(|&b| b == b'\n').map(|p| pos + p);
        let content_end = newline.unwrap_or(bytes.len());
        let line_end = if content_end > pos && bytes[content_end - 1] == b'\r' {
            content_end - 1
        } else {
            content_end
        };

        while first < tokens.len() && tokens[first].1.end <= pos {
            first += 1;
        }
        segments.clear();
        let mut touched = false;
        for (is_comment, span) in tokens[first..].iter().take_while(|(_, s)| s.start <= content_end) {
            // A comment touches the line if it covers any of its bytes,
            // newline included.
            if *is_comment && span.start <= content_end && span.end > pos {
                touched = true;
            }
            let seg = span.start.max(pos)..span.end.min(line_end);
            if !seg.is_empty() {
                segments.push((*is_comment, seg));
            }
        }

        let blank = segments
            .iter()
            .all(|(c, s)| *c || text[s.clone()].trim().is_empty());
        if !(touched && blank) {
            emit_line(text, &segments, &fuse_markers, &mut out);
            out.push_str(&text[line_end..newline.map_or(content_end, |p| p + 1)]);
        }
        match newline {
            Some(p) => pos = p + 1,
            None => break,
        }
    }

    CleanedFile {
        origin: None,
        bytes_removed: text.len() - out.len(),
        text: out,
        mode: CleanMode::AllCommentsStripped,
        removed_comments: tokens
            .into_iter()
            .filter_map(|(c, s)| c.then_some(s))
            .collect(),
        unterminated_block: lexed.unterminated_block.is_some(),
    }
}

fn emit_line(text: &str, segments: &[(bool, Range<usize>)], fuse_markers: &[&str], out: &mut String) {
    let last_significant = segments
        .iter()
        .rposition(|(c, s)| *c || !text[s.clone()].trim().is_empty());
    let trailing_comment = last_significant.is_some_and(|i| segments[i].0);

    let line_out_start = out.len();
    let mut pending_gap = false;
    for (i, (is_comment, span)) in segments.iter().enumerate() {
        if *is_comment {
            pending_gap = true;
            continue;
        }
        if trailing_comment && last_significant.is_some_and(|l| i > l) {
            break;
        }
        let piece = &text[span.clone()];
        if pending_gap && needs_gap(&out[line_out_start..], piece, fuse_markers) {
            out.push(' ');
        }
        pending_gap = false;
        out.push_str(piece);
    }
    if trailing_comment {
        let trimmed = out[line_out_start..].trim_end_matches([' ', '\t']).len();
        out.truncate(line_out_start + trimmed);
    }
}

/// Whether joining `left` and `right` directly would merge two tokens or
/// create a comment marker that was not there before.
fn needs_gap(left: &str, right: &str, fuse_markers: &[&str]) -> bool {
    let (Some(l), Some(r)) = (left.chars().last(), right.chars().next()) else {
        return false;
    };
    if l.is_whitespace() || r.is_whitespace() {
        return false;
    }
    let word = |c: char| c.is_alphanumeric() || c == '_';
    if word(l) && word(r) {
        return true;
    }
    let tail: String = left.chars().rev().take(3).collect::<Vec<_>>().into_iter().rev().collect();
    let head: String = right.chars().take(3).collect();
    let joined = format!("{tail}{head}");
    fuse_markers.iter().any(|m| {
        joined
            .match_indices(m)
            .any(|(at, _)| at < tail.len() && at + m.len() > tail.len())
    })
}

fn after_newline(bytes: &[u8], end: usize) -> usize {
    match bytes.get(end) {
        Some(b'\r') if bytes.get(end + 1) == Some(&b'\n') => end + 2,
        Some(b'\n') => end + 1,
        _ => end,
    }
}
