//! Counting the six structural features of a wikitext revision.
//!
//! Everything here is plain pattern matching over the stored markup: templates
//! are not expanded and no syntax tree is built. Malformed markup never fails;
//! constructs that are not closed are simply not counted, with the exception of
//! a lone `<ref>` opener, which still counts once.

use std::sync::LazyLock;

use regex::Regex;

use crate::locale::{LinkKind, LocaleConfig};

/// Opening or self-closing ref tags. Each `<ref>...</ref>` pair has exactly one
/// opener, so counting openers counts pairs, self-closing tags and unclosed
/// openers alike. `<references/>` does not match.
static REF_OPEN: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?i)<ref(?:\s[^>]*|/)?>").unwrap());

static GALLERY: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?is)<gallery(?:\s[^>]*)?>(.*?)</gallery\s*>").unwrap());

static IMAGEMAP: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?is)<imagemap(?:\s[^>]*)?>(.*?)</imagemap\s*>").unwrap());

/// The six untransformed per-revision counts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct RawFeatures {
    pub num_chars: u64,
    pub num_refs: u64,
    pub num_headings: u64,
    pub num_wikilinks: u64,
    pub num_categories: u64,
    pub num_media: u64,
}

impl RawFeatures {
    pub fn as_array(&self) -> [u64; 6] {
        [
            self.num_chars,
            self.num_refs,
            self.num_headings,
            self.num_wikilinks,
            self.num_categories,
            self.num_media,
        ]
    }

    pub fn from_array(v: [u64; 6]) -> Self {
        RawFeatures {
            num_chars: v[0],
            num_refs: v[1],
            num_headings: v[2],
            num_wikilinks: v[3],
            num_categories: v[4],
            num_media: v[5],
        }
    }
}

/// Number of Unicode scalar values.
pub fn count_characters(wikitext: &str) -> u64 {
    wikitext.chars().count() as u64
}

pub fn count_refs(wikitext: &str) -> u64 {
    REF_OPEN.find_iter(wikitext).count() as u64
}

/// Section level of a heading line, if it is one.
///
/// The line must start with `=`; trailing whitespace is ignored. Unbalanced
/// runs resolve to the shorter side (`=== A ==` is a level-2 heading titled
/// `= A`), capped at 6.
fn heading_level(line: &str) -> Option<usize> {
    let line = line.trim_end();
    let bytes = line.as_bytes();
    let lead = bytes.iter().take_while(|&&b| b == b'=').count();
    if lead == 0 || lead == bytes.len() {
        return None;
    }
    let trail = bytes.iter().rev().take_while(|&&b| b == b'=').count();
    let level = lead.min(trail).min(6);
    if level == 0 || line[level..line.len() - level].trim().is_empty() {
        return None;
    }
    Some(level)
}

/// Headings of level 2 (`== A ==`) and 3 (`=== A ===`).
pub fn count_headings(wikitext: &str) -> u64 {
    wikitext
        .lines()
        .filter(|line| matches!(heading_level(line), Some(2 | 3)))
        .count() as u64
}

#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
struct LinkCounts {
    wikilinks: u64,
    categories: u64,
    media: u64,
}

/// Pairs `[[` with `]]` using a stack so that links nested inside image
/// captions are found as well as the outer link. Openers that never close are
/// dropped; stray closers are ignored.
fn scan_links(wikitext: &str, locale: &LocaleConfig) -> LinkCounts {
    let bytes = wikitext.as_bytes();
    let mut open: Vec<usize> = Vec::new();
    let mut counts = LinkCounts::default();
    let mut i = 0;
    while i + 1 < bytes.len() {
        match (bytes[i], bytes[i + 1]) {
            (b'[', b'[') => {
                open.push(i + 2);
                i += 2;
            }
            (b']', b']') => {
                if let Some(start) = open.pop() {
                    // '[' '|' and ']' are ASCII, so these are char boundaries.
                    let inner = &wikitext[start..i];
                    let end = inner.find(['|', '[']).unwrap_or(inner.len());
                    let target = inner[..end].trim();
                    if !target.is_empty() && !target.contains('\n') {
                        match locale.classify_target(target) {
                            LinkKind::Wikilink => counts.wikilinks += 1,
                            LinkKind::Category => counts.categories += 1,
                            LinkKind::Media => counts.media += 1,
                        }
                    }
                }
                i += 2;
            }
            _ => i += 1,
        }
    }
    counts
}

fn count_tag_media(wikitext: &str) -> u64 {
    let gallery: usize = GALLERY
        .captures_iter(wikitext)
        .map(|c| c[1].lines().filter(|l| !l.trim().is_empty()).count())
        .sum();
    let imagemaps = IMAGEMAP
        .captures_iter(wikitext)
        .filter(|c| !c[1].trim().is_empty())
        .count();
    (gallery + imagemaps) as u64
}

/// Internal links outside the category and media namespaces.
pub fn count_wikilinks(wikitext: &str, locale: &LocaleConfig) -> u64 {
    scan_links(wikitext, locale).wikilinks
}

pub fn count_categories(wikitext: &str, locale: &LocaleConfig) -> u64 {
    scan_links(wikitext, locale).categories
}

/// Media-namespace links plus one item per non-empty `<gallery>` line and one
/// per `<imagemap>` block.
pub fn count_media(wikitext: &str, locale: &LocaleConfig) -> u64 {
    scan_links(wikitext, locale).media + count_tag_media(wikitext)
}

/// All six counts in one pass over the links.
pub fn extract_features(wikitext: &str, locale: &LocaleConfig) -> RawFeatures {
    if wikitext.is_empty() {
        return RawFeatures::default();
    }
    let links = scan_links(wikitext, locale);
    RawFeatures {
        num_chars: count_characters(wikitext),
        num_refs: count_refs(wikitext),
        num_headings: count_headings(wikitext),
        num_wikilinks: links.wikilinks,
        num_categories: links.categories,
        num_media: links.media + count_tag_media(wikitext),
    }
}
