//! Synthetic MediaWiki dumps whose article structure grows with a planted quality tier.

use std::io::{self, Read};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use wikiqual_core::QualityClass;

const WORDS: [&str; 12] = [
    "the", "river", "music", "history", "town", "early", "records", "festival", "band", "during",
    "several", "region",
];

/// Wikitext for one article of the given tier (0 = STUB .. 5 = FA), XML-escaped.
pub fn article(rng: &mut StdRng, tier: usize) -> String {
    let t = tier as f64;
    let chars = 600.0 * 2.3f64.powf(t) * rng.gen_range(0.8..1.25);
    let root = chars.sqrt();
    let refs = (root * (0.01 + 0.03 * t) * rng.gen_range(0.8..1.2)) as usize;
    let headings = (root * (0.004 + 0.018 * t) * rng.gen_range(0.8..1.2)) as usize;
    let link_rate = 0.03 + 0.025 * t;
    let links = (link_rate * link_rate * chars * rng.gen_range(0.8..1.2)) as usize;
    let categories = tier + rng.gen_range(0..=1);
    let media = tier.saturating_sub(1) + rng.gen_range(0..=1);

    let mut out = String::with_capacity(chars as usize + 256);
    let mut pieces: Vec<String> = Vec::new();
    pieces.extend((0..refs).map(|i| format!("&lt;ref&gt;Source {i}&lt;/ref&gt;")));
    pieces.extend((0..headings).map(|i| format!("\n== Part {i} ==\n")));
    pieces.extend((0..links).map(|i| format!("[[Topic {i}]]")));
    pieces.extend((0..media).map(|i| format!("[[File:Photo{i}.jpg|thumb|Caption]]")));
    let mut budget = chars as usize;
    let mut next = 0;
    while budget > 0 || next < pieces.len() {
        let w = WORDS[rng.gen_range(0..WORDS.len())];
        out.push_str(w);
        out.push(' ');
        budget = budget.saturating_sub(w.len() + 1);
        if next < pieces.len() && rng.gen_bool(0.25) {
            out.push_str(&pieces[next]);
            next += 1;
        }
    }
    for i in 0..categories {
        out.push_str(&format!("\n[[Category:Group {i}]]"));
    }
    out
}

pub fn page_xml(page_id: u64, revisions: &[(u64, String)]) -> String {
    let mut s =
        format!("<page>\n<title>Article {page_id}</title>\n<ns>0</ns>\n<id>{page_id}</id>\n");
    for (rev_id, text) in revisions {
        s += &format!(
            "<revision>\n<id>{rev_id}</id>\n<timestamp>2022-03-01T12:00:00Z</timestamp>\n\
             <text bytes=\"{}\" xml:space=\"preserve\">{text}</text>\n</revision>\n",
            text.len()
        );
    }
    s += "</page>\n";
    s
}

pub const HEADER: &str = "<mediawiki xmlns=\"http://www.mediawiki.org/xml/export-0.11/\" xml:lang=\"en\">\n\
<siteinfo><sitename>Synthetic</sitename><namespaces><namespace key=\"0\" /></namespaces></siteinfo>\n";
pub const FOOTER: &str = "</mediawiki>\n";

/// One revision per page, tiers assigned round-robin. Returns the dump and
/// the true class per page id.
///
/// A `template_share` of each tier reuses one fixed article, the rest are
/// drawn independently. Median class limits put every sample above its class
/// median into the next class, so without repeated pages exact-match accuracy
/// stays near 58% however well the tiers separate.
pub fn tiered_dump(
    pages: u64,
    template_share: f64,
    seed: u64,
) -> (String, Vec<(u64, QualityClass)>) {
    let mut rng = StdRng::seed_from_u64(seed);
    let templates: Vec<String> = (0..6)
        .map(|tier| article(&mut StdRng::seed_from_u64(seed ^ tier as u64), tier))
        .collect();
    let mut xml = String::from(HEADER);
    let mut labels = Vec::new();
    for page_id in 1..=pages {
        let tier = (page_id % 6) as usize;
        let text = if rng.gen_bool(template_share) {
            templates[tier].clone()
        } else {
            article(&mut rng, tier)
        };
        xml += &page_xml(page_id, &[(page_id * 10, text)]);
        // noise pages that must be filtered out
        if page_id % 50 == 0 {
            xml += &format!(
                "<page><title>Talk:{page_id}</title><ns>1</ns><id>{}</id><revision><id>{}</id>\
                 <timestamp>2022-03-01T12:00:00Z</timestamp><text>[[x]]</text></revision></page>\n",
                page_id + 1_000_000,
                page_id * 10 + 1
            );
        }
        labels.push((page_id, QualityClass::ALL[tier]));
    }
    xml += FOOTER;
    (xml, labels)
}

/// Generates a dump of at least `target` bytes on the fly, with many
/// revisions per page and one oversized revision in the middle.
pub struct StreamingDump {
    rng: StdRng,
    target: u64,
    produced: u64,
    page_id: u64,
    big_revision: usize,
    big_done: bool,
    buf: Vec<u8>,
    pos: usize,
    finished: bool,
    delivered: Arc<AtomicU64>,
    largest: Arc<AtomicU64>,
}

impl StreamingDump {
    pub fn new(target: u64, big_revision: usize, seed: u64) -> Self {
        StreamingDump {
            rng: StdRng::seed_from_u64(seed),
            target,
            produced: 0,
            page_id: 0,
            big_revision,
            big_done: false,
            buf: HEADER.as_bytes().to_vec(),
            pos: 0,
            finished: false,
            delivered: Arc::default(),
            largest: Arc::default(),
        }
    }

    /// Bytes handed to the reader so far.
    pub fn delivered(&self) -> Arc<AtomicU64> {
        Arc::clone(&self.delivered)
    }

    /// Size of the largest revision text generated so far.
    pub fn largest_revision(&self) -> Arc<AtomicU64> {
        Arc::clone(&self.largest)
    }

    fn refill(&mut self) {
        self.buf.clear();
        self.pos = 0;
        if self.produced >= self.target {
            if !self.finished {
                self.buf.extend_from_slice(FOOTER.as_bytes());
                self.finished = true;
            }
            return;
        }
        self.page_id += 1;
        let revs = self.rng.gen_range(1..=8);
        let tier = self.rng.gen_range(0..6);
        let mut revisions: Vec<(u64, String)> = (0..revs)
            .map(|r| (self.page_id * 100 + r, article(&mut self.rng, tier.min(4))))
            .collect();
        if !self.big_done && self.produced >= self.target / 2 {
            let mut big = String::with_capacity(self.big_revision);
            while big.len() < self.big_revision {
                big += &article(&mut self.rng, 5);
            }
            revisions.push((self.page_id * 100 + 99, big));
            self.big_done = true;
        }
        let largest = revisions
            .iter()
            .map(|(_, t)| t.len() as u64)
            .max()
            .unwrap_or(0);
        self.largest.fetch_max(largest, Ordering::Relaxed);
        self.buf
            .extend_from_slice(page_xml(self.page_id, &revisions).as_bytes());
        self.produced += self.buf.len() as u64;
    }
}

impl Read for StreamingDump {
    fn read(&mut self, out: &mut [u8]) -> io::Result<usize> {
        if self.pos == self.buf.len() {
            self.refill();
            if self.buf.is_empty() {
                return Ok(0);
            }
        }
        let n = out.len().min(self.buf.len() - self.pos);
        out[..n].copy_from_slice(&self.buf[self.pos..self.pos + n]);
        self.pos += n;
        self.delivered.fetch_add(n as u64, Ordering::Relaxed);
        Ok(n)
    }
}
