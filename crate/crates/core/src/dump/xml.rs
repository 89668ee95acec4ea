//! Pull parser over MediaWiki export XML.
//!
//! Only one revision's text is held at a time, so memory stays proportional
//! to the largest revision rather than the dump.

use std::io::BufRead;
use std::sync::Arc;

use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;

use super::DumpError;

/// Main namespace and not a redirect.
pub fn is_article(namespace: i64, redirect: bool) -> bool {
    namespace == 0 && !redirect
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PageMeta {
    pub page_id: u64,
    pub namespace: i64,
    pub title: String,
    /// Set when the page carries a `<redirect/>` element.
    pub redirect: bool,
}

impl PageMeta {
    pub fn is_article(&self) -> bool {
        is_article(self.namespace, self.redirect)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Revision {
    pub revision_id: u64,
    pub timestamp: String,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DumpRevision {
    pub page: Arc<PageMeta>,
    pub revision: Revision,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Elem {
    Root,
    Page,
    Revision,
    Other,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Field {
    Title,
    Ns,
    PageId,
    RevisionId,
    Timestamp,
    Text,
}

pub struct RevisionStream<R> {
    reader: Reader<R>,
    buf: Vec<u8>,
    stack: Vec<(Elem, String)>,
    seen_root: bool,
    finished: bool,
    field: Option<Field>,
    capture: String,
    page: PageMeta,
    current_page: Option<Arc<PageMeta>>,
    revision: Revision,
    pages_seen: u64,
}

/// Streams every revision of every page in document order.
pub fn stream_revisions<R: BufRead>(source: R) -> RevisionStream<R> {
    let mut reader = Reader::from_reader(source);
    let config = reader.config_mut();
    config.trim_text(false);
    config.check_end_names = true;
    RevisionStream {
        reader,
        buf: Vec::with_capacity(64 * 1024),
        stack: Vec::new(),
        seen_root: false,
        finished: false,
        field: None,
        capture: String::new(),
        page: PageMeta::default(),
        current_page: None,
        revision: Revision::default(),
        pages_seen: 0,
    }
}

impl<R: BufRead> RevisionStream<R> {
    /// Pages opened so far, including those without revisions.
    pub fn pages_seen(&self) -> u64 {
        self.pages_seen
    }

    pub fn byte_offset(&self) -> u64 {
        self.reader.buffer_position()
    }

    fn parent(&self) -> Option<Elem> {
        self.stack.last().map(|(e, _)| *e)
    }

    fn fail(&mut self, err: DumpError) -> Option<Result<DumpRevision, DumpError>> {
        self.finished = true;
        Some(Err(err))
    }

    fn invalid(&self, field: &'static str, value: &str) -> DumpError {
        DumpError::InvalidField {
            field,
            value: value.to_string(),
            offset: self.reader.buffer_position(),
        }
    }

    fn current_page(&mut self) -> Arc<PageMeta> {
        self.current_page
            .get_or_insert_with(|| Arc::new(self.page.clone()))
            .clone()
    }

    /// Handles an opening tag. Returns the element kind to push.
    fn open(&mut self, name: &[u8], empty: bool) -> Result<Elem, DumpError> {
        let parent = self.parent();
        let elem = match (parent, name) {
            (None, b"mediawiki") => {
                self.seen_root = true;
                Elem::Root
            }
            (Some(Elem::Root), b"page") => {
                self.pages_seen += 1;
                self.page = PageMeta::default();
                self.current_page = None;
                Elem::Page
            }
            (Some(Elem::Page), b"revision") => {
                if self.page.page_id == 0 {
                    return Err(self.invalid("id", ""));
                }
                self.revision = Revision::default();
                Elem::Revision
            }
            (Some(Elem::Page), b"redirect") => {
                self.page.redirect = true;
                Elem::Other
            }
            _ => Elem::Other,
        };
        self.field = match (parent, name) {
            _ if empty => None,
            (Some(Elem::Page), b"title") => Some(Field::Title),
            (Some(Elem::Page), b"ns") => Some(Field::Ns),
            (Some(Elem::Page), b"id") => Some(Field::PageId),
            (Some(Elem::Revision), b"id") => Some(Field::RevisionId),
            (Some(Elem::Revision), b"timestamp") => Some(Field::Timestamp),
            (Some(Elem::Revision), b"text") => Some(Field::Text),
            _ => None,
        };
        self.capture.clear();
        Ok(elem)
    }

    /// Stores a finished field. Returns a revision when one completes.
    fn close(&mut self, elem: Elem) -> Result<Option<DumpRevision>, DumpError> {
        if let Some(field) = self.field.take() {
            let value = std::mem::take(&mut self.capture);
            match field {
                Field::Title => self.page.title = value,
                Field::Ns => {
                    self.page.namespace = value
                        .trim()
                        .parse()
                        .map_err(|_| self.invalid("ns", &value))?;
                }
                Field::PageId => {
                    self.page.page_id =
                        positive_id(&value).ok_or_else(|| self.invalid("id", &value))?
                }
                Field::RevisionId => {
                    self.revision.revision_id =
                        positive_id(&value).ok_or_else(|| self.invalid("id", &value))?;
                }
                Field::Timestamp => self.revision.timestamp = value,
                Field::Text => self.revision.text = value,
            }
        }
        if elem == Elem::Revision {
            if self.revision.revision_id == 0 {
                return Err(self.invalid("id", ""));
            }
            let page = self.current_page();
            let revision = std::mem::take(&mut self.revision);
            return Ok(Some(DumpRevision { page, revision }));
        }
        Ok(None)
    }

    fn read_next(&mut self) -> Option<Result<DumpRevision, DumpError>> {
        loop {
            self.buf.clear();
            let event = match self.reader.read_event_into(&mut self.buf) {
                Ok(ev) => ev,
                Err(source) => {
                    let offset = self.reader.error_position();
                    return self.fail(DumpError::Xml { offset, source });
                }
            };
            match event {
                Event::Start(start) => {
                    let name = local_name(&start);
                    match self.open(&name, false) {
                        Ok(elem) => {
                            let tag = String::from_utf8_lossy(&name).into_owned();
                            self.stack.push((elem, tag));
                        }
                        Err(e) => return self.fail(e),
                    }
                }
                Event::Empty(start) => {
                    let name = local_name(&start);
                    let elem = match self.open(&name, true) {
                        Ok(elem) => elem,
                        Err(e) => return self.fail(e),
                    };
                    match self.close(elem) {
                        Ok(Some(rev)) => return Some(Ok(rev)),
                        Ok(None) => {}
                        Err(e) => return self.fail(e),
                    }
                }
                Event::End(_) => {
                    let Some((elem, _)) = self.stack.pop() else {
                        continue;
                    };
                    match self.close(elem) {
                        Ok(Some(rev)) => return Some(Ok(rev)),
                        Ok(None) => {}
                        Err(e) => return self.fail(e),
                    }
                }
                Event::Text(text) if self.field.is_some() => match text.unescape() {
                    Ok(s) => self.capture.push_str(&s),
                    Err(source) => {
                        let offset = self.reader.buffer_position();
                        return self.fail(DumpError::Xml { offset, source });
                    }
                },
                Event::CData(data) if self.field.is_some() => match std::str::from_utf8(&data) {
                    Ok(s) => self.capture.push_str(s),
                    Err(e) => {
                        let offset = self.reader.buffer_position();
                        let source = quick_xml::Error::NonDecodable(Some(e));
                        return self.fail(DumpError::Xml { offset, source });
                    }
                },
                Event::Eof => {
                    self.finished = true;
                    let offset = self.reader.buffer_position();
                    if let Some((_, element)) = self.stack.last() {
                        let element = element.clone();
                        return Some(Err(DumpError::Truncated { offset, element }));
                    }
                    if !self.seen_root {
                        return Some(Err(DumpError::MissingRoot));
                    }
                    return None;
                }
                _ => {}
            }
        }
    }
}

impl<R: BufRead> Iterator for RevisionStream<R> {
    type Item = Result<DumpRevision, DumpError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.finished {
            return None;
        }
        self.read_next()
    }
}

fn local_name(start: &BytesStart<'_>) -> Vec<u8> {
    start.local_name().as_ref().to_vec()
}

fn positive_id(s: &str) -> Option<u64> {
    s.trim().parse().ok().filter(|&id| id > 0)
}
