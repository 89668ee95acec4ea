//! Per-language namespace aliases used by the link counters and redirect detection.
//!
//! Aliases are stored normalized (trimmed, underscores folded to spaces, runs of
//! whitespace collapsed, lowercased), so `Category`, `category` and `CATEGORY`
//! all select the same namespace. Canonical English names are accepted on every
//! wiki, as MediaWiki does.

use std::collections::BTreeMap;
use std::path::Path;

use ini::Ini;

use crate::config::ConfigError;

const CANONICAL_CATEGORY: &[&str] = &["Category"];
const CANONICAL_MEDIA: &[&str] = &["File", "Image", "Media"];
const CANONICAL_REDIRECT: &[&str] = &["REDIRECT"];

/// (language, categories, media, redirect magic words)
type AliasRow = (
    &'static str,
    &'static [&'static str],
    &'static [&'static str],
    &'static [&'static str],
);

const BUNDLED: &[AliasRow] = &[
    (
        "en",
        &["Category"],
        &["File", "Image", "Media"],
        &["REDIRECT"],
    ),
    (
        "fr",
        &["Catégorie"],
        &["Fichier", "Image", "Média"],
        &["REDIRECTION", "REDIRECT"],
    ),
    (
        "de",
        &["Kategorie"],
        &["Datei", "Bild", "Medium"],
        &["WEITERLEITUNG"],
    ),
    (
        "es",
        &["Categoría"],
        &["Archivo", "Imagen", "Medio"],
        &["REDIRECCIÓN", "REDIRECCION"],
    ),
];

/// Normalizes a namespace name or alias for comparison.
pub fn normalize_alias(name: &str) -> String {
    let mut out = String::with_capacity(name.len());
    for word in name
        .split(|c: char| c == '_' || c.is_whitespace())
        .filter(|w| !w.is_empty())
    {
        if !out.is_empty() {
            out.push(' ');
        }
        out.extend(word.chars().flat_map(char::to_lowercase));
    }
    out
}

/// Which namespace a link target falls in, as far as feature counting cares.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinkKind {
    Wikilink,
    Category,
    Media,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocaleConfig {
    language_code: String,
    category_aliases: Vec<String>,
    media_aliases: Vec<String>,
    redirect_aliases: Vec<String>,
}

impl LocaleConfig {
    /// Builds a locale from alias lists. Canonical English names are always added.
    pub fn new<S: AsRef<str>>(
        language_code: &str,
        category_aliases: &[S],
        media_aliases: &[S],
    ) -> Result<Self, ConfigError> {
        Self::with_redirects(language_code, category_aliases, media_aliases, &[] as &[S])
    }

    pub fn with_redirects<S: AsRef<str>>(
        language_code: &str,
        category_aliases: &[S],
        media_aliases: &[S],
        redirect_aliases: &[S],
    ) -> Result<Self, ConfigError> {
        let code = language_code.trim();
        if code.is_empty() {
            return Err(ConfigError::invalid(
                "locale",
                "language_code",
                language_code,
            ));
        }
        let mut locale = LocaleConfig {
            language_code: code.to_string(),
            category_aliases: Vec::new(),
            media_aliases: Vec::new(),
            redirect_aliases: Vec::new(),
        };
        locale.extend(category_aliases, media_aliases, redirect_aliases)?;
        locale.extend(CANONICAL_CATEGORY, CANONICAL_MEDIA, CANONICAL_REDIRECT)?;
        Ok(locale)
    }

    fn extend<S: AsRef<str>>(
        &mut self,
        categories: &[S],
        media: &[S],
        redirects: &[S],
    ) -> Result<(), ConfigError> {
        for (list, target, key) in [
            (categories, &mut self.category_aliases, "categories"),
            (media, &mut self.media_aliases, "media"),
            (redirects, &mut self.redirect_aliases, "redirects"),
        ] {
            for alias in list {
                let raw = alias.as_ref();
                let norm = normalize_alias(raw.trim_start_matches('#'));
                if norm.is_empty() || norm.contains(':') {
                    return Err(ConfigError::invalid(&self.language_code, key, raw));
                }
                if !target.contains(&norm) {
                    target.push(norm);
                }
            }
        }
        if let Some(clash) = self
            .category_aliases
            .iter()
            .find(|a| self.media_aliases.contains(a))
        {
            return Err(ConfigError::invalid(&self.language_code, "media", clash));
        }
        Ok(())
    }

    pub fn language_code(&self) -> &str {
        &self.language_code
    }

    pub fn category_aliases(&self) -> &[String] {
        &self.category_aliases
    }

    pub fn media_aliases(&self) -> &[String] {
        &self.media_aliases
    }

    pub fn redirect_aliases(&self) -> &[String] {
        &self.redirect_aliases
    }

    /// Classifies a link target (the part of `[[...]]` before any `|`).
    ///
    /// A leading colon forces an ordinary link, e.g. `[[:Category:Foo]]`.
    pub fn classify_target(&self, target: &str) -> LinkKind {
        let target = target.trim_start();
        if target.starts_with(':') {
            return LinkKind::Wikilink;
        }
        let Some((prefix, _)) = target.split_once(':') else {
            return LinkKind::Wikilink;
        };
        let prefix = normalize_alias(prefix);
        if self.category_aliases.contains(&prefix) {
            LinkKind::Category
        } else if self.media_aliases.contains(&prefix) {
            LinkKind::Media
        } else {
            LinkKind::Wikilink
        }
    }

    /// True when the wikitext starts with a redirect magic word followed by a link,
    /// e.g. `#REDIRECT [[Target]]`.
    pub fn is_redirect_text(&self, wikitext: &str) -> bool {
        let Some(rest) = wikitext.trim_start().strip_prefix('#') else {
            return false;
        };
        let word_end = rest
            .char_indices()
            .find(|&(_, c)| c == '[' || c == ':' || c.is_whitespace())
            .map_or(rest.len(), |(i, _)| i);
        let word = normalize_alias(&rest[..word_end]);
        if !self.redirect_aliases.contains(&word) {
            return false;
        }
        rest[word_end..]
            .trim_start_matches(|c: char| c == ':' || c.is_whitespace())
            .starts_with("[[")
    }
}

/// All known locales, keyed by language code.
#[derive(Debug, Clone)]
pub struct LocaleRegistry {
    locales: BTreeMap<String, LocaleConfig>,
}

impl Default for LocaleRegistry {
    fn default() -> Self {
        Self::bundled()
    }
}

impl LocaleRegistry {
    /// The compiled-in defaults for en, fr, de and es.
    pub fn bundled() -> Self {
        let locales = BUNDLED
            .iter()
            .map(|(code, cats, media, redirects)| {
                let locale = LocaleConfig::with_redirects(code, cats, media, redirects)
                    .expect("bundled locale is valid");
                (code.to_string(), locale)
            })
            .collect();
        LocaleRegistry { locales }
    }

    pub fn get(&self, code: &str) -> Option<&LocaleConfig> {
        self.locales.get(code)
    }

    pub fn languages(&self) -> impl Iterator<Item = &str> {
        self.locales.keys().map(String::as_str)
    }

    /// Looks up a locale, failing with the list of known languages.
    pub fn require(&self, code: &str) -> Result<&LocaleConfig, ConfigError> {
        self.get(code).ok_or_else(|| ConfigError::UnknownLanguage {
            code: code.to_string(),
            known: self.languages().collect::<Vec<_>>().join(", "),
        })
    }

    pub fn insert(&mut self, locale: LocaleConfig) {
        self.locales.insert(locale.language_code.clone(), locale);
    }

    /// Merges sections from a locale config file. Aliases for an existing language
    /// are added to the bundled ones; a new language needs no keys at all
    /// (canonical names are always present).
    ///
    /// ```text
    /// [fr]
    /// categories = Catégorie
    /// media = Fichier, Image
    /// redirects = REDIRECTION
    /// ```
    pub fn merge_str(&mut self, source: &str) -> Result<(), ConfigError> {
        let ini = Ini::load_from_str(source)?;
        for (section, props) in ini.iter() {
            let Some(code) = section else {
                if props.is_empty() {
                    continue;
                }
                return Err(ConfigError::invalid(
                    "",
                    "section",
                    "keys outside a [language] section",
                ));
            };
            for key in props.iter().map(|(k, _)| k) {
                if !matches!(key, "categories" | "media" | "redirects") {
                    return Err(ConfigError::invalid(code, key, "unknown key"));
                }
            }
            let list = |key: &str| -> Vec<String> {
                props
                    .get(key)
                    .map(|v| {
                        v.split(',')
                            .map(str::trim)
                            .filter(|s| !s.is_empty())
                            .map(String::from)
                            .collect()
                    })
                    .unwrap_or_default()
            };
            let (cats, media, redirects) = (list("categories"), list("media"), list("redirects"));
            match self.locales.get_mut(code.trim()) {
                Some(existing) => existing.extend(&cats, &media, &redirects)?,
                None => self.insert(LocaleConfig::with_redirects(
                    code, &cats, &media, &redirects,
                )?),
            }
        }
        Ok(())
    }

    pub fn merge_file(&mut self, path: &Path) -> Result<(), ConfigError> {
        let source = std::fs::read_to_string(path).map_err(|e| ConfigError::io(path, e))?;
        self.merge_str(&source)
    }
}
