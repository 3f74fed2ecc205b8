//! Website scraping tool: fetch a page and reduce it to plain text.

use std::time::Duration;

use thiserror::Error;

use super::templates::{MAX_TOOL_CHARS, TRUNCATION_MARKER};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ToolError {
    #[error("network error fetching {url}: {message}")]
    Network { url: String, message: String },
    #[error("HTTP status {status} from {url}")]
    HttpStatus { status: u16, url: String },
    #[error("no text content at {0}")]
    EmptyContent(String),
    #[error("not an http(s) URL: {0}")]
    InvalidUrl(String),
    #[error("tool {0:?} is not registered")]
    Unknown(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScrapedPage {
    pub url: String,
    pub text: String,
    /// Body size as fetched, before stripping.
    pub bytes_fetched: usize,
}

const BLOCK_TAGS: &[&str] = &[
    "address", "article", "aside", "blockquote", "br", "dd", "div", "dl", "dt", "footer", "h1", "h2", "h3", "h4",
    "h5", "h6", "header", "hr", "li", "main", "nav", "ol", "p", "pre", "section", "table", "td", "th", "title", "tr",
    "ul",
];

/// Drops `<script>`/`<style>` blocks and comments, removes tags (block-level
/// tags become spaces), decodes common entities and collapses whitespace.
pub fn html_to_text(html: &str) -> String {
    let lower = html.to_ascii_lowercase();
    let mut out = String::with_capacity(html.len());
    let mut i = 0;
    while i < html.len() {
        let rest = &lower[i..];
        if rest.starts_with("<!--") {
            i += rest.find("-->").map_or(rest.len(), |e| e + 3);
            continue;
        }
        if rest.starts_with('<') {
            let end = rest.find('>').map_or(rest.len(), |e| e + 1);
            let tag = tag_name(&rest[1..end]);
            if tag == "script" || tag == "style" {
                let close = format!("</{tag}");
                i += match rest[end..].find(&close) {
                    Some(c) => {
                        let after = end + c;
                        after + rest[after..].find('>').map_or(rest.len() - after, |e| e + 1)
                    }
                    None => rest.len(),
                };
                out.push(' ');
                continue;
            }
            if BLOCK_TAGS.contains(&tag.as_str()) {
                out.push(' ');
            }
            i += end;
            continue;
        }
        let next = rest.find('<').unwrap_or(rest.len());
        out.push_str(&decode_entities(&html[i..i + next]));
        i += next;
    }
    out.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn tag_name(inner: &str) -> String {
    inner
        .trim_start_matches('/')
        .chars()
        .take_while(|c| c.is_ascii_alphanumeric())
        .collect()
}

fn decode_entities(text: &str) -> String {
    if !text.contains('&') {
        return text.to_string();
    }
    let mut out = String::with_capacity(text.len());
    let mut rest = text;
    while let Some(pos) = rest.find('&') {
        out.push_str(&rest[..pos]);
        let tail = &rest[pos..];
        let decoded = tail.find(';').filter(|&e| e <= 10).and_then(|e| {
            let name = &tail[1..e];
            let ch = match name {
                "amp" => Some('&'),
                "lt" => Some('<'),
                "gt" => Some('>'),
                "quot" => Some('"'),
                "apos" => Some('\''),
                "nbsp" => Some(' '),
                _ if name.starts_with("#x") || name.starts_with("#X") => {
                    u32::from_str_radix(&name[2..], 16).ok().and_then(char::from_u32)
                }
                _ if name.starts_with('#') => name[1..].parse().ok().and_then(char::from_u32),
                _ => None,
            };
            ch.map(|c| (c, e + 1))
        });
        match decoded {
            Some((c, len)) => {
                out.push(c);
                rest = &tail[len..];
            }
            None => {
                out.push('&');
                rest = &tail[1..];
            }
        }
    }
    out.push_str(rest);
    out
}

/// Caps `text` at [`MAX_TOOL_CHARS`] characters, ending with the truncation
/// marker when anything was cut.
pub fn truncate_for_prompt(text: &str) -> String {
    if text.chars().count() <= MAX_TOOL_CHARS {
        return text.to_string();
    }
    let keep = MAX_TOOL_CHARS - TRUNCATION_MARKER.chars().count();
    let mut out: String = text.chars().take(keep).collect();
    out.push_str(TRUNCATION_MARKER);
    out
}

pub fn scrape_website(url: &str) -> Result<ScrapedPage, ToolError> {
    scrape_website_with_timeout(url, Duration::from_secs(30))
}

pub fn scrape_website_with_timeout(url: &str, timeout: Duration) -> Result<ScrapedPage, ToolError> {
    if !(url.starts_with("http://") || url.starts_with("https://")) {
        return Err(ToolError::InvalidUrl(url.to_string()));
    }
    let agent = ureq::AgentBuilder::new().timeout(timeout).build();
    let resp = match agent.get(url).call() {
        Ok(r) => r,
        Err(ureq::Error::Status(status, _)) => {
            return Err(ToolError::HttpStatus {
                status,
                url: url.to_string(),
            })
        }
        Err(ureq::Error::Transport(t)) => {
            return Err(ToolError::Network {
                url: url.to_string(),
                message: t.to_string(),
            })
        }
    };
    let plain = resp.content_type().eq_ignore_ascii_case("text/plain");
    let body = resp.into_string().map_err(|e| ToolError::Network {
        url: url.to_string(),
        message: e.to_string(),
    })?;
    let text = if plain {
        body.trim().to_string()
    } else {
        html_to_text(&body)
    };
    if text.is_empty() {
        return Err(ToolError::EmptyContent(url.to_string()));
    }
    Ok(ScrapedPage {
        url: url.to_string(),
        text: truncate_for_prompt(&text),
        bytes_fetched: body.len(),
    })
}
