//! OEIS search client with a persistent single-file cache.
//!
//! Queries go to the public JSON search endpoint; each raw response body
//! is cached under its normalized query string, so repeated lookups work
//! offline and replay identically. Only the id, name, and data fields of
//! a result are consumed.
//!
//! The endpoint can be overridden with the `DIAMONDS_OEIS_URL`
//! environment variable (used by the tests).

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;
use std::time::{Duration, SystemTime, UNIX_EPOCH};
use thiserror::Error;

const DEFAULT_ENDPOINT: &str = "https://oeis.org/search";

#[derive(Debug, Error)]
pub enum OeisError {
    #[error("{0}")]
    Network(String),
    #[error("cannot read or write the cache: {0}")]
    Cache(String),
    #[error("unexpected response shape: {0}")]
    Malformed(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OeisRecord {
    pub id: String,
    pub terms: Vec<i64>,
    pub name: String,
}

#[derive(Default, Serialize, Deserialize)]
struct Cache {
    entries: BTreeMap<String, CacheEntry>,
}

#[derive(Serialize, Deserialize)]
struct CacheEntry {
    fetched_at: u64,
    body: String,
}

/// Builds the search query: either `id:A######` or the plain term list
/// with whitespace stripped.
pub fn normalize_query(terms: Option<&str>, id: Option<&str>) -> Result<String, String> {
    match (terms, id) {
        (Some(t), None) => {
            let cleaned: String = t.chars().filter(|c| !c.is_whitespace()).collect();
            if cleaned.is_empty() {
                return Err("--terms is empty".into());
            }
            if !cleaned
                .chars()
                .all(|c| c.is_ascii_digit() || c == ',' || c == '-')
            {
                return Err(format!(
                    "--terms must be comma-separated integers, got {t:?}"
                ));
            }
            Ok(cleaned)
        }
        (None, Some(raw)) => {
            let id = raw.trim().to_ascii_uppercase();
            let digits = id.strip_prefix('A').unwrap_or(&id);
            if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) {
                return Err(format!("--id must look like A002294, got {raw:?}"));
            }
            Ok(format!("id:A{:06}", digits.parse::<u64>().unwrap()))
        }
        (None, None) => Err("pass --terms or --id".into()),
        (Some(_), Some(_)) => Err("pass only one of --terms and --id".into()),
    }
}

/// Answers from cache when possible, otherwise fetches and caches.
pub fn lookup(query: &str, cache_path: &Path) -> Result<Vec<OeisRecord>, OeisError> {
    let mut cache = read_cache(cache_path)?;
    if let Some(entry) = cache.entries.get(query) {
        return parse_records(&entry.body);
    }
    let body = fetch(query)?;
    let records = parse_records(&body)?;
    cache.entries.insert(
        query.to_string(),
        CacheEntry {
            fetched_at: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            body,
        },
    );
    write_cache(cache_path, &cache)?;
    Ok(records)
}

fn read_cache(path: &Path) -> Result<Cache, OeisError> {
    match std::fs::read_to_string(path) {
        Ok(text) => serde_json::from_str(&text).map_err(|e| {
            OeisError::Cache(format!("{} is not a valid cache file: {e}", path.display()))
        }),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(Cache::default()),
        Err(e) => Err(OeisError::Cache(format!("{}: {e}", path.display()))),
    }
}

fn write_cache(path: &Path, cache: &Cache) -> Result<(), OeisError> {
    let text = serde_json::to_string(cache).expect("cache serializes");
    std::fs::write(path, text).map_err(|e| OeisError::Cache(format!("{}: {e}", path.display())))
}

fn endpoint() -> String {
    std::env::var("DIAMONDS_OEIS_URL").unwrap_or_else(|_| DEFAULT_ENDPOINT.to_string())
}

fn fetch(query: &str) -> Result<String, OeisError> {
    let url = format!("{}?q={}&fmt=json", endpoint(), percent_encode(query));
    let response = ureq::get(&url)
        .timeout(Duration::from_secs(30))
        .call()
        .map_err(|e| OeisError::Network(e.to_string()))?;
    response
        .into_string()
        .map_err(|e| OeisError::Network(e.to_string()))
}

fn percent_encode(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for byte in s.bytes() {
        match byte {
            b'A'..=b'Z' | b'a'..=b'z' | b'0'..=b'9' | b'-' | b'_' | b'.' | b'~' | b',' | b':' => {
                out.push(byte as char)
            }
            other => out.push_str(&format!("%{other:02X}")),
        }
    }
    out
}

/// Accepts both response shapes seen in the wild: a top-level object
/// with a `results` array (possibly null), or a bare array.
pub fn parse_records(body: &str) -> Result<Vec<OeisRecord>, OeisError> {
    let value: serde_json::Value =
        serde_json::from_str(body).map_err(|e| OeisError::Malformed(e.to_string()))?;
    let results = match &value {
        serde_json::Value::Array(items) => items.as_slice(),
        serde_json::Value::Object(map) => match map.get("results") {
            Some(serde_json::Value::Array(items)) => items.as_slice(),
            Some(serde_json::Value::Null) | None => &[],
            Some(other) => {
                return Err(OeisError::Malformed(format!(
                    "results is {other} rather than an array"
                )))
            }
        },
        other => return Err(OeisError::Malformed(format!("top level is {other}"))),
    };
    results.iter().map(parse_record).collect()
}

fn parse_record(entry: &serde_json::Value) -> Result<OeisRecord, OeisError> {
    let id = match entry.get("number").and_then(serde_json::Value::as_u64) {
        Some(number) => format!("A{number:06}"),
        None => entry
            .get("id")
            .and_then(serde_json::Value::as_str)
            .map(str::to_string)
            .ok_or_else(|| OeisError::Malformed("result has neither number nor id".into()))?,
    };
    let name = entry
        .get("name")
        .and_then(serde_json::Value::as_str)
        .unwrap_or("")
        .to_string();
    let terms = entry
        .get("data")
        .and_then(serde_json::Value::as_str)
        .unwrap_or("")
        .split(',')
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.trim()
                .parse::<i64>()
                .map_err(|e| OeisError::Malformed(format!("bad term {t:?}: {e}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(OeisRecord { id, terms, name })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalizes_queries() {
        assert_eq!(
            normalize_query(Some("1, 5, 35, 285"), None).unwrap(),
            "1,5,35,285"
        );
        assert_eq!(
            normalize_query(None, Some("A109808")).unwrap(),
            "id:A109808"
        );
        assert_eq!(normalize_query(None, Some("a2294")).unwrap(), "id:A002294");
        assert!(normalize_query(None, Some("junk")).is_err());
        assert!(normalize_query(Some("1,two"), None).is_err());
        assert!(normalize_query(None, None).is_err());
    }

    #[test]
    fn parses_wrapped_and_bare_results() {
        let wrapped = r#"{"greeting":"hi","count":1,"results":[
            {"number":2294,"data":"1,1,5,35,285,2530","name":"Fuss-Catalan"}]}"#;
        let records = parse_records(wrapped).unwrap();
        assert_eq!(records.len(), 1);
        assert_eq!(records[0].id, "A002294");
        assert_eq!(records[0].terms[..4], [1, 1, 5, 35]);

        let bare = r#"[{"number":109808,"data":"2,14,98","name":"a(n) = 2*7^(n-1)."}]"#;
        assert_eq!(parse_records(bare).unwrap()[0].id, "A109808");

        let none = r#"{"results":null,"count":0}"#;
        assert!(parse_records(none).unwrap().is_empty());
    }

    #[test]
    fn cache_round_trips_through_lookup() {
        let dir = std::env::temp_dir().join(format!("oeis-cache-test-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("cache.json");
        let mut cache = Cache::default();
        cache.entries.insert(
            "id:A000045".into(),
            CacheEntry {
                fetched_at: 0,
                body: r#"{"results":[{"number":45,"data":"0,1,1,2,3,5","name":"Fibonacci"}]}"#
                    .into(),
            },
        );
        write_cache(&path, &cache).unwrap();
        let records = lookup("id:A000045", &path).unwrap();
        assert_eq!(records[0].id, "A000045");
        assert_eq!(records[0].terms, vec![0, 1, 1, 2, 3, 5]);
        std::fs::remove_dir_all(&dir).ok();
    }
}
