//! Line-oriented dataset parsing.
//!
//! Dumps are one tag assignment per line: a user, a resource, a tag and a
//! timestamp in configurable column positions, separated by a configurable
//! delimiter. Extra columns are ignored, which lets the parser consume raw
//! production dumps that carry additional fields. Timestamps may be epoch
//! seconds or ISO-8601 and are normalized to UTC epoch seconds with
//! sub-second precision truncated.
//!
//! Assignments are folded into posts with two rules, applied in this order:
//! exact duplicate (user, resource, tag) lines collapse onto the earliest
//! timestamp, and if a (user, resource) pair still carries several distinct
//! timestamps afterwards, the latest timestamp's tag set wins wholesale (a
//! re-bookmark supersedes earlier ones, and leave-one-out needs exactly one
//! bookmark per pair).

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use chrono::{DateTime, NaiveDateTime};
use folkrec_core::{Folksonomy, Post};

use crate::error::{io_err, DataError, UsageError};

/// Column positions, delimiter and header handling for a dump file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnFormat {
    pub user: usize,
    pub resource: usize,
    pub tag: usize,
    pub timestamp: usize,
    pub delimiter: char,
    pub has_header: bool,
}

impl Default for ColumnFormat {
    fn default() -> Self {
        ColumnFormat {
            user: 0,
            resource: 1,
            tag: 2,
            timestamp: 3,
            delimiter: '\t',
            has_header: false,
        }
    }
}

impl ColumnFormat {
    /// Reorders columns according to `spec`, a comma-separated list holding
    /// `user`, `resource`, `tag` and `timestamp`, each exactly once, plus
    /// any number of `-` placeholders for columns to ignore (raw dumps often
    /// carry extra fields like a content type).
    pub fn with_columns(mut self, spec: &str) -> Result<Self, UsageError> {
        let invalid = |reason: &str| UsageError::InvalidColumns {
            spec: spec.to_string(),
            reason: reason.to_string(),
        };
        let names: Vec<&str> = spec.split(',').map(str::trim).collect();
        for name in &names {
            if !matches!(*name, "user" | "resource" | "tag" | "timestamp" | "-" | "_") {
                return Err(invalid(&format!("unknown column {name:?}")));
            }
        }
        let position = |wanted: &str| {
            let mut found = names.iter().enumerate().filter(|(_, n)| **n == wanted);
            match (found.next(), found.next()) {
                (Some((i, _)), None) => Ok(i),
                (None, _) => Err(invalid(&format!("missing column {wanted:?}"))),
                (Some(_), Some(_)) => Err(invalid(&format!("column {wanted:?} given twice"))),
            }
        };
        self.user = position("user")?;
        self.resource = position("resource")?;
        self.tag = position("tag")?;
        self.timestamp = position("timestamp")?;
        Ok(self)
    }

    /// Parses a delimiter name (`tab`, `comma`, `semicolon`, `space`) or a
    /// single literal character.
    pub fn with_delimiter(mut self, spec: &str) -> Result<Self, UsageError> {
        self.delimiter = match spec {
            "tab" | "\\t" => '\t',
            "comma" => ',',
            "semicolon" => ';',
            "space" => ' ',
            other => {
                let mut chars = other.chars();
                match (chars.next(), chars.next()) {
                    (Some(c), None) => c,
                    _ => return Err(UsageError::InvalidDelimiter(spec.to_string())),
                }
            }
        };
        Ok(self)
    }

    fn required_fields(&self) -> usize {
        self.user
            .max(self.resource)
            .max(self.tag)
            .max(self.timestamp)
            + 1
    }
}

/// Epoch seconds or ISO-8601 (with or without offset), truncated to seconds.
pub fn parse_timestamp(text: &str) -> Result<i64, String> {
    let text = text.trim();
    let seconds = if let Ok(epoch) = text.parse::<i64>() {
        epoch
    } else if let Ok(dt) = DateTime::parse_from_rfc3339(text) {
        dt.timestamp()
    } else if let Ok(dt) = NaiveDateTime::parse_from_str(text, "%Y-%m-%dT%H:%M:%S%.f") {
        dt.and_utc().timestamp()
    } else if let Ok(dt) = NaiveDateTime::parse_from_str(text, "%Y-%m-%d %H:%M:%S%.f") {
        dt.and_utc().timestamp()
    } else {
        return Err(format!("unparseable timestamp {text:?}"));
    };
    if seconds < 0 {
        return Err(format!("timestamp {text:?} is before the epoch"));
    }
    Ok(seconds)
}

/// Parses a dump into a folksonomy with one post per (user, resource).
pub fn parse_dataset<R: BufRead>(
    reader: R,
    format: &ColumnFormat,
) -> Result<Folksonomy, DataError> {
    let malformed = |line: usize, reason: String| DataError::MalformedLine { line, reason };
    // (user, resource) -> tag -> earliest timestamp
    let mut groups: BTreeMap<(String, String), BTreeMap<String, i64>> = BTreeMap::new();
    let required = format.required_fields();

    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|e| malformed(line_no, e.to_string()))?;
        if format.has_header && i == 0 {
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(format.delimiter).collect();
        if fields.len() < required {
            return Err(malformed(
                line_no,
                format!(
                    "expected at least {required} fields, found {}",
                    fields.len()
                ),
            ));
        }
        let user = fields[format.user].trim();
        let resource = fields[format.resource].trim();
        let tag = fields[format.tag].trim();
        if user.is_empty() || resource.is_empty() || tag.is_empty() {
            return Err(malformed(
                line_no,
                "empty user, resource or tag field".to_string(),
            ));
        }
        let timestamp =
            parse_timestamp(fields[format.timestamp]).map_err(|e| malformed(line_no, e))?;
        groups
            .entry((user.to_string(), resource.to_string()))
            .or_default()
            .entry(tag.to_string())
            .and_modify(|t| *t = (*t).min(timestamp))
            .or_insert(timestamp);
    }

    if groups.is_empty() {
        return Err(DataError::EmptyDataset);
    }

    let mut posts = Vec::with_capacity(groups.len());
    for ((user, resource), tags) in groups {
        let latest = *tags.values().max().unwrap();
        let kept: Vec<String> = tags
            .into_iter()
            .filter(|&(_, ts)| ts == latest)
            .map(|(t, _)| t)
            .collect();
        posts.push(Post::new(user, resource, kept, latest)?);
    }
    Ok(Folksonomy::from_posts(posts)?)
}

/// [`parse_dataset`] over a file path.
pub fn parse_dataset_file(path: &Path, format: &ColumnFormat) -> Result<Folksonomy, DataError> {
    let file = File::open(path).map_err(io_err(path))?;
    parse_dataset(BufReader::new(file), format)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Cursor;

    fn parse(text: &str) -> Result<Folksonomy, DataError> {
        parse_dataset(Cursor::new(text), &ColumnFormat::default())
    }

    #[test]
    fn two_lines_one_post() {
        let f = parse("u1\tr1\tcat\t100\nu1\tr1\tdog\t100\n").unwrap();
        let s = f.stats();
        assert_eq!(s.bookmarks, 1);
        assert_eq!(s.assignments, 2);
        assert_eq!(s.users, 1);
        assert_eq!(s.resources, 1);
        assert_eq!(s.tags, 2);
    }

    #[test]
    fn empty_input_is_an_error() {
        assert!(matches!(parse(""), Err(DataError::EmptyDataset)));
        assert!(matches!(parse("\n  \n"), Err(DataError::EmptyDataset)));
    }

    #[test]
    fn malformed_line_reports_line_number() {
        let err = parse("u1\tr1\tcat\t100\nu2\tr2\tdog\n").unwrap_err();
        match err {
            DataError::MalformedLine { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn bad_timestamp_reports_line_number() {
        let err = parse("u1\tr1\tcat\tnot-a-time\n").unwrap_err();
        assert!(matches!(err, DataError::MalformedLine { line: 1, .. }));
    }

    #[test]
    fn duplicate_assignment_keeps_earliest_timestamp() {
        let f = parse("u1\tr1\tcat\t200\nu1\tr1\tcat\t100\n").unwrap();
        assert_eq!(f.posts()[0].timestamp, 100);
    }

    #[test]
    fn rebookmark_supersedes_wholesale() {
        let f = parse("u1\tr1\tcat\t100\nu1\tr1\tdog\t200\n").unwrap();
        assert_eq!(f.posts().len(), 1);
        assert_eq!(f.posts()[0].timestamp, 200);
        assert_eq!(f.posts()[0].tags(), ["dog"]);
    }

    #[test]
    fn iso_timestamps_and_epoch_mix() {
        let f = parse("u1\tr1\tcat\t2012-01-01T10:30:00Z\nu1\tr2\tdog\t100\n").unwrap();
        assert_eq!(f.posts().len(), 2);
        let iso = f.posts().iter().find(|p| p.resource == "r1").unwrap();
        assert_eq!(iso.timestamp, 1325413800);
    }

    #[test]
    fn subsecond_precision_is_truncated() {
        assert_eq!(
            parse_timestamp("2012-01-01 10:30:00.987").unwrap(),
            1325413800
        );
        assert_eq!(
            parse_timestamp("2012-01-01T10:30:00.987+00:00").unwrap(),
            1325413800
        );
    }

    #[test]
    fn pre_epoch_timestamps_rejected() {
        assert!(parse_timestamp("-5").is_err());
        assert!(parse_timestamp("1969-12-31T23:59:59Z").is_err());
    }

    #[test]
    fn custom_column_order_and_delimiter() {
        let format = ColumnFormat::default()
            .with_columns("timestamp,tag,user,resource")
            .unwrap()
            .with_delimiter("comma")
            .unwrap();
        let f = parse_dataset(Cursor::new("100,cat,u1,r1\n"), &format).unwrap();
        assert_eq!(f.posts()[0].user, "u1");
        assert_eq!(f.posts()[0].tags(), ["cat"]);
    }

    #[test]
    fn extra_columns_are_ignored() {
        let f = parse("u1\tr1\tcat\t100\textra\tmore\n").unwrap();
        assert_eq!(f.stats().assignments, 1);
    }

    #[test]
    fn header_row_skipped_when_configured() {
        let format = ColumnFormat {
            has_header: true,
            ..ColumnFormat::default()
        };
        let f = parse_dataset(
            Cursor::new("user\tresource\ttag\ttimestamp\nu1\tr1\tcat\t100\n"),
            &format,
        )
        .unwrap();
        assert_eq!(f.stats().bookmarks, 1);
    }

    #[test]
    fn placeholder_columns_skip_extra_fields() {
        // Layout of the BibSonomy tas dump: user, tag, resource, a content
        // type to ignore, then the date.
        let format = ColumnFormat::default()
            .with_columns("user,tag,resource,-,timestamp")
            .unwrap();
        let f = parse_dataset(
            Cursor::new("7\tsemantic\t123abc\t2\t2006-01-26 15:34:59\n"),
            &format,
        )
        .unwrap();
        assert_eq!(f.posts()[0].user, "7");
        assert_eq!(f.posts()[0].resource, "123abc");
        assert_eq!(f.posts()[0].tags(), ["semantic"]);
    }

    #[test]
    fn invalid_column_spec_rejected() {
        assert!(ColumnFormat::default()
            .with_columns("user,resource,tag")
            .is_err());
        assert!(ColumnFormat::default()
            .with_columns("user,resource,tag,tag")
            .is_err());
        assert!(ColumnFormat::default()
            .with_columns("user,resource,tag,time")
            .is_err());
        assert!(ColumnFormat::default().with_delimiter("ab").is_err());
    }
}
