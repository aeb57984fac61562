//! Versioned snapshot of a training index.
//!
//! The container is a sorted TSV: a magic header line, a length line and one
//! escaped assignment line per (user, resource, tag) triple, ordered
//! lexicographically. Writing the same index always produces the same bytes,
//! and loading a snapshot rebuilds an index that compares equal to the
//! original.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use folkrec_core::{build_index, Folksonomy, Post, TrainingIndex};

use crate::error::{io_err, DataError};

/// Magic first line; the trailing number is the format version.
pub const SNAPSHOT_HEADER: &str = "FOLKREC-IDX v1";

fn escape(field: &str, out: &mut String) {
    for c in field.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '\t' => out.push_str("\\t"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            other => out.push(other),
        }
    }
}

fn unescape(field: &str) -> Result<String, String> {
    let mut out = String::with_capacity(field.len());
    let mut chars = field.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next() {
            Some('\\') => out.push('\\'),
            Some('t') => out.push('\t'),
            Some('n') => out.push('\n'),
            Some('r') => out.push('\r'),
            other => return Err(format!("invalid escape sequence \\{:?}", other)),
        }
    }
    Ok(out)
}

/// Serializes the index; output bytes are a pure function of the index.
pub fn write_snapshot<W: Write>(index: &TrainingIndex, mut writer: W) -> std::io::Result<()> {
    writeln!(writer, "{SNAPSHOT_HEADER}")?;
    writeln!(writer, "tas {}", index.total_assignments())?;
    let mut line = String::new();
    for user in 0..index.users().len() as u32 {
        for post in index.user_posts(user) {
            for &tag in &post.tags {
                line.clear();
                escape(index.user_name(user), &mut line);
                line.push('\t');
                escape(index.resource_name(post.resource), &mut line);
                line.push('\t');
                escape(index.tag_name(tag), &mut line);
                writeln!(writer, "{line}\t{}", post.timestamp)?;
            }
        }
    }
    Ok(())
}

/// Snapshot as an owned byte buffer.
pub fn snapshot_to_vec(index: &TrainingIndex) -> Vec<u8> {
    let mut out = Vec::new();
    write_snapshot(index, &mut out).expect("writing to a Vec cannot fail");
    out
}

pub fn write_snapshot_file(index: &TrainingIndex, path: &Path) -> Result<(), DataError> {
    let file = File::create(path).map_err(io_err(path))?;
    let mut writer = BufWriter::new(file);
    write_snapshot(index, &mut writer).map_err(io_err(path))?;
    writer.flush().map_err(io_err(path))?;
    Ok(())
}

/// Loads a snapshot, validating version, length and structure. A failed load
/// never yields a partial index.
pub fn read_snapshot<R: BufRead>(reader: R) -> Result<TrainingIndex, DataError> {
    Ok(build_index(&read_snapshot_folksonomy(reader)?))
}

/// Reads the posts stored in a snapshot back into a folksonomy.
pub fn read_snapshot_folksonomy<R: BufRead>(reader: R) -> Result<Folksonomy, DataError> {
    let corrupt = |reason: String| DataError::SnapshotCorrupt(reason);
    let mut lines = reader.lines();

    let header = lines
        .next()
        .transpose()
        .map_err(|e| corrupt(e.to_string()))?
        .ok_or_else(|| corrupt("missing magic header".to_string()))?;
    if header != SNAPSHOT_HEADER {
        if header.starts_with("FOLKREC-IDX") {
            return Err(DataError::SnapshotVersion {
                expected: SNAPSHOT_HEADER,
                found: header,
            });
        }
        return Err(corrupt(format!("bad magic header {header:?}")));
    }

    let length_line = lines
        .next()
        .transpose()
        .map_err(|e| corrupt(e.to_string()))?
        .ok_or_else(|| corrupt("missing length field".to_string()))?;
    let expected: u64 = length_line
        .strip_prefix("tas ")
        .and_then(|n| n.parse().ok())
        .ok_or_else(|| corrupt(format!("invalid length field {length_line:?}")))?;

    // (user, resource) -> (timestamp, tags)
    let mut groups: BTreeMap<(String, String), (i64, Vec<String>)> = BTreeMap::new();
    let mut found = 0u64;
    for line in lines {
        let line = line.map_err(|e| corrupt(e.to_string()))?;
        if line.is_empty() {
            continue;
        }
        found += 1;
        if found > expected {
            return Err(corrupt(format!("more than {expected} assignment lines")));
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 4 {
            return Err(corrupt(format!(
                "expected 4 fields, found {}",
                fields.len()
            )));
        }
        let user = unescape(fields[0]).map_err(corrupt)?;
        let resource = unescape(fields[1]).map_err(corrupt)?;
        let tag = unescape(fields[2]).map_err(corrupt)?;
        let timestamp: i64 = fields[3]
            .parse()
            .map_err(|_| corrupt(format!("invalid timestamp {:?}", fields[3])))?;

        let entry = groups
            .entry((user, resource))
            .or_insert((timestamp, Vec::new()));
        if entry.0 != timestamp {
            return Err(corrupt("post with conflicting timestamps".to_string()));
        }
        if entry.1.contains(&tag) {
            return Err(corrupt(format!("duplicate assignment of tag {tag:?}")));
        }
        entry.1.push(tag);
    }
    if found < expected {
        return Err(DataError::SnapshotTruncated { expected, found });
    }

    let mut posts = Vec::with_capacity(groups.len());
    for ((user, resource), (timestamp, tags)) in groups {
        posts.push(Post::new(user, resource, tags, timestamp).map_err(|e| corrupt(e.to_string()))?);
    }
    Folksonomy::from_posts(posts).map_err(|e| corrupt(e.to_string()))
}

pub fn read_snapshot_file(path: &Path) -> Result<TrainingIndex, DataError> {
    let file = File::open(path).map_err(io_err(path))?;
    read_snapshot(BufReader::new(file))
}

pub fn read_snapshot_folksonomy_file(path: &Path) -> Result<Folksonomy, DataError> {
    let file = File::open(path).map_err(io_err(path))?;
    read_snapshot_folksonomy(BufReader::new(file))
}
