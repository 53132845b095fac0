//! CSV ingestion and emission of two-group scored datasets.

use std::collections::BTreeSet;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::metrics::{compute_prf, GroupRoles, ScoredSample};
use crate::numfmt::g17;

/// Header names of the four required columns.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ColumnMap {
    pub id: String,
    pub group: String,
    pub label: String,
    pub score: String,
}

impl Default for ColumnMap {
    fn default() -> Self {
        ColumnMap {
            id: "id".into(),
            group: "group".into(),
            label: "label".into(),
            score: "score".into(),
        }
    }
}

/// How the anchor group is picked.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum AnchorChoice {
    /// The group with the higher PRF is the anchor; the other one is adjusted.
    #[default]
    Auto,
    Tag(String),
}

impl FromStr for AnchorChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "auto" => AnchorChoice::Auto,
            tag => AnchorChoice::Tag(tag.to_string()),
        })
    }
}

/// Where a dataset came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Provenance {
    pub source: String,
    pub columns: ColumnMap,
}

/// Samples from exactly two groups, with the original CSV rows kept so they
/// can be written back out unchanged.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub samples: Vec<ScoredSample>,
    pub roles: GroupRoles,
    pub provenance: Provenance,
    headers: Vec<String>,
    rows: Vec<Vec<String>>,
}

fn parse_label(raw: &str) -> std::result::Result<bool, &'static str> {
    match raw.trim() {
        "1" | "1.0" | "true" | "True" | "TRUE" => Ok(true),
        "0" | "0.0" | "false" | "False" | "FALSE" => Ok(false),
        other if other.parse::<f64>().is_ok() => Err("out-of-domain"),
        _ => Err("not a 0/1 label"),
    }
}

fn parse_score(raw: &str) -> std::result::Result<f64, &'static str> {
    match raw.trim().parse::<f64>() {
        Ok(s) if s.is_finite() => Ok(s),
        Ok(_) => Err("non-finite"),
        Err(_) => Err("not a number"),
    }
}

impl Dataset {
    /// Wraps in-memory samples, synthesizing rows in the default schema.
    pub fn from_samples(
        samples: Vec<ScoredSample>,
        anchor: &AnchorChoice,
        source: impl Into<String>,
    ) -> Result<Self> {
        let columns = ColumnMap::default();
        let headers = vec![
            columns.id.clone(),
            columns.group.clone(),
            columns.label.clone(),
            columns.score.clone(),
        ];
        let rows = samples
            .iter()
            .map(|s| vec![s.id.clone(), s.group.clone(), (s.label as u8).to_string(), g17(s.score)])
            .collect();
        let roles = resolve_roles(&samples, anchor)?;
        Ok(Dataset {
            samples,
            roles,
            provenance: Provenance {
                source: source.into(),
                columns,
            },
            headers,
            rows,
        })
    }

    pub fn headers(&self) -> &[String] {
        &self.headers
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Tags present in the data, sorted.
    pub fn groups(&self) -> BTreeSet<&str> {
        self.samples.iter().map(|s| s.group.as_str()).collect()
    }

    /// Reassigns roles, e.g. so a test split follows its training split.
    pub fn with_roles(mut self, roles: GroupRoles) -> Result<Self> {
        for s in &self.samples {
            roles.side_of(&s.group)?;
        }
        self.roles = roles;
        Ok(self)
    }

    /// Reproducible random partition into `(first, rest)`, where `first`
    /// holds `round(fraction · n)` samples. Both keep the original row order
    /// and this dataset's roles.
    pub fn split(&self, fraction: f64, seed: u64) -> Result<(Dataset, Dataset)> {
        if !(fraction > 0.0 && fraction < 1.0) {
            return Err(Error::Config(format!("split fraction must be in (0, 1), got {fraction}")));
        }
        let mut idx: Vec<usize> = (0..self.len()).collect();
        idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let cut = (fraction * self.len() as f64).round() as usize;
        let (mut first, mut rest) = (idx[..cut].to_vec(), idx[cut..].to_vec());
        first.sort_unstable();
        rest.sort_unstable();
        Ok((self.subset(&first, "train"), self.subset(&rest, "test")))
    }

    fn subset(&self, idx: &[usize], part: &str) -> Dataset {
        Dataset {
            samples: idx.iter().map(|&i| self.samples[i].clone()).collect(),
            roles: self.roles.clone(),
            provenance: Provenance {
                source: format!("{}#{part}", self.provenance.source),
                columns: self.provenance.columns.clone(),
            },
            headers: self.headers.clone(),
            rows: idx.iter().map(|&i| self.rows[i].clone()).collect(),
        }
    }

    /// Writes the original columns, plus an `adjusted_score` column when
    /// adjusted scores are given.
    pub fn write_csv<W: Write>(&self, out: W, adjusted: Option<&[f64]>) -> Result<()> {
        if let Some(adj) = adjusted {
            if adj.len() != self.len() {
                return Err(Error::Config(format!(
                    "{} adjusted scores for {} samples",
                    adj.len(),
                    self.len()
                )));
            }
        }
        let mut w = csv::Writer::from_writer(out);
        let mut header = self.headers.clone();
        if adjusted.is_some() {
            header.push("adjusted_score".into());
        }
        w.write_record(&header)?;
        for (t, row) in self.rows.iter().enumerate() {
            let mut record = row.clone();
            if let Some(adj) = adjusted {
                record.push(g17(adj[t]));
            }
            w.write_record(&record)?;
        }
        w.flush().map_err(|e| Error::io(&self.provenance.source, e))?;
        Ok(())
    }

    pub fn write_csv_file(&self, path: &Path, adjusted: Option<&[f64]>) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_csv(std::io::BufWriter::new(file), adjusted)
    }
}

/// Reads a dataset from CSV text. Line numbers in errors count the header
/// as line 1.
pub fn read_csv<R: Read>(
    input: R,
    source: impl Into<String>,
    columns: &ColumnMap,
    anchor: &AnchorChoice,
) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new().flexible(true).from_reader(input);
    let headers: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    let find = |name: &str| {
        headers.iter().position(|h| h == name).ok_or_else(|| Error::Parse {
            line: 1,
            column: name.to_string(),
            reason: "column not found in header".into(),
        })
    };
    let (c_id, c_group, c_label, c_score) = (
        find(&columns.id)?,
        find(&columns.group)?,
        find(&columns.label)?,
        find(&columns.score)?,
    );

    let mut samples = Vec::new();
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        let field = |col: usize, name: &str| {
            record.get(col).filter(|v| !v.trim().is_empty()).ok_or_else(|| Error::Parse {
                line,
                column: name.to_string(),
                reason: "missing".into(),
            })
        };
        let fail = |name: &str, reason: &str| Error::Parse {
            line,
            column: name.to_string(),
            reason: reason.to_string(),
        };
        let id = field(c_id, &columns.id)?;
        let group = field(c_group, &columns.group)?;
        let label = parse_label(field(c_label, &columns.label)?).map_err(|r| fail(&columns.label, r))?;
        let score = parse_score(field(c_score, &columns.score)?).map_err(|r| fail(&columns.score, r))?;
        if record.len() != headers.len() {
            return Err(fail("*", &format!("expected {} fields, found {}", headers.len(), record.len())));
        }
        samples.push(ScoredSample {
            id: id.to_string(),
            group: group.to_string(),
            label,
            score,
        });
        rows.push(record.iter().map(str::to_string).collect());
    }
    let roles = resolve_roles(&samples, anchor)?;
    Ok(Dataset {
        samples,
        roles,
        provenance: Provenance {
            source: source.into(),
            columns: columns.clone(),
        },
        headers,
        rows,
    })
}

pub fn ingest_csv(path: &Path, columns: &ColumnMap, anchor: &AnchorChoice) -> Result<Dataset> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_csv(std::io::BufReader::new(file), path.display().to_string(), columns, anchor)
}

/// Decides roles from the two tags present. In automatic mode the group
/// with the lower PRF becomes the adjusted group, and on equal PRF (or when
/// either PRF is undefined) the alphabetically first tag stays the anchor.
fn resolve_roles(samples: &[ScoredSample], anchor: &AnchorChoice) -> Result<GroupRoles> {
    let tags: BTreeSet<&str> = samples.iter().map(|s| s.group.as_str()).collect();
    if tags.len() != 2 {
        return Err(Error::GroupCount {
            found: tags.into_iter().map(String::from).collect(),
        });
    }
    let mut it = tags.into_iter();
    let (first, second) = (it.next().unwrap(), it.next().unwrap());
    match anchor {
        AnchorChoice::Tag(t) if t == first => Ok(GroupRoles::new(first, second)),
        AnchorChoice::Tag(t) if t == second => Ok(GroupRoles::new(second, first)),
        AnchorChoice::Tag(t) => Err(Error::Config(format!(
            "anchor group `{t}` is not one of `{first}`, `{second}`"
        ))),
        AnchorChoice::Auto => match (compute_prf(samples, first), compute_prf(samples, second)) {
            (Ok(p1), Ok(p2)) if p1.exact() < p2.exact() => Ok(GroupRoles::new(second, first)),
            (Ok(_), Ok(_)) => Ok(GroupRoles::new(first, second)),
            _ => {
                log::warn!("PRF undefined for a group; anchoring `{first}` by tag order");
                Ok(GroupRoles::new(first, second))
            }
        },
    }
}
