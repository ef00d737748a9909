use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::synth::form::{match_ry_form_with, RyMatch};
use crate::synth::gates::GateSequence;
use crate::synth::search::{enumerate, Enumeration, SearchOptions};

/// Table keys are angles in thousandths of a degree.
pub const ANGLE_RESOLUTION_DEG: f64 = 0.001;

const HEADER: &str = "angle_deg,r,epsilon_deg,length,sequence";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Policy {
    /// Smallest `r`, then shortest, then lex smallest word.
    BestRFirst,
    /// Shortest, then smallest `r`, then lex smallest word.
    ShortestFirst,
}

/// Values of `r` closer than this are treated as equal when ranking entries.
pub const R_TIE_TOL: f64 = 1e-12;

fn cmp_r(a: f64, b: f64) -> Ordering {
    if (a - b).abs() <= R_TIE_TOL {
        Ordering::Equal
    } else {
        a.total_cmp(&b)
    }
}

impl Policy {
    pub const ALL: [Policy; 2] = [Policy::BestRFirst, Policy::ShortestFirst];

    fn file_stem(self) -> &'static str {
        match self {
            Policy::BestRFirst => "best_r",
            Policy::ShortestFirst => "shortest",
        }
    }

    fn prefers(self, a: &AngleEntry, b: &AngleEntry) -> bool {
        let r = cmp_r(a.r, b.r);
        let ord = match self {
            Policy::BestRFirst => r.then(a.length.cmp(&b.length)),
            Policy::ShortestFirst => a.length.cmp(&b.length).then(r),
        };
        ord.then_with(|| a.seq.cmp(&b.seq)) == Ordering::Less
    }
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Policy::BestRFirst => "best_r_first",
            Policy::ShortestFirst => "shortest_first",
        })
    }
}

impl FromStr for Policy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "best_r_first" | "best" => Ok(Policy::BestRFirst),
            "shortest_first" | "shortest" => Ok(Policy::ShortestFirst),
            other => Err(Error::invalid(format!("unknown policy {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Positive,
    Negative,
}

impl Sign {
    pub const ALL: [Sign; 2] = [Sign::Positive, Sign::Negative];
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Positive => "positive",
            Sign::Negative => "negative",
        })
    }
}

impl FromStr for Sign {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "positive" => Ok(Sign::Positive),
            "negative" => Ok(Sign::Negative),
            other => Err(Error::invalid(format!("unknown sign {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AngleEntry {
    /// Rounded to [`ANGLE_RESOLUTION_DEG`].
    pub angle_deg: f64,
    pub r: f64,
    pub epsilon_deg: f64,
    pub length: usize,
    pub seq: GateSequence,
}

/// `round(angle / 0.001°)`.
pub fn angle_key(angle_deg: f64) -> i64 {
    (angle_deg / ANGLE_RESOLUTION_DEG).round() as i64
}

fn key_to_deg(key: i64) -> f64 {
    key as f64 / 1000.0
}

#[derive(Debug, Clone, PartialEq)]
pub struct AngleTable {
    pub policy: Policy,
    pub sign: Sign,
    pub max_length: usize,
    /// Set when the search that produced this table stopped early.
    pub warning: Option<String>,
    entries: Vec<AngleEntry>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapStats {
    pub angle_count: usize,
    pub mean_gap: f64,
    pub max_gap: f64,
    pub min_gap: f64,
    pub gaps_over_one_degree: usize,
}

impl AngleTable {
    pub fn new(policy: Policy, sign: Sign, max_length: usize, mut entries: Vec<AngleEntry>) -> Result<Self> {
        entries.sort_by(|a, b| a.angle_deg.total_cmp(&b.angle_deg));
        if entries
            .windows(2)
            .any(|w| angle_key(w[0].angle_deg) == angle_key(w[1].angle_deg))
        {
            return Err(Error::invalid("duplicate angle in table"));
        }
        Ok(AngleTable {
            policy,
            sign,
            max_length,
            warning: None,
            entries,
        })
    }

    /// Sorted by angle ascending.
    pub fn entries(&self) -> &[AngleEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, angle_deg: f64) -> Option<&AngleEntry> {
        let key = angle_key(angle_deg);
        self.entries.iter().find(|e| angle_key(e.angle_deg) == key)
    }

    /// Nearest entry; ties go to the smaller `|angle|`.
    pub fn lookup(&self, phi_deg: f64) -> Result<&AngleEntry> {
        nearest(self.entries.iter(), phi_deg)
    }

    /// Successive differences of the stored angles.
    pub fn gap_stats(&self) -> Option<GapStats> {
        let gaps: Vec<f64> = self
            .entries
            .windows(2)
            .map(|w| w[1].angle_deg - w[0].angle_deg)
            .collect();
        if gaps.is_empty() {
            return None;
        }
        Some(GapStats {
            angle_count: self.entries.len(),
            mean_gap: gaps.iter().sum::<f64>() / gaps.len() as f64,
            max_gap: gaps.iter().copied().fold(f64::MIN, f64::max),
            min_gap: gaps.iter().copied().fold(f64::MAX, f64::min),
            gaps_over_one_degree: gaps.iter().filter(|&&g| g > 1.0).count(),
        })
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!(
            "# max_length={}\n# policy={}\n# sign={}\n",
            self.max_length, self.policy, self.sign
        );
        if let Some(w) = &self.warning {
            out.push_str(&format!("# warning={w}\n"));
        }
        out.push_str(HEADER);
        out.push('\n');
        for e in &self.entries {
            out.push_str(&format!(
                "{:.3},{},{},{},{}\n",
                e.angle_deg, e.r, e.epsilon_deg, e.length, e.seq
            ));
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut max_length = None;
        let mut policy = None;
        let mut sign = None;
        let mut warning = None;
        let mut saw_header = false;
        let mut entries = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let err = |msg: String| Error::Parse { line: line_no, msg };
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(comment) = line.strip_prefix('#') {
                let comment = comment.trim();
                if let Some((k, v)) = comment.split_once('=') {
                    match k.trim() {
                        "max_length" => {
                            max_length = Some(v.trim().parse::<usize>().map_err(|_| err(format!("invalid max_length {v:?}")))?)
                        }
                        "policy" => policy = Some(v.trim().parse::<Policy>().map_err(|e| err(e.to_string()))?),
                        "sign" => sign = Some(v.trim().parse::<Sign>().map_err(|e| err(e.to_string()))?),
                        "warning" => warning = Some(v.trim().to_string()),
                        _ => {}
                    }
                }
                continue;
            }
            if !saw_header {
                if line != HEADER {
                    return Err(err(format!("expected header `{HEADER}`")));
                }
                saw_header = true;
                continue;
            }
            let f: Vec<&str> = line.split(',').map(str::trim).collect();
            if f.len() != 5 {
                return Err(err(format!("expected 5 fields, found {}", f.len())));
            }
            let num = |s: &str| s.parse::<f64>().map_err(|_| err(format!("invalid number {s:?}")));
            let seq: GateSequence = f[4].parse().map_err(|e: Error| err(e.to_string()))?;
            let length: usize = f[3].parse().map_err(|_| err(format!("invalid length {:?}", f[3])))?;
            if length != seq.len() {
                return Err(err(format!("length {length} does not match sequence {:?}", f[4])));
            }
            entries.push(AngleEntry {
                angle_deg: num(f[0])?,
                r: num(f[1])?,
                epsilon_deg: num(f[2])?,
                length,
                seq,
            });
        }
        let missing = |what: &str| Error::Parse {
            line: 1,
            msg: format!("missing `# {what}=` comment"),
        };
        if !saw_header {
            return Err(Error::Parse {
                line: 1,
                msg: format!("missing header `{HEADER}`"),
            });
        }
        let mut table = AngleTable::new(
            policy.ok_or_else(|| missing("policy"))?,
            sign.ok_or_else(|| missing("sign"))?,
            max_length.ok_or_else(|| missing("max_length"))?,
            entries,
        )?;
        table.warning = warning;
        Ok(table)
    }
}

pub(crate) fn nearest<'a>(entries: impl Iterator<Item = &'a AngleEntry>, phi_deg: f64) -> Result<&'a AngleEntry> {
    entries
        .min_by(|a, b| {
            let da = (a.angle_deg - phi_deg).abs();
            let db = (b.angle_deg - phi_deg).abs();
            da.total_cmp(&db)
                .then(a.angle_deg.abs().total_cmp(&b.angle_deg.abs()))
        })
        .ok_or(Error::EmptyTable)
}

/// The four tables produced by one search.
#[derive(Debug, Clone, PartialEq)]
pub struct TableSet {
    tables: BTreeMap<(Policy, Sign), AngleTable>,
}

impl TableSet {
    pub fn new(tables: Vec<AngleTable>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for t in tables {
            if map.insert((t.policy, t.sign), t).is_some() {
                return Err(Error::invalid("duplicate table"));
            }
        }
        for p in Policy::ALL {
            for s in Sign::ALL {
                if !map.contains_key(&(p, s)) {
                    return Err(Error::invalid(format!("missing {p} {s} table")));
                }
            }
        }
        Ok(TableSet { tables: map })
    }

    pub fn get(&self, policy: Policy, sign: Sign) -> &AngleTable {
        &self.tables[&(policy, sign)]
    }

    pub fn tables(&self) -> impl Iterator<Item = &AngleTable> {
        self.tables.values()
    }

    pub fn max_length(&self) -> usize {
        self.get(Policy::BestRFirst, Sign::Positive).max_length
    }

    /// Nearest entry in the table matching the sign of `phi`.
    pub fn lookup(&self, policy: Policy, phi_deg: f64) -> Result<&AngleEntry> {
        self.table_for(policy, phi_deg).lookup(phi_deg)
    }

    /// As [`TableSet::lookup`] but never returns a 0° entry.
    pub fn lookup_nonzero(&self, policy: Policy, phi_deg: f64) -> Result<&AngleEntry> {
        let t = self.table_for(policy, phi_deg);
        nearest(t.entries().iter().filter(|e| angle_key(e.angle_deg) != 0), phi_deg)
    }

    fn table_for(&self, policy: Policy, phi_deg: f64) -> &AngleTable {
        let sign = if phi_deg < 0.0 { Sign::Negative } else { Sign::Positive };
        self.get(policy, sign)
    }

    pub fn file_name(policy: Policy, sign: Sign) -> String {
        format!("ry_{}_{}.csv", policy.file_stem(), sign)
    }

    pub fn write_dir(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir)?;
        for t in self.tables() {
            std::fs::write(dir.join(Self::file_name(t.policy, t.sign)), t.to_csv())?;
        }
        Ok(())
    }

    pub fn read_dir(dir: impl AsRef<Path>) -> Result<Self> {
        let dir = dir.as_ref();
        let mut tables = Vec::new();
        for p in Policy::ALL {
            for s in Sign::ALL {
                let path = dir.join(Self::file_name(p, s));
                let text = std::fs::read_to_string(&path)
                    .map_err(|e| Error::invalid(format!("{}: {e}", path.display())))?;
                let t = AngleTable::from_csv(&text)?;
                if t.policy != p || t.sign != s {
                    return Err(Error::invalid(format!(
                        "{} holds the {} {} table",
                        path.display(),
                        t.policy,
                        t.sign
                    )));
                }
                tables.push(t);
            }
        }
        Self::new(tables)
    }
}

/// Accumulates accepted matches into the four tables.
#[derive(Debug, Default)]
pub struct TableBuilder {
    best: BTreeMap<(Policy, Sign, i64), AngleEntry>,
}

impl TableBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, m: &RyMatch, seq: &GateSequence) {
        let key = angle_key(m.angle_deg);
        let mut slots = Vec::with_capacity(2);
        if key.abs() == 180_000 {
            slots.push((Sign::Positive, 180_000));
            slots.push((Sign::Negative, -180_000));
        } else if key == 0 {
            slots.push((Sign::Positive, 0));
            slots.push((Sign::Negative, 0));
        } else if key > 0 {
            slots.push((Sign::Positive, key));
        } else {
            slots.push((Sign::Negative, key));
        }
        for (sign, key) in slots {
            let entry = AngleEntry {
                angle_deg: key_to_deg(key),
                r: m.r,
                epsilon_deg: m.epsilon_deg,
                length: seq.len(),
                seq: seq.clone(),
            };
            for policy in Policy::ALL {
                match self.best.get_mut(&(policy, sign, key)) {
                    Some(cur) if !policy.prefers(&entry, cur) => {}
                    Some(cur) => *cur = entry.clone(),
                    None => {
                        self.best.insert((policy, sign, key), entry.clone());
                    }
                }
            }
        }
    }

    pub fn finish(self, max_length: usize, warning: Option<String>) -> TableSet {
        let mut grouped: BTreeMap<(Policy, Sign), Vec<AngleEntry>> = BTreeMap::new();
        for p in Policy::ALL {
            for s in Sign::ALL {
                grouped.insert((p, s), Vec::new());
            }
        }
        for ((p, s, _), e) in self.best {
            grouped.entry((p, s)).or_default().push(e);
        }
        let tables = grouped
            .into_iter()
            .map(|((p, s), entries)| {
                let mut t = AngleTable::new(p, s, max_length, entries).expect("keys are unique");
                t.warning = warning.clone();
                t
            })
            .collect();
        TableSet::new(tables).expect("all four tables present")
    }
}

/// Runs the search and files every accepted matrix into the tables.
pub fn search(opts: &SearchOptions) -> Result<(TableSet, Enumeration)> {
    let e = enumerate(opts)?;
    let tables = tables_from_enumeration(&e, opts)?;
    Ok((tables, e))
}

pub fn tables_from_enumeration(e: &Enumeration, opts: &SearchOptions) -> Result<TableSet> {
    let mut builder = TableBuilder::new();
    for length in 1..=e.completed_length {
        let hits: Vec<(usize, RyMatch)> = e
            .keys_at(length)
            .filter_map(|(i, key)| match_ry_form_with(&key.to_complex(), opts.accept_r).map(|m| (i, m)))
            .collect();
        for (i, m) in hits {
            builder.insert(&m, &e.word(length, i));
        }
    }
    Ok(builder.finish(e.completed_length, e.warning.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn depth(l: usize) -> TableSet {
        search(&SearchOptions::new(l)).unwrap().0
    }

    #[test]
    fn depth_two_angles() {
        let t = depth(2);
        let pos = t.get(Policy::BestRFirst, Sign::Positive);
        let neg = t.get(Policy::BestRFirst, Sign::Negative);
        assert_eq!(pos.get(0.0).unwrap().seq.to_string(), "HH");
        assert_eq!(neg.get(0.0).unwrap().seq.to_string(), "HH");
        assert_eq!(neg.get(-90.0).unwrap().seq.to_string(), "XZ");
        assert_eq!(pos.get(90.0).unwrap().seq.to_string(), "ZX");
        assert_eq!(pos.get(45.0).unwrap().seq.to_string(), "HX");
        assert_eq!(neg.get(-45.0).unwrap().seq.to_string(), "HZ");
        for table in t.tables() {
            assert!(table.entries().iter().all(|e| e.r == 0.0));
        }
    }

    #[test]
    fn depth_one_has_no_entries() {
        let t = depth(1);
        assert!(t.tables().all(|t| t.is_empty()));
    }

    #[test]
    fn lookup_routes_by_sign_and_breaks_ties() {
        let t = depth(2);
        assert_eq!(t.lookup(Policy::BestRFirst, -90.0).unwrap().seq.to_string(), "XZ");
        assert_eq!(t.lookup(Policy::BestRFirst, 44.9).unwrap().angle_deg, 45.0);
        // Halfway between 0 and 45 goes to 0.
        assert_eq!(t.lookup(Policy::BestRFirst, 22.5).unwrap().angle_deg, 0.0);
        assert_eq!(t.lookup_nonzero(Policy::BestRFirst, 1.0).unwrap().angle_deg, 45.0);
    }

    #[test]
    fn empty_table_lookup_errors() {
        let t = AngleTable::new(Policy::BestRFirst, Sign::Positive, 1, vec![]).unwrap();
        assert!(matches!(t.lookup(10.0), Err(Error::EmptyTable)));
    }

    #[test]
    fn csv_round_trip() {
        let t = depth(4);
        for table in t.tables() {
            let text = table.to_csv();
            let back = AngleTable::from_csv(&text).unwrap();
            assert_eq!(back.to_csv(), text);
            assert_eq!(back.len(), table.len());
        }
    }

    #[test]
    fn csv_rejects_length_mismatch() {
        let text = "# max_length=2\n# policy=best_r_first\n# sign=positive\nangle_deg,r,epsilon_deg,length,sequence\n90.000,0,0,3,ZX\n";
        assert!(matches!(AngleTable::from_csv(text), Err(Error::Parse { line: 5, .. })));
    }

    #[test]
    fn policies_order_candidates() {
        let long = AngleEntry {
            angle_deg: 1.0,
            r: 0.01,
            epsilon_deg: 0.0,
            length: 9,
            seq: "HTHTHTHTH".parse().unwrap(),
        };
        let short = AngleEntry {
            r: 0.05,
            length: 3,
            seq: "HTH".parse().unwrap(),
            ..long.clone()
        };
        assert!(Policy::BestRFirst.prefers(&long, &short));
        assert!(Policy::ShortestFirst.prefers(&short, &long));
    }
}
