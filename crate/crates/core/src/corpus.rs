//! Publication-corpus ingestion: parse work records from JSONL, build
//! per-author yearly panels (publications, new citations, collaborators,
//! institutions, topics, team sizes, countries), and apply eligibility
//! filters.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One authorship entry: an author and the institutions they signed with.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Authorship {
    pub author_id: String,
    #[serde(default)]
    pub institution_ids: Vec<String>,
}

/// A topic label with its taxonomy level (0 = discipline, >= 2 = research direction).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopicTag {
    pub topic_id: String,
    pub level: u32,
}

/// One publication record, normalized from either input format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PublicationRecord {
    pub paper_id: String,
    pub year: i32,
    pub authorships: Vec<Authorship>,
    /// institution_id -> ISO-3166 alpha-2 country code; institutions absent
    /// here are treated as unknown-country.
    #[serde(default)]
    pub institution_countries: BTreeMap<String, String>,
    #[serde(default)]
    pub topics: Vec<TopicTag>,
    #[serde(default)]
    pub references: Vec<String>,
    /// Per-year citation counts carried by the record itself; used only as a
    /// fallback when the corpus has no reference links.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub counts_by_year: Vec<YearCount>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct YearCount {
    pub year: i32,
    pub count: u32,
}

/// Input serialization of works files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WorksFormat {
    /// OpenAlex works dumps: `publication_year`, `authorships[].author.id`,
    /// `authorships[].institutions[].{id,country_code}`, `concepts[].{id,level}`,
    /// `referenced_works`, `counts_by_year`.
    OpenalexWorks,
    /// The crate's own minimal schema: a `PublicationRecord` per line.
    Flat,
}

impl std::str::FromStr for WorksFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "openalex-works" | "openalex" => Ok(WorksFormat::OpenalexWorks),
            "flat" => Ok(WorksFormat::Flat),
            other => Err(Error::validation(format!("unknown works format '{other}'"))),
        }
    }
}

/// Where yearly citation counts come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CitationSource {
    /// In-corpus reference links: citing-paper publication year = citation year.
    References,
    /// Per-record `counts_by_year` carried by the input.
    CountsByYear,
    /// References when any record carries them, counts_by_year otherwise.
    Auto,
}

/// Ingestion policy knobs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IngestConfig {
    /// Records outside this inclusive year range are dropped and counted.
    pub year_range: (i32, i32),
    pub citation_source: CitationSource,
    /// When false, a citing paper never credits authors it shares with the cited paper.
    pub count_self_citations: bool,
}

impl Default for IngestConfig {
    fn default() -> Self {
        IngestConfig {
            year_range: (2000, 2021),
            citation_source: CitationSource::Auto,
            count_self_citations: true,
        }
    }
}

/// Counters accumulated over a whole ingest run.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct CorpusStats {
    pub records_read: u64,
    /// Drop counts keyed by reason: `malformed_json`, `no_year`, `no_authorships`,
    /// `year_out_of_range`.
    pub records_dropped: BTreeMap<String, u64>,
    pub authors_built: u64,
    pub authors_eligible: u64,
    /// Set when citation counts were taken from `counts_by_year` instead of
    /// in-corpus reference links.
    pub citation_fallback_used: bool,
    /// Authors whose panels had no known-country publication year.
    pub authors_without_country: u64,
}

impl CorpusStats {
    pub fn dropped_total(&self) -> u64 {
        self.records_dropped.values().sum()
    }

    fn drop(&mut self, reason: &str) {
        *self.records_dropped.entry(reason.to_string()).or_insert(0) += 1;
    }
}

/// Per-author yearly panel.
///
/// Maps are keyed by calendar year; years with no publications have no entry
/// in `pubs_by_year` (citations can still accrue in publication-free years).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuthorYearPanel {
    pub author_id: String,
    /// Career start: year of the first publication.
    pub y0: i32,
    /// Modal level-0 topic over all the author's papers, ties broken by
    /// lexicographically smallest topic id. Empty when no level-0 topic seen.
    pub discipline: String,
    pub pubs_by_year: BTreeMap<i32, u32>,
    /// New citations received per year (citing-paper publication year).
    pub cites_by_year: BTreeMap<i32, u32>,
    pub collaborators_by_year: BTreeMap<i32, BTreeSet<String>>,
    pub institutions_by_year: BTreeMap<i32, BTreeSet<String>>,
    /// Topic ids with level >= 2, per year.
    pub topics_by_year: BTreeMap<i32, BTreeSet<String>>,
    /// Per-paper author counts, per year.
    pub teamsizes_by_year: BTreeMap<i32, Vec<u32>>,
    /// Country codes of that year's institutions; unknown-country institutions
    /// are kept in `institutions_by_year` but never appear here.
    pub country_by_year: BTreeMap<i32, BTreeSet<String>>,
    pub total_pubs: u64,
    pub total_cites: u64,
}

impl AuthorYearPanel {
    fn new(author_id: String) -> Self {
        AuthorYearPanel {
            author_id,
            y0: i32::MAX,
            discipline: String::new(),
            pubs_by_year: BTreeMap::new(),
            cites_by_year: BTreeMap::new(),
            collaborators_by_year: BTreeMap::new(),
            institutions_by_year: BTreeMap::new(),
            topics_by_year: BTreeMap::new(),
            teamsizes_by_year: BTreeMap::new(),
            country_by_year: BTreeMap::new(),
            total_pubs: 0,
            total_cites: 0,
        }
    }

    pub fn pubs_in(&self, year: i32) -> u32 {
        self.pubs_by_year.get(&year).copied().unwrap_or(0)
    }

    pub fn cites_in(&self, year: i32) -> u32 {
        self.cites_by_year.get(&year).copied().unwrap_or(0)
    }

    /// Publication counts over an inclusive year window, zero-filled.
    pub fn pub_series(&self, from: i32, to: i32) -> Vec<f64> {
        (from..=to).map(|y| f64::from(self.pubs_in(y))).collect()
    }

    /// Citation counts over an inclusive year window, zero-filled.
    pub fn cite_series(&self, from: i32, to: i32) -> Vec<f64> {
        (from..=to).map(|y| f64::from(self.cites_in(y))).collect()
    }

    pub fn pubs_total(&self, from: i32, to: i32) -> u64 {
        (from..=to).map(|y| u64::from(self.pubs_in(y))).sum()
    }

    pub fn cites_total(&self, from: i32, to: i32) -> u64 {
        (from..=to).map(|y| u64::from(self.cites_in(y))).sum()
    }

    pub fn last_pub_year(&self) -> i32 {
        self.pubs_by_year.keys().next_back().copied().unwrap_or(self.y0)
    }

    /// Union of a per-year set map over an inclusive window.
    pub fn union_over<'a>(
        map: &'a BTreeMap<i32, BTreeSet<String>>,
        from: i32,
        to: i32,
    ) -> BTreeSet<&'a str> {
        map.range(from..=to)
            .flat_map(|(_, set)| set.iter().map(String::as_str))
            .collect()
    }

    /// Mean per-paper author count over an inclusive window; None when the
    /// window holds no papers.
    pub fn mean_teamsize(&self, from: i32, to: i32) -> Option<f64> {
        let mut sum = 0u64;
        let mut n = 0u64;
        for (_, sizes) in self.teamsizes_by_year.range(from..=to) {
            for &s in sizes {
                sum += u64::from(s);
                n += 1;
            }
        }
        if n == 0 {
            None
        } else {
            Some(sum as f64 / n as f64)
        }
    }

    /// All distinct countries the author ever published under.
    pub fn all_countries(&self) -> BTreeSet<&str> {
        self.country_by_year
            .values()
            .flat_map(|set| set.iter().map(String::as_str))
            .collect()
    }
}

// -------------------------------------------------------------------------
// Parsing
// -------------------------------------------------------------------------

#[derive(Debug, Deserialize)]
struct OaWork {
    id: Option<String>,
    publication_year: Option<i32>,
    #[serde(default)]
    authorships: Vec<OaAuthorship>,
    #[serde(default)]
    concepts: Vec<OaConcept>,
    #[serde(default)]
    referenced_works: Vec<String>,
    #[serde(default)]
    counts_by_year: Vec<OaYearCount>,
}

#[derive(Debug, Deserialize)]
struct OaAuthorship {
    author: Option<OaAuthor>,
    #[serde(default)]
    institutions: Vec<OaInstitution>,
}

#[derive(Debug, Deserialize)]
struct OaAuthor {
    id: Option<String>,
}

#[derive(Debug, Deserialize)]
struct OaInstitution {
    id: Option<String>,
    country_code: Option<String>,
}

#[derive(Debug, Deserialize)]
struct OaConcept {
    id: Option<String>,
    level: Option<u32>,
}

#[derive(Debug, Deserialize)]
struct OaYearCount {
    year: i32,
    cited_by_count: u32,
}

fn openalex_to_record(work: OaWork, line_no: u64) -> Option<PublicationRecord> {
    let year = work.publication_year?;
    let mut authorships = Vec::new();
    let mut institution_countries = BTreeMap::new();
    for a in work.authorships {
        let author_id = a.author.and_then(|x| x.id)?;
        let mut institution_ids = Vec::new();
        for inst in a.institutions {
            if let Some(id) = inst.id {
                if let Some(cc) = inst.country_code {
                    institution_countries.insert(id.clone(), cc);
                }
                institution_ids.push(id);
            }
        }
        authorships.push(Authorship { author_id, institution_ids });
    }
    if authorships.is_empty() {
        return None;
    }
    let topics = work
        .concepts
        .into_iter()
        .filter_map(|c| Some(TopicTag { topic_id: c.id?, level: c.level? }))
        .collect();
    Some(PublicationRecord {
        paper_id: work.id.unwrap_or_else(|| format!("line:{line_no}")),
        year,
        authorships,
        institution_countries,
        topics,
        references: work.referenced_works,
        counts_by_year: work
            .counts_by_year
            .into_iter()
            .map(|c| YearCount { year: c.year, count: c.cited_by_count })
            .collect(),
    })
}

/// Streaming line-delimited JSON parser; malformed lines are counted, not fatal.
pub struct WorksParser<R> {
    reader: R,
    format: WorksFormat,
    year_range: (i32, i32),
    line_no: u64,
    buf: String,
    pub stats: CorpusStats,
}

impl<R: BufRead> WorksParser<R> {
    pub fn new(reader: R, format: WorksFormat, config: &IngestConfig) -> Self {
        WorksParser {
            reader,
            format,
            year_range: config.year_range,
            line_no: 0,
            buf: String::new(),
            stats: CorpusStats::default(),
        }
    }

    fn parse_line(&mut self) -> Option<PublicationRecord> {
        let line = self.buf.trim();
        if line.is_empty() {
            return None;
        }
        self.stats.records_read += 1;
        let record = match self.format {
            WorksFormat::Flat => match serde_json::from_str::<PublicationRecord>(line) {
                Ok(r) => r,
                Err(_) => {
                    self.stats.drop("malformed_json");
                    return None;
                }
            },
            WorksFormat::OpenalexWorks => {
                let work: OaWork = match serde_json::from_str(line) {
                    Ok(w) => w,
                    Err(_) => {
                        self.stats.drop("malformed_json");
                        return None;
                    }
                };
                if work.publication_year.is_none() {
                    self.stats.drop("no_year");
                    return None;
                }
                match openalex_to_record(work, self.line_no) {
                    Some(r) => r,
                    None => {
                        self.stats.drop("no_authorships");
                        return None;
                    }
                }
            }
        };
        if record.authorships.is_empty() {
            self.stats.drop("no_authorships");
            return None;
        }
        if record.year < self.year_range.0 || record.year > self.year_range.1 {
            self.stats.drop("year_out_of_range");
            return None;
        }
        Some(normalize(record))
    }
}

/// Collapse duplicate author ids and duplicate references within one record.
fn normalize(mut record: PublicationRecord) -> PublicationRecord {
    let mut seen = HashSet::new();
    let mut merged: Vec<Authorship> = Vec::with_capacity(record.authorships.len());
    for a in record.authorships.drain(..) {
        if seen.insert(a.author_id.clone()) {
            merged.push(a);
        } else if !a.institution_ids.is_empty() {
            let existing = merged.iter_mut().find(|m| m.author_id == a.author_id).unwrap();
            for inst in a.institution_ids {
                if !existing.institution_ids.contains(&inst) {
                    existing.institution_ids.push(inst);
                }
            }
        }
    }
    record.authorships = merged;
    let mut seen_refs = HashSet::new();
    record.references.retain(|r| seen_refs.insert(r.clone()));
    record
}

impl<R: BufRead> Iterator for WorksParser<R> {
    type Item = Result<PublicationRecord>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            self.buf.clear();
            match self.reader.read_line(&mut self.buf) {
                Ok(0) => return None,
                Ok(_) => {
                    self.line_no += 1;
                    if let Some(record) = self.parse_line() {
                        return Some(Ok(record));
                    }
                }
                Err(e) => return Some(Err(e.into())),
            }
        }
    }
}

/// Parse every record from a reader, returning records plus parse-stage stats.
pub fn parse_works<R: BufRead>(
    reader: R,
    format: WorksFormat,
    config: &IngestConfig,
) -> Result<(Vec<PublicationRecord>, CorpusStats)> {
    let mut parser = WorksParser::new(reader, format, config);
    let mut records = Vec::new();
    for record in &mut parser {
        records.push(record?);
    }
    Ok((records, parser.stats))
}

// -------------------------------------------------------------------------
// Panel construction
// -------------------------------------------------------------------------

/// Build per-author yearly panels from parsed records.
///
/// Citation counting follows `config.citation_source`: with in-corpus
/// references, a paper published in year `t` that references a paper of
/// author `x` adds one to `x.cites_by_year[t]`, once per cited paper per
/// cited author. Dangling references are ignored.
pub fn build_panels(
    records: &[PublicationRecord],
    config: &IngestConfig,
    stats: &mut CorpusStats,
) -> BTreeMap<String, AuthorYearPanel> {
    let mut panels: BTreeMap<String, AuthorYearPanel> = BTreeMap::new();
    // paper_id -> (year, author ids)
    let mut paper_index: HashMap<&str, (i32, Vec<&str>)> = HashMap::new();
    let mut any_references = false;

    for record in records {
        let authors: Vec<&str> =
            record.authorships.iter().map(|a| a.author_id.as_str()).collect();
        let team_size = authors.len() as u32;
        paper_index.insert(record.paper_id.as_str(), (record.year, authors.clone()));
        if !record.references.is_empty() {
            any_references = true;
        }

        for authorship in &record.authorships {
            let panel = panels
                .entry(authorship.author_id.clone())
                .or_insert_with(|| AuthorYearPanel::new(authorship.author_id.clone()));
            *panel.pubs_by_year.entry(record.year).or_insert(0) += 1;
            panel.teamsizes_by_year.entry(record.year).or_default().push(team_size);

            let collaborators = panel.collaborators_by_year.entry(record.year).or_default();
            for other in &authors {
                if *other != authorship.author_id {
                    collaborators.insert((*other).to_string());
                }
            }

            let institutions = panel.institutions_by_year.entry(record.year).or_default();
            let countries = panel.country_by_year.entry(record.year).or_default();
            for inst in &authorship.institution_ids {
                institutions.insert(inst.clone());
                if let Some(cc) = record.institution_countries.get(inst) {
                    countries.insert(cc.clone());
                }
            }

            let topics = panel.topics_by_year.entry(record.year).or_default();
            for tag in &record.topics {
                if tag.level >= 2 {
                    topics.insert(tag.topic_id.clone());
                }
            }
        }
    }

    // Discipline: modal level-0 topic, ties -> lexicographically smallest id.
    // BTreeMap keeps the counting order-independent.
    let mut level0: HashMap<&str, BTreeMap<&str, u32>> = HashMap::new();
    for record in records {
        for authorship in &record.authorships {
            let counts = level0.entry(authorship.author_id.as_str()).or_default();
            for tag in &record.topics {
                if tag.level == 0 {
                    *counts.entry(tag.topic_id.as_str()).or_insert(0) += 1;
                }
            }
        }
    }
    for (author, counts) in level0 {
        if let Some(panel) = panels.get_mut(author) {
            let mut best: Option<(&str, u32)> = None;
            for (&topic, &n) in &counts {
                match best {
                    Some((_, bn)) if n <= bn => {}
                    _ => best = Some((topic, n)),
                }
            }
            if let Some((topic, _)) = best {
                panel.discipline = topic.to_string();
            }
        }
    }

    let use_references = match config.citation_source {
        CitationSource::References => true,
        CitationSource::CountsByYear => false,
        CitationSource::Auto => any_references,
    };

    if use_references {
        for record in records {
            let citing_year = record.year;
            for reference in &record.references {
                let Some((_, cited_authors)) = paper_index.get(reference.as_str()) else {
                    continue;
                };
                for cited in cited_authors {
                    if !config.count_self_citations
                        && record.authorships.iter().any(|a| a.author_id == *cited)
                    {
                        continue;
                    }
                    if let Some(panel) = panels.get_mut(*cited) {
                        *panel.cites_by_year.entry(citing_year).or_insert(0) += 1;
                    }
                }
            }
        }
    } else {
        stats.citation_fallback_used = true;
        for record in records {
            for yc in &record.counts_by_year {
                if yc.year < config.year_range.0 || yc.year > config.year_range.1 {
                    continue;
                }
                for authorship in &record.authorships {
                    if let Some(panel) = panels.get_mut(&authorship.author_id) {
                        *panel.cites_by_year.entry(yc.year).or_insert(0) += yc.count;
                    }
                }
            }
        }
    }

    for panel in panels.values_mut() {
        panel.y0 = panel.pubs_by_year.keys().next().copied().unwrap_or(i32::MAX);
        panel.total_pubs = panel.pubs_by_year.values().map(|&v| u64::from(v)).sum();
        panel.total_cites = panel.cites_by_year.values().map(|&v| u64::from(v)).sum();
        if panel.country_by_year.values().all(|s| s.is_empty()) {
            stats.authors_without_country += 1;
        }
    }
    stats.authors_built = panels.len() as u64;
    panels
}

/// Eligibility policy for retaining author panels.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EligibilityPolicy {
    pub min_pubs: u64,
    /// Career-start window applied to roster members.
    pub roster_start_range: (i32, i32),
    /// Lower career-start bound applied to everyone else (upper bound is the
    /// corpus end).
    pub general_start_min: i32,
}

impl Default for EligibilityPolicy {
    fn default() -> Self {
        EligibilityPolicy {
            min_pubs: 10,
            roster_start_range: (2000, 2015),
            general_start_min: 2000,
        }
    }
}

/// Retain panels meeting the publication-count and career-start policy.
/// Roster members get the tighter start window.
pub fn filter_eligible(
    panels: BTreeMap<String, AuthorYearPanel>,
    policy: &EligibilityPolicy,
    roster_ids: &HashSet<String>,
    stats: &mut CorpusStats,
) -> BTreeMap<String, AuthorYearPanel> {
    let kept: BTreeMap<String, AuthorYearPanel> = panels
        .into_iter()
        .filter(|(id, panel)| {
            if panel.total_pubs < policy.min_pubs {
                return false;
            }
            if roster_ids.contains(id) {
                panel.y0 >= policy.roster_start_range.0 && panel.y0 <= policy.roster_start_range.1
            } else {
                panel.y0 >= policy.general_start_min
            }
        })
        .collect();
    stats.authors_eligible = kept.len() as u64;
    kept
}

// -------------------------------------------------------------------------
// Panel serialization (JSONL, one author per line, sorted by author id)
// -------------------------------------------------------------------------

pub fn write_panels<W: Write>(
    writer: &mut W,
    panels: &BTreeMap<String, AuthorYearPanel>,
) -> Result<()> {
    for panel in panels.values() {
        serde_json::to_writer(&mut *writer, panel)?;
        writer.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_panels<R: BufRead>(reader: R) -> Result<BTreeMap<String, AuthorYearPanel>> {
    let mut panels = BTreeMap::new();
    for line in reader.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let panel: AuthorYearPanel = serde_json::from_str(&line)?;
        panels.insert(panel.author_id.clone(), panel);
    }
    Ok(panels)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(paper: &str, year: i32, authors: &[&str], refs: &[&str]) -> PublicationRecord {
        PublicationRecord {
            paper_id: paper.to_string(),
            year,
            authorships: authors
                .iter()
                .map(|a| Authorship {
                    author_id: (*a).to_string(),
                    institution_ids: vec![format!("inst-{a}")],
                })
                .collect(),
            institution_countries: authors
                .iter()
                .map(|a| (format!("inst-{a}"), "US".to_string()))
                .collect(),
            topics: vec![
                TopicTag { topic_id: "field-x".into(), level: 0 },
                TopicTag { topic_id: format!("dir-{paper}"), level: 2 },
            ],
            references: refs.iter().map(|r| (*r).to_string()).collect(),
            counts_by_year: Vec::new(),
        }
    }

    fn build(records: &[PublicationRecord]) -> BTreeMap<String, AuthorYearPanel> {
        let mut stats = CorpusStats::default();
        build_panels(records, &IngestConfig::default(), &mut stats)
    }

    #[test]
    fn flat_line_roundtrip_and_drop_counting() {
        let input = concat!(
            r#"{"paper_id":"p1","year":2010,"authorships":[{"author_id":"a1","institution_ids":[]},{"author_id":"a2","institution_ids":[]}],"institution_countries":{},"topics":[],"references":[]}"#,
            "\n",
            "{not json}\n",
            r#"{"paper_id":"p2","year":2011,"authorships":[{"author_id":"a1","institution_ids":[]}],"institution_countries":{},"topics":[],"references":[]}"#,
            "\n",
        );
        let (records, stats) =
            parse_works(input.as_bytes(), WorksFormat::Flat, &IngestConfig::default()).unwrap();
        assert_eq!(records.len(), 2);
        assert_eq!(records[0].year, 2010);
        assert_eq!(records[0].authorships.len(), 2);
        assert_eq!(stats.records_read, 3);
        assert_eq!(stats.dropped_total(), 1);
        assert_eq!(stats.records_dropped["malformed_json"], 1);
    }

    #[test]
    fn openalex_missing_year_dropped() {
        let input = concat!(
            r#"{"id":"W1","publication_year":2010,"authorships":[{"author":{"id":"A1"},"institutions":[{"id":"I1","country_code":"US"}]},{"author":{"id":"A2"},"institutions":[]}],"concepts":[{"id":"C0","level":0}],"referenced_works":[]}"#,
            "\n",
            r#"{"id":"W2","authorships":[{"author":{"id":"A1"},"institutions":[]}]}"#,
            "\n",
        );
        let (records, stats) =
            parse_works(input.as_bytes(), WorksFormat::OpenalexWorks, &IngestConfig::default())
                .unwrap();
        assert_eq!(records.len(), 1);
        assert_eq!(records[0].year, 2010);
        assert_eq!(records[0].authorships.len(), 2);
        assert_eq!(records[0].institution_countries["I1"], "US");
        assert_eq!(stats.records_dropped["no_year"], 1);
    }

    #[test]
    fn year_out_of_range_dropped() {
        let input = concat!(
            r#"{"paper_id":"p1","year":1999,"authorships":[{"author_id":"a1","institution_ids":[]}],"institution_countries":{},"topics":[],"references":[]}"#,
            "\n",
        );
        let (records, stats) =
            parse_works(input.as_bytes(), WorksFormat::Flat, &IngestConfig::default()).unwrap();
        assert!(records.is_empty());
        assert_eq!(stats.records_dropped["year_out_of_range"], 1);
    }

    #[test]
    fn duplicate_authors_collapse() {
        let input = concat!(
            r#"{"paper_id":"p1","year":2010,"authorships":[{"author_id":"a1","institution_ids":["i1"]},{"author_id":"a1","institution_ids":["i2"]}],"institution_countries":{},"topics":[],"references":[]}"#,
            "\n",
        );
        let (records, _) =
            parse_works(input.as_bytes(), WorksFormat::Flat, &IngestConfig::default()).unwrap();
        assert_eq!(records[0].authorships.len(), 1);
        assert_eq!(records[0].authorships[0].institution_ids, vec!["i1", "i2"]);
    }

    #[test]
    fn pubs_counting_and_career_start() {
        let records = vec![
            record("p1", 2005, &["x"], &[]),
            record("p2", 2005, &["x"], &[]),
            record("p3", 2006, &["x", "y"], &[]),
        ];
        let panels = build(&records);
        let x = &panels["x"];
        assert_eq!(x.pubs_by_year[&2005], 2);
        assert_eq!(x.pubs_by_year[&2006], 1);
        assert_eq!(x.y0, 2005);
        assert_eq!(x.total_pubs, 3);
        assert_eq!(x.collaborators_by_year[&2006], BTreeSet::from(["y".to_string()]));
        assert!(!x.collaborators_by_year[&2006].contains("x"));
        assert_eq!(x.teamsizes_by_year[&2006], vec![2]);
    }

    #[test]
    fn citation_from_reference_links() {
        let records = vec![
            record("pa", 2010, &["x"], &[]),
            record("pb", 2011, &["z"], &["pa"]),
        ];
        let panels = build(&records);
        assert_eq!(panels["x"].cites_in(2011), 1);
        assert_eq!(panels["x"].total_cites, 1);
        assert_eq!(panels["z"].total_cites, 0);
    }

    #[test]
    fn citation_counts_once_per_cited_paper_per_author() {
        // One citing paper referencing two papers of the same author: +2.
        let records = vec![
            record("pa", 2010, &["x"], &[]),
            record("pb", 2010, &["x"], &[]),
            record("pc", 2012, &["z"], &["pa", "pb", "dangling"]),
        ];
        let panels = build(&records);
        assert_eq!(panels["x"].cites_in(2012), 2);
    }

    #[test]
    fn self_citation_switch() {
        let records = vec![
            record("pa", 2010, &["x"], &[]),
            record("pb", 2011, &["x"], &["pa"]),
        ];
        let panels = build(&records);
        assert_eq!(panels["x"].cites_in(2011), 1);

        let mut cfg = IngestConfig::default();
        cfg.count_self_citations = false;
        let mut stats = CorpusStats::default();
        let panels = build_panels(&records, &cfg, &mut stats);
        assert_eq!(panels["x"].cites_in(2011), 0);
    }

    #[test]
    fn counts_by_year_fallback_flagged() {
        let mut rec = record("pa", 2010, &["x"], &[]);
        rec.counts_by_year = vec![
            YearCount { year: 2011, count: 3 },
            YearCount { year: 1995, count: 9 },
        ];
        let mut stats = CorpusStats::default();
        let panels = build_panels(&[rec], &IngestConfig::default(), &mut stats);
        assert!(stats.citation_fallback_used);
        assert_eq!(panels["x"].cites_in(2011), 3);
        assert_eq!(panels["x"].total_cites, 3);
    }

    #[test]
    fn ten_paper_fixture_matches_brute_force_tally() {
        // Reference graph over 10 papers; check cites_by_year against an
        // independent scan over (citing record, reference) pairs.
        let records = vec![
            record("p0", 2005, &["a"], &[]),
            record("p1", 2005, &["b"], &[]),
            record("p2", 2006, &["a", "b"], &["p0"]),
            record("p3", 2007, &["c"], &["p0", "p1"]),
            record("p4", 2008, &["a"], &["p2"]),
            record("p5", 2008, &["b", "c"], &["p2", "p3"]),
            record("p6", 2009, &["c"], &["p4", "p5", "p0"]),
            record("p7", 2010, &["a", "c"], &["p6"]),
            record("p8", 2011, &["b"], &["p7", "p5"]),
            record("p9", 2012, &["a"], &["p8", "p1", "p3"]),
        ];
        let panels = build(&records);

        let mut expected: BTreeMap<(String, i32), u32> = BTreeMap::new();
        for citing in &records {
            for reference in &citing.references {
                if let Some(cited) = records.iter().find(|r| &r.paper_id == reference) {
                    for a in &cited.authorships {
                        *expected.entry((a.author_id.clone(), citing.year)).or_insert(0) += 1;
                    }
                }
            }
        }
        for ((author, year), count) in expected {
            assert_eq!(
                panels[&author].cites_in(year),
                count,
                "author {author} year {year}"
            );
        }
    }

    #[test]
    fn discipline_modal_with_lexicographic_tie_break() {
        let mut r1 = record("p1", 2010, &["x"], &[]);
        r1.topics = vec![TopicTag { topic_id: "zeta".into(), level: 0 }];
        let mut r2 = record("p2", 2011, &["x"], &[]);
        r2.topics = vec![TopicTag { topic_id: "alpha".into(), level: 0 }];
        let panels = build(&[r1.clone(), r2.clone()]);
        assert_eq!(panels["x"].discipline, "alpha");
        // Permuting paper order never changes the result.
        let panels = build(&[r2, r1]);
        assert_eq!(panels["x"].discipline, "alpha");
    }

    #[test]
    fn build_panels_order_invariant() {
        let records = vec![
            record("p0", 2005, &["a", "b"], &[]),
            record("p1", 2006, &["b"], &["p0"]),
            record("p2", 2007, &["a"], &["p1", "p0"]),
        ];
        let forward = build(&records);
        let mut reversed = records.clone();
        reversed.reverse();
        let backward = build(&reversed);
        assert_eq!(forward, backward);
    }

    #[test]
    fn authorship_conservation() {
        let records = vec![
            record("p0", 2005, &["a", "b"], &[]),
            record("p1", 2006, &["b", "c", "a"], &[]),
            record("p2", 2007, &["c"], &[]),
        ];
        let panels = build(&records);
        let total_slots: u64 = records.iter().map(|r| r.authorships.len() as u64).sum();
        let total_pubs: u64 = panels.values().map(|p| p.total_pubs).sum();
        assert_eq!(total_pubs, total_slots);
    }

    #[test]
    fn eligibility_boundaries() {
        let mut panels = BTreeMap::new();
        for (id, n, y0) in [("low", 9, 2005), ("edge", 10, 2000), ("late", 12, 2016)] {
            let mut p = AuthorYearPanel::new(id.to_string());
            p.y0 = y0;
            p.total_pubs = n;
            p.pubs_by_year.insert(y0, n as u32);
            panels.insert(id.to_string(), p);
        }
        let roster: HashSet<String> = ["late".to_string(), "edge".to_string()].into();
        let mut stats = CorpusStats::default();
        let kept = filter_eligible(panels, &EligibilityPolicy::default(), &roster, &mut stats);
        assert!(!kept.contains_key("low"), "total_pubs 9 excluded");
        assert!(kept.contains_key("edge"), "boundary inclusive");
        assert!(!kept.contains_key("late"), "roster member starting 2016 excluded");
        assert_eq!(stats.authors_eligible, 1);
    }

    #[test]
    fn unknown_country_institutions_kept_out_of_country_sets() {
        let mut rec = record("p1", 2010, &["x"], &[]);
        rec.authorships[0].institution_ids.push("mystery".to_string());
        let panels = build(&[rec]);
        assert!(panels["x"].institutions_by_year[&2010].contains("mystery"));
        assert_eq!(panels["x"].country_by_year[&2010], BTreeSet::from(["US".to_string()]));
    }

    #[test]
    fn panels_jsonl_roundtrip() {
        let records = vec![
            record("p0", 2005, &["a", "b"], &[]),
            record("p1", 2006, &["b"], &["p0"]),
        ];
        let panels = build(&records);
        let mut buf = Vec::new();
        write_panels(&mut buf, &panels).unwrap();
        let restored = read_panels(&buf[..]).unwrap();
        assert_eq!(panels, restored);
    }
}
