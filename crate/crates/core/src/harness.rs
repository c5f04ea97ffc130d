//! Batch verification of the orbit conjectures.
//!
//! * `orbit1`: for even `n` and `j >= 1`, the word `1^(2j-1)` has orbit
//!   `2^j` under `C(1, -)` over the alphabet `(1, n)`.
//! * `orbit2`: for even `n` (any sign) and `v = (n, -1)`, both `(-1) v^(j-1)`
//!   and `v^(j-1) n` have orbit `2^j` under `C(-1, -)` over `(-1, n)`.
//! * For even `n >= 2`, `orbit1` holding for all `j' <= j` is equivalent to
//!   `|E(1^(2^j'), 1^(2j'))|` being odd for all `j' <= j`.
//! * At word length `2j - 1` the maps depend on `n` only through
//!   `n mod 2^(j-1)`, so one even representative per residue class covers
//!   every even `n`.

use std::path::PathBuf;
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::mpsc;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::alphabet::{Alphabet, Letter};
use crate::cache;
use crate::error::{Error, Result};
use crate::orbit::orbit_length;
use crate::packed::PackedWord;
use crate::rle::{Oracle, DEFAULT_TERM_CAP};
use crate::torsion::{TableBuilder, TorsionTable};

/// Largest `j` a sweep runs without the high-memory opt-in.
pub const DEFAULT_J_MAX: u32 = 8;
/// Largest `j` a sweep runs at all.
pub const HIGH_MEMORY_J_MAX: u32 = 13;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConjectureId {
    Orbit1,
    Orbit2LeftSeed,
    Orbit2RightSeed,
    ParityEquivalence,
    ResidueReduction,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TableSource {
    Built,
    Cache,
}

/// One checked case. For orbit checks `pass` holds exactly when
/// `expected == observed`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub conjecture_id: ConjectureId,
    pub m: i64,
    pub n: i64,
    pub j: u32,
    pub expected: u64,
    pub observed: u64,
    pub pass: bool,
    pub elapsed_ms: u64,
    pub table_source: TableSource,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Seed {
    Left,
    Right,
}

impl Seed {
    fn id(self) -> ConjectureId {
        match self {
            Seed::Left => ConjectureId::Orbit2LeftSeed,
            Seed::Right => ConjectureId::Orbit2RightSeed,
        }
    }
}

/// `(-1) v^(j-1)` or `v^(j-1) n` with `v = (n, -1)`; both of length `2j - 1`.
pub fn conjecture_two_seed(n: i64, j: u32, seed: Seed) -> Vec<i64> {
    let pairs = (0..j.saturating_sub(1)).flat_map(|_| [n, -1]);
    match seed {
        Seed::Left => std::iter::once(-1).chain(pairs).collect(),
        Seed::Right => pairs.chain(std::iter::once(n)).collect(),
    }
}

/// Smallest non-negative even member of each even residue class mod `2^(j-1)`.
pub fn residue_representatives(j: u32) -> Vec<i64> {
    let modulus = 1i64 << j.saturating_sub(1);
    (0..modulus.max(2)).step_by(2).collect()
}

/// Whether `n` is the canonical representative of its class at level `j`.
pub fn is_representative(n: i64, j: u32) -> bool {
    let modulus = 1i64 << j.saturating_sub(1);
    n >= 0 && n % 2 == 0 && n < modulus.max(2)
}

fn require_even(n: i64) -> Result<()> {
    if n % 2 != 0 {
        return Err(Error::InvalidArgument(format!("n = {n} must be even")));
    }
    Ok(())
}

fn word_len_for(j: u32) -> Result<u32> {
    if j == 0 || j > 16 {
        return Err(Error::InvalidArgument(format!(
            "j = {j} is out of range (1..=16)"
        )));
    }
    Ok(2 * j - 1)
}

fn elapsed_ms(since: Instant) -> u64 {
    since.elapsed().as_millis() as u64
}

/// Builds tables, or loads them from a cache directory when a file for the
/// alphabet with enough levels is present.
#[derive(Clone, Debug, Default)]
pub struct TableProvider {
    builder: TableBuilder,
    cache_dir: Option<PathBuf>,
}

impl TableProvider {
    pub fn new(builder: TableBuilder, cache_dir: Option<PathBuf>) -> Self {
        TableProvider { builder, cache_dir }
    }

    pub fn builder(&self) -> TableBuilder {
        self.builder
    }

    pub fn obtain(&self, alphabet: Alphabet, k: u32) -> Result<(TorsionTable, TableSource)> {
        if let Some(dir) = &self.cache_dir {
            let path = cache::cache_path(dir, &alphabet);
            if path.is_file() {
                let header = cache::read_header(&std::fs::read(&path)?)?;
                if header.k_max >= k && header.m == alphabet.m() && header.n == alphabet.n() {
                    let table = cache::load(&path)?.truncate(k)?;
                    return Ok((table, TableSource::Cache));
                }
            }
        }
        Ok((self.builder.build(alphabet, k)?, TableSource::Built))
    }
}

/// `|E(1^(2^j), 1^(2j))|` over `(1, n)`, computed by direct expansion.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpansionParity {
    pub n: i64,
    pub j: u32,
    pub length: u64,
}

impl ExpansionParity {
    pub fn is_odd(&self) -> bool {
        self.length % 2 == 1
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParityRow {
    pub j: u32,
    pub orbit_length: u64,
    pub expansion_length: u64,
    /// Orbit of `1^(2j'-1)` is `2^j'` for every `j' <= j`.
    pub orbit_side: bool,
    /// Expansion length is odd for every `j' <= j`.
    pub parity_side: bool,
}

impl ParityRow {
    pub fn agree(&self) -> bool {
        self.orbit_side == self.parity_side
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParityEquivalenceReport {
    pub n: i64,
    pub rows: Vec<ParityRow>,
    pub elapsed_ms: u64,
    pub table_source: TableSource,
}

impl ParityEquivalenceReport {
    pub fn equivalence_confirmed(&self) -> bool {
        self.rows.iter().all(ParityRow::agree)
    }

    pub fn both_sides_hold(&self) -> bool {
        self.rows.iter().all(|r| r.orbit_side && r.parity_side)
    }

    /// One report per `j`: `expected` is the orbit-side predicate and
    /// `observed` the parity-side predicate, each as 0 or 1.
    pub fn to_reports(&self) -> Vec<VerificationReport> {
        self.rows
            .iter()
            .map(|r| VerificationReport {
                conjecture_id: ConjectureId::ParityEquivalence,
                m: 1,
                n: self.n,
                j: r.j,
                expected: r.orbit_side as u64,
                observed: r.parity_side as u64,
                pass: r.agree(),
                elapsed_ms: self.elapsed_ms,
                table_source: self.table_source,
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResidueMismatch {
    pub witness: i64,
    pub letter: Letter,
    pub word: u32,
    pub expected: u32,
    pub observed: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResidueReport {
    pub m: i64,
    pub j: u32,
    pub n0: i64,
    pub witnesses: Vec<i64>,
    /// Masked images compared against the first witness.
    pub comparisons: u64,
    pub matches: u64,
    pub first_mismatch: Option<ResidueMismatch>,
    pub elapsed_ms: u64,
}

impl ResidueReport {
    pub fn identical(&self) -> bool {
        self.first_mismatch.is_none()
    }

    pub fn to_report(&self) -> VerificationReport {
        VerificationReport {
            conjecture_id: ConjectureId::ResidueReduction,
            m: self.m,
            n: self.n0,
            j: self.j,
            expected: self.comparisons,
            observed: self.matches,
            pass: self.identical(),
            elapsed_ms: self.elapsed_ms,
            table_source: TableSource::Built,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepConjecture {
    Orbit1,
    Orbit2,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NPolicy {
    ResidueClasses,
    Explicit(Vec<i64>),
}

#[derive(Clone, Debug)]
pub struct Budget {
    pub memory_cap: u64,
    pub time_limit: Option<Duration>,
    pub parallelism: usize,
    pub high_memory: bool,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            memory_cap: crate::torsion::DEFAULT_MEMORY_CAP,
            time_limit: None,
            parallelism: 1,
            high_memory: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseError {
    pub n: i64,
    pub message: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SweepOutcome {
    pub reports: Vec<VerificationReport>,
    pub errors: Vec<CaseError>,
    /// Broken orbit invariants (power of two, `<= 2^j`, growth in `j`).
    pub invariant_violations: Vec<String>,
    /// Set when the time budget ran out before every case was started.
    pub truncated: bool,
    pub skipped: Vec<i64>,
}

impl SweepOutcome {
    pub fn passed(&self) -> usize {
        self.reports.iter().filter(|r| r.pass).count()
    }

    pub fn failed(&self) -> usize {
        self.reports.len() - self.passed()
    }

    pub fn all_passed(&self) -> bool {
        self.failed() == 0
            && self.errors.is_empty()
            && self.invariant_violations.is_empty()
            && !self.truncated
    }
}

struct JobResult {
    reports: Vec<VerificationReport>,
    violations: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct Harness {
    provider: TableProvider,
    oracle_term_cap: u64,
}

impl Default for Harness {
    fn default() -> Self {
        Harness {
            provider: TableProvider::default(),
            oracle_term_cap: DEFAULT_TERM_CAP,
        }
    }
}

impl Harness {
    pub fn new(provider: TableProvider, oracle_term_cap: u64) -> Self {
        Harness {
            provider,
            oracle_term_cap,
        }
    }

    pub fn verify_conjecture_one(&self, n: i64, j: u32) -> Result<VerificationReport> {
        require_even(n)?;
        let k = word_len_for(j)?;
        let started = Instant::now();
        let (table, source) = self.provider.obtain(Alphabet::new(1, n)?, k)?;
        let observed = orbit_length(table.level(Letter::M, k)?, PackedWord::all_m(k)?)?;
        Ok(orbit_report(
            ConjectureId::Orbit1,
            1,
            n,
            j,
            observed,
            started,
            source,
        ))
    }

    pub fn verify_conjecture_two(&self, n: i64, j: u32, seed: Seed) -> Result<VerificationReport> {
        require_even(n)?;
        let k = word_len_for(j)?;
        let started = Instant::now();
        let alphabet = Alphabet::new(-1, n)?;
        let (table, source) = self.provider.obtain(alphabet, k)?;
        let observed = seed_orbit(&table, n, j, seed)?;
        Ok(orbit_report(seed.id(), -1, n, j, observed, started, source))
    }

    pub fn expansion_parity(&self, n: i64, j: u32) -> Result<ExpansionParity> {
        require_even(n)?;
        if n < 2 {
            return Err(Error::InvalidArgument(format!(
                "expansion parity needs n >= 2, got {n}"
            )));
        }
        if j == 0 || j > 40 {
            return Err(Error::InvalidArgument(format!("j = {j} is out of range")));
        }
        let oracle = Oracle::with_cap(Alphabet::new(1, n)?, self.oracle_term_cap)?;
        let base_len = 1u64 << j;
        if base_len > self.oracle_term_cap {
            return Err(Error::TooLarge {
                len: base_len,
                cap: self.oracle_term_cap,
            });
        }
        let s = vec![1i64; base_len as usize];
        let t = vec![1i64; 2 * j as usize];
        let length = oracle.expand(&s, &t)?.len() as u64;
        Ok(ExpansionParity { n, j, length })
    }

    /// Computes both sides for every `j <= j_max`, independently.
    pub fn check_parity_equivalence(&self, n: i64, j_max: u32) -> Result<ParityEquivalenceReport> {
        let k_max = word_len_for(j_max)?;
        let started = Instant::now();
        let (table, source) = self.provider.obtain(Alphabet::new(1, n)?, k_max)?;
        let mut rows = Vec::with_capacity(j_max as usize);
        let (mut orbit_side, mut parity_side) = (true, true);
        for j in 1..=j_max {
            let k = 2 * j - 1;
            let orbit = orbit_length(table.level(Letter::M, k)?, PackedWord::all_m(k)?)?;
            let parity = self.expansion_parity(n, j)?;
            orbit_side &= orbit == 1u64 << j;
            parity_side &= parity.is_odd();
            rows.push(ParityRow {
                j,
                orbit_length: orbit,
                expansion_length: parity.length,
                orbit_side,
                parity_side,
            });
        }
        Ok(ParityEquivalenceReport {
            n,
            rows,
            elapsed_ms: elapsed_ms(started),
            table_source: source,
        })
    }

    /// Compares the masked maps `F . C(x, -) . G_n` on `{m, 0}^(2j-1)`
    /// across witnesses, for `x = m` and `x = n`.
    pub fn verify_residue_reduction(
        &self,
        m: i64,
        j: u32,
        n0: i64,
        witnesses: &[i64],
    ) -> Result<ResidueReport> {
        if m != 1 && m != -1 {
            return Err(Error::InvalidArgument(format!("m = {m} must be 1 or -1")));
        }
        require_even(n0)?;
        let k = word_len_for(j)?;
        if witnesses.is_empty() {
            return Err(Error::InvalidArgument("no witnesses given".into()));
        }
        let modulus = 1i64 << (j - 1);
        for &w in witnesses {
            require_even(w)?;
            if (w - n0).rem_euclid(modulus) != 0 {
                return Err(Error::InvalidArgument(format!(
                    "witness {w} is not congruent to {n0} mod {modulus}"
                )));
            }
        }

        let started = Instant::now();
        let masked = Alphabet::new(m, 0)?;
        let mut reference: Option<[Vec<u32>; 2]> = None;
        let mut comparisons = 0u64;
        let mut matches = 0u64;
        let mut first_mismatch = None;
        for &w in witnesses {
            let alphabet = Alphabet::new(m, w)?;
            let (table, _) = self.provider.obtain(alphabet, k)?;
            let images = [Letter::M, Letter::N].map(|letter| {
                (0..1u32 << k)
                    .map(|code| masked_image(&table, &masked, letter, code, k))
                    .collect::<Result<Vec<u32>>>()
            });
            let [im_m, im_n] = images;
            let images = [im_m?, im_n?];
            match &reference {
                None => reference = Some(images),
                Some(refs) => {
                    for (li, letter) in [Letter::M, Letter::N].into_iter().enumerate() {
                        for (word, (&want, &got)) in refs[li].iter().zip(&images[li]).enumerate() {
                            comparisons += 1;
                            if want == got {
                                matches += 1;
                            } else if first_mismatch.is_none() {
                                first_mismatch = Some(ResidueMismatch {
                                    witness: w,
                                    letter,
                                    word: word as u32,
                                    expected: want,
                                    observed: got,
                                });
                            }
                        }
                    }
                }
            }
        }
        Ok(ResidueReport {
            m,
            j,
            n0,
            witnesses: witnesses.to_vec(),
            comparisons,
            matches,
            first_mismatch,
            elapsed_ms: elapsed_ms(started),
        })
    }

    /// Runs every `(n, j)` case of a conjecture up to `j_max`.
    ///
    /// Distinct `n` are independent jobs on a pool of `budget.parallelism`
    /// workers; each job builds (or loads) its own tables once at word
    /// length `2 j_max - 1`. Per-case errors are collected, not fatal.
    pub fn sweep(
        &self,
        conjecture: SweepConjecture,
        j_max: u32,
        policy: &NPolicy,
        budget: &Budget,
    ) -> Result<SweepOutcome> {
        if j_max == 0 {
            return Err(Error::InvalidArgument("j_max must be at least 1".into()));
        }
        if j_max > HIGH_MEMORY_J_MAX {
            return Err(Error::InvalidArgument(format!(
                "j_max = {j_max} exceeds the supported maximum of {HIGH_MEMORY_J_MAX}"
            )));
        }
        if j_max > DEFAULT_J_MAX && !budget.high_memory {
            return Err(Error::InvalidArgument(format!(
                "j_max = {j_max} needs the high-memory opt-in (default limit {DEFAULT_J_MAX})"
            )));
        }
        if budget.parallelism == 0 {
            return Err(Error::InvalidArgument(
                "parallelism must be at least 1".into(),
            ));
        }
        let (ns, restrict) = match policy {
            NPolicy::ResidueClasses => (residue_representatives(j_max), true),
            NPolicy::Explicit(list) => {
                for &n in list {
                    require_even(n)?;
                }
                let mut list = list.clone();
                list.sort_unstable();
                list.dedup();
                (list, false)
            }
        };

        let provider = TableProvider::new(
            TableBuilder::with_memory_cap(budget.memory_cap),
            self.provider.cache_dir.clone(),
        );
        let started = Instant::now();
        let next = AtomicUsize::new(0);
        let out_of_time = AtomicBool::new(false);
        let (tx, rx) = mpsc::channel::<(i64, Option<Result<JobResult>>)>();
        let workers = budget.parallelism.min(ns.len().max(1));

        std::thread::scope(|scope| {
            for _ in 0..workers {
                let tx = tx.clone();
                let (ns, next, out_of_time, provider) = (&ns, &next, &out_of_time, &provider);
                scope.spawn(move || loop {
                    let idx = next.fetch_add(1, Ordering::SeqCst);
                    let Some(&n) = ns.get(idx) else { break };
                    let expired = budget
                        .time_limit
                        .is_some_and(|limit| started.elapsed() >= limit);
                    if expired || out_of_time.load(Ordering::SeqCst) {
                        out_of_time.store(true, Ordering::SeqCst);
                        let _ = tx.send((n, None));
                        continue;
                    }
                    let result = run_job(provider, conjecture, n, j_max, restrict);
                    let _ = tx.send((n, Some(result)));
                });
            }
        });
        drop(tx);

        let mut outcome = SweepOutcome::default();
        for (n, result) in rx {
            match result {
                None => {
                    outcome.truncated = true;
                    outcome.skipped.push(n);
                }
                Some(Ok(job)) => {
                    outcome.reports.extend(job.reports);
                    outcome.invariant_violations.extend(job.violations);
                }
                Some(Err(e)) => outcome.errors.push(CaseError {
                    n,
                    message: e.to_string(),
                }),
            }
        }
        outcome.reports.sort_by_key(|r| (r.j, r.n, r.conjecture_id));
        outcome.errors.sort_by_key(|e| e.n);
        outcome.skipped.sort_unstable();
        outcome.invariant_violations.sort();
        Ok(outcome)
    }
}

fn orbit_report(
    id: ConjectureId,
    m: i64,
    n: i64,
    j: u32,
    observed: u64,
    started: Instant,
    table_source: TableSource,
) -> VerificationReport {
    let expected = 1u64 << j;
    VerificationReport {
        conjecture_id: id,
        m,
        n,
        j,
        expected,
        observed,
        pass: expected == observed,
        elapsed_ms: elapsed_ms(started),
        table_source,
    }
}

fn seed_orbit(table: &TorsionTable, n: i64, j: u32, seed: Seed) -> Result<u64> {
    let k = 2 * j - 1;
    let word = PackedWord::encode(&table.alphabet(), &conjecture_two_seed(n, j, seed))?;
    orbit_length(table.level(Letter::M, k)?, word)
}

/// `F(C(x, G_n(t)))` for `t` given as a code over `{m, 0}`.
fn masked_image(
    table: &TorsionTable,
    masked: &Alphabet,
    letter: Letter,
    code: u32,
    k: u32,
) -> Result<u32> {
    let alphabet = table.alphabet();
    let m = alphabet.m();
    let t = PackedWord::new(code, k)?.decode(masked);
    let lifted: Vec<i64> = t
        .iter()
        .map(|&x| if x == 0 { alphabet.n() } else { x })
        .collect();
    let image = table
        .apply(letter, PackedWord::encode(&alphabet, &lifted)?)?
        .decode(&alphabet);
    let projected: Vec<i64> = image.iter().map(|&x| if x == m { m } else { 0 }).collect();
    Ok(PackedWord::encode(masked, &projected)?.code())
}

fn run_job(
    provider: &TableProvider,
    conjecture: SweepConjecture,
    n: i64,
    j_max: u32,
    restrict: bool,
) -> Result<JobResult> {
    let started = Instant::now();
    let k_max = 2 * j_max - 1;
    let (m, ids): (i64, &[(ConjectureId, Option<Seed>)]) = match conjecture {
        SweepConjecture::Orbit1 => (1, &[(ConjectureId::Orbit1, None)]),
        SweepConjecture::Orbit2 => (
            -1,
            &[
                (ConjectureId::Orbit2LeftSeed, Some(Seed::Left)),
                (ConjectureId::Orbit2RightSeed, Some(Seed::Right)),
            ],
        ),
    };
    let (table, source) = provider.obtain(Alphabet::new(m, n)?, k_max)?;
    let mut reports = Vec::new();
    let mut violations = Vec::new();
    for &(id, seed) in ids {
        let mut previous: Option<u64> = None;
        for j in 1..=j_max {
            let k = 2 * j - 1;
            let observed = match seed {
                None => orbit_length(table.level(Letter::M, k)?, PackedWord::all_m(k)?)?,
                Some(seed) => seed_orbit(&table, n, j, seed)?,
            };
            let label = format!("{id:?} n={n} j={j}: orbit {observed}");
            if !observed.is_power_of_two() {
                violations.push(format!("{label} is not a power of two"));
            }
            if observed > 1u64 << j {
                violations.push(format!("{label} exceeds 2^{j}"));
            }
            if let Some(prev) = previous {
                if observed < prev {
                    violations.push(format!(
                        "{label} is smaller than orbit {prev} at j={}",
                        j - 1
                    ));
                }
            }
            previous = Some(observed);
            if !restrict || is_representative(n, j) {
                reports.push(orbit_report(id, m, n, j, observed, started, source));
            }
        }
    }
    Ok(JobResult {
        reports,
        violations,
    })
}

pub fn verify_conjecture_one(n: i64, j: u32) -> Result<VerificationReport> {
    Harness::default().verify_conjecture_one(n, j)
}

pub fn verify_conjecture_two(n: i64, j: u32, seed: Seed) -> Result<VerificationReport> {
    Harness::default().verify_conjecture_two(n, j, seed)
}

pub fn expansion_parity(n: i64, j: u32) -> Result<ExpansionParity> {
    Harness::default().expansion_parity(n, j)
}

pub fn check_parity_equivalence(n: i64, j_max: u32) -> Result<ParityEquivalenceReport> {
    Harness::default().check_parity_equivalence(n, j_max)
}

pub fn verify_residue_reduction(
    m: i64,
    j: u32,
    n0: i64,
    witnesses: &[i64],
) -> Result<ResidueReport> {
    Harness::default().verify_residue_reduction(m, j, n0, witnesses)
}
