//! Invariant suites run by `kolakoski selfcheck`.
//!
//! Every suite returns a [`SuiteResult`] instead of panicking so the CLI can
//! print one line per suite and name the invariant that broke.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::alphabet::{Alphabet, Letter};
use crate::harness::{Budget, Harness, NPolicy, Seed, SweepConjecture};
use crate::orbit::check_orbit_theorems;
use crate::packed::PackedWord;
use crate::rle::Oracle;
use crate::torsion::{build_tables, ExtendedTorsion, TorsionTable};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scale {
    Quick,
    Full,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub elapsed_ms: u64,
}

type Check = std::result::Result<String, String>;

fn run_suite(name: &str, f: impl FnOnce() -> Check) -> SuiteResult {
    let started = Instant::now();
    let (passed, detail) = match f() {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    SuiteResult {
        name: name.to_string(),
        passed,
        detail,
        elapsed_ms: started.elapsed().as_millis() as u64,
    }
}

fn ab(m: i64, n: i64) -> Alphabet {
    Alphabet::new(m, n).expect("distinct letters")
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

/// Reference image of `C(x, w)` on a single word: the direct oracle for
/// positive alphabets, extended torsion otherwise.
fn reference_image(
    alphabet: &Alphabet,
    ext: &mut ExtendedTorsion,
    letter: Letter,
    word: PackedWord,
) -> std::result::Result<u32, String> {
    let t = word.decode(alphabet);
    let x = alphabet.symbol(letter);
    let image = if alphabet.is_expansion_valid() {
        Oracle::new(*alphabet)
            .map_err(err)?
            .torsion(&[x], &t)
            .map_err(err)?
    } else {
        ext.apply(x, &t).map_err(err)?
    };
    Ok(PackedWord::encode(alphabet, &image).map_err(err)?.code())
}

/// Every entry of levels `1..=k_limit` against the reference.
pub fn oracle_equivalence(table: &TorsionTable, k_limit: u32) -> Check {
    let a = table.alphabet();
    let mut ext = ExtendedTorsion::new(a);
    let mut checked = 0u64;
    for k in 1..=k_limit.min(table.k_max()) {
        for letter in [Letter::M, Letter::N] {
            let level = table.level(letter, k).map_err(err)?;
            for code in 0..1u32 << k {
                let word = PackedWord::new(code, k).map_err(err)?;
                let want = reference_image(&a, &mut ext, letter, word)?;
                if level.apply(code) != want {
                    return Err(format!(
                        "alphabet {a}: C({letter}, -) at k={k} sends {code} to {}, expected {want}",
                        level.apply(code)
                    ));
                }
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} entries match"))
}

/// `count` random entries at word lengths up to `k_limit`.
pub fn oracle_spot_check(table: &TorsionTable, k_limit: u32, count: usize, seed: u64) -> Check {
    let a = table.alphabet();
    let mut ext = ExtendedTorsion::new(a);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let top = k_limit.min(table.k_max());
    for _ in 0..count {
        let k = rng.gen_range(1..=top);
        let code = rng.gen_range(0..1u32 << k);
        let letter = if rng.gen_bool(0.5) {
            Letter::M
        } else {
            Letter::N
        };
        let word = PackedWord::new(code, k).map_err(err)?;
        let want = reference_image(&a, &mut ext, letter, word)?;
        let got = table.level(letter, k).map_err(err)?.apply(code);
        if got != want {
            return Err(format!(
                "alphabet {a}: C({letter}, -) at k={k} sends {code} to {got}, expected {want}"
            ));
        }
    }
    Ok(format!("{count} random entries match (seed {seed})"))
}

/// Torsion by one letter always flips the first term.
pub fn first_term_flips(table: &TorsionTable) -> Check {
    for k in 1..=table.k_max() {
        for letter in [Letter::M, Letter::N] {
            let level = table.level(letter, k).map_err(err)?;
            if let Some(code) = (0..1u32 << k).find(|&c| (level.apply(c) ^ c) & 1 == 0) {
                return Err(format!(
                    "C({letter}, -) at k={k} keeps the first term of {code}"
                ));
            }
        }
    }
    Ok("bit 0 flipped everywhere".into())
}

/// Two words agree in exactly their first `j` terms iff their images do.
pub fn prefix_lemma(table: &TorsionTable, k_limit: u32) -> Check {
    let mut pairs = 0u64;
    for k in 1..=k_limit.min(table.k_max()) {
        for letter in [Letter::M, Letter::N] {
            let level = table.level(letter, k).map_err(err)?;
            for x in 0..1u32 << k {
                for y in (x + 1)..1u32 << k {
                    let before = (x ^ y).trailing_zeros();
                    let after = (level.apply(x) ^ level.apply(y)).trailing_zeros();
                    if before != after {
                        return Err(format!(
                            "C({letter}, -) at k={k}: {x} and {y} share {before} terms, images share {after}"
                        ));
                    }
                    pairs += 1;
                }
            }
        }
    }
    Ok(format!("{pairs} pairs"))
}

pub fn orbit_theorems(table: &TorsionTable, k_limit: u32) -> Check {
    let mut cycles = 0u64;
    for k in 1..=k_limit.min(table.k_max()) {
        for letter in [Letter::M, Letter::N] {
            let report =
                check_orbit_theorems(table.level(letter, k).map_err(err)?, k).map_err(err)?;
            if let Some(v) = report.violations.first() {
                return Err(format!("C({letter}, -) at k={k}: {v:?}"));
            }
            cycles += report.histogram.values().sum::<u64>();
        }
    }
    Ok(format!("{cycles} cycles, all powers of two within bound"))
}

pub fn permutation_algebra(table: &TorsionTable, k_limit: u32, trials: usize, seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for k in 1..=k_limit.min(table.k_max()) {
        for letter in [Letter::M, Letter::N] {
            let p = table.level(letter, k).map_err(err)?;
            if !p.power(0).is_identity() {
                return Err(format!("p^0 is not the identity at k={k}"));
            }
            if !p.power(-1).compose(p).map_err(err)?.is_identity() {
                return Err(format!("p^-1 . p is not the identity at k={k}"));
            }
            for _ in 0..trials {
                let a = rng.gen_range(-20i64..=20);
                let b = rng.gen_range(-20i64..=20);
                if p.power(a).compose(&p.power(b)).map_err(err)? != p.power(a + b) {
                    return Err(format!("p^{a} . p^{b} != p^{} at k={k}", a + b));
                }
            }
        }
    }
    Ok(format!("levels up to {k_limit}, seed {seed}"))
}

fn random_word(rng: &mut ChaCha8Rng, a: &Alphabet, len: usize) -> Vec<i64> {
    (0..len)
        .map(|_| if rng.gen_bool(0.5) { a.m() } else { a.n() })
        .collect()
}

/// The four concatenation identities linking expansion and torsion, on
/// random instances.
pub fn identities(alphabet: Alphabet, instances: usize, seed: u64) -> Check {
    let o = Oracle::new(alphabet).map_err(err)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..instances {
        let (l1, l2) = (rng.gen_range(1..=8), rng.gen_range(1..=8));
        let s1 = random_word(&mut rng, &alphabet, l1);
        let s2 = random_word(&mut rng, &alphabet, l2);
        let t_len = rng.gen_range(2..=8);
        let split = rng.gen_range(1..t_len);
        let t = random_word(&mut rng, &alphabet, t_len);
        let (t1, t2) = t.split_at(split);
        let s12: Vec<i64> = s1.iter().chain(&s2).copied().collect();
        let fail = |which: &str| {
            Err(format!(
                "identity ({which}) fails on instance {i}: s1={s1:?} s2={s2:?} t1={t1:?} t2={t2:?}"
            ))
        };

        let c_s1_t = o.torsion(&s1, &t).map_err(err)?;
        let lhs = o.expand(&s12, &t).map_err(err)?;
        let mut rhs = o.expand(&s1, &t).map_err(err)?;
        rhs.extend(o.expand(&s2, &c_s1_t).map_err(err)?);
        if lhs != rhs {
            return fail("1");
        }

        let e_s1_t1 = o.expand(&s1, t1).map_err(err)?;
        if o.expand(&s1, &t).map_err(err)? != o.expand(&e_s1_t1, t2).map_err(err)? {
            return fail("2");
        }

        if o.torsion(&s12, &t).map_err(err)? != o.torsion(&s2, &c_s1_t).map_err(err)? {
            return fail("3");
        }

        let mut rhs = o.torsion(&s1, t1).map_err(err)?;
        rhs.extend(o.torsion(&e_s1_t1, t2).map_err(err)?);
        if c_s1_t != rhs {
            return fail("4");
        }
    }
    Ok(format!(
        "{instances} instances over {alphabet}, seed {seed}"
    ))
}

/// Extended torsion agrees with the oracle for positive `x`.
pub fn extended_matches_oracle(alphabet: Alphabet, max_len: u32, max_x: i64) -> Check {
    let o = Oracle::new(alphabet).map_err(err)?;
    let mut ext = ExtendedTorsion::new(alphabet);
    let mut checked = 0u64;
    for k in 0..=max_len {
        for code in 0..1u32 << k {
            let t = PackedWord::new(code, k).map_err(err)?.decode(&alphabet);
            for x in 1..=max_x {
                if ext.apply(x, &t).map_err(err)? != o.torsion(&[x], &t).map_err(err)? {
                    return Err(format!("x={x} t={t:?} over {alphabet}"));
                }
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} cases"))
}

/// Invariant suites over an arbitrary table, e.g. one loaded from a cache.
pub fn check_table(table: &TorsionTable, seed: u64) -> Vec<SuiteResult> {
    let k = table.k_max();
    vec![
        run_suite("table-first-term-flip", || first_term_flips(table)),
        run_suite("table-prefix-lemma", || prefix_lemma(table, k.min(9))),
        run_suite("table-orbit-theorems", || orbit_theorems(table, k.min(20))),
        run_suite("table-oracle-equivalence", || {
            oracle_equivalence(table, k.min(8))
        }),
        run_suite("table-oracle-spot-check", || {
            oracle_spot_check(table, k.min(10), 1000, seed)
        }),
    ]
}

pub fn run(scale: Scale, seed: u64) -> Vec<SuiteResult> {
    let full = scale == Scale::Full;
    let k_oracle = if full { 10 } else { 8 };
    let k_orbit = if full { 14 } else { 12 };
    let k_prefix = if full { 10 } else { 8 };
    let n_identities = if full { 10_000 } else { 1_000 };
    let j_orbit1 = if full { 8 } else { 6 };
    let j_orbit2 = if full { 6 } else { 4 };

    let mut results = Vec::new();
    results.push(run_suite("packing-bijection", || {
        let a = ab(1, 2);
        for k in 0..=12u32 {
            for code in 0..1u32 << k {
                let w = PackedWord::new(code, k).map_err(err)?;
                if PackedWord::encode(&a, &w.decode(&a)).map_err(err)? != w {
                    return Err(format!("code {code} at k={k} does not round-trip"));
                }
            }
        }
        Ok("k <= 12".into())
    }));

    let tables: Vec<(Alphabet, TorsionTable)> = [(1, 2), (1, 4), (2, 1)]
        .into_iter()
        .map(|(m, n)| {
            let a = ab(m, n);
            (
                a,
                build_tables(a, k_orbit).expect("small tables fit the default budget"),
            )
        })
        .collect();

    results.push(run_suite("oracle-equivalence", || {
        let mut details = Vec::new();
        for (_, t) in &tables {
            details.push(oracle_equivalence(t, k_oracle)?);
        }
        Ok(details.join("; "))
    }));
    results.push(run_suite("first-term-flip", || {
        tables
            .iter()
            .try_for_each(|(_, t)| first_term_flips(t).map(|_| ()))?;
        Ok("all tables".into())
    }));
    results.push(run_suite("prefix-lemma", || {
        tables
            .iter()
            .try_for_each(|(_, t)| prefix_lemma(t, k_prefix).map(|_| ()))?;
        Ok(format!("k <= {k_prefix}"))
    }));
    results.push(run_suite("orbit-theorems", || {
        tables[..2]
            .iter()
            .try_for_each(|(_, t)| orbit_theorems(t, k_orbit).map(|_| ()))?;
        Ok(format!("(1,2) and (1,4), k <= {k_orbit}"))
    }));
    results.push(run_suite("permutation-algebra", || {
        tables
            .iter()
            .try_for_each(|(_, t)| permutation_algebra(t, 12, 3, seed).map(|_| ()))?;
        Ok(format!("seed {seed}"))
    }));
    results.push(run_suite("identities", || {
        let a = identities(ab(1, 2), n_identities, seed)?;
        let b = identities(ab(1, 4), n_identities, seed.wrapping_add(1))?;
        Ok(format!("{a}; {b}"))
    }));
    results.push(run_suite("extended-torsion", || {
        extended_matches_oracle(ab(1, 2), if full { 10 } else { 7 }, 5)?;
        let t = build_tables(ab(-1, 4), 8).map_err(err)?;
        oracle_equivalence(&t, 8)
    }));

    let harness = Harness::default();
    let budget = Budget {
        parallelism: std::thread::available_parallelism().map_or(1, |p| p.get()),
        ..Budget::default()
    };
    results.push(run_suite("conjecture-one", || {
        let out = harness
            .sweep(
                SweepConjecture::Orbit1,
                j_orbit1,
                &NPolicy::ResidueClasses,
                &budget,
            )
            .map_err(err)?;
        if out.all_passed() {
            Ok(format!(
                "{} residue-class cases, j <= {j_orbit1}",
                out.reports.len()
            ))
        } else {
            Err(format!(
                "{} failures, {} errors, violations {:?}",
                out.failed(),
                out.errors.len(),
                out.invariant_violations
            ))
        }
    }));
    results.push(run_suite("conjecture-two", || {
        for n in [-4, -2, 0, 2, 4, 6, 8] {
            for j in 1..=j_orbit2 {
                for seed in [Seed::Left, Seed::Right] {
                    let r = harness.verify_conjecture_two(n, j, seed).map_err(err)?;
                    if !r.pass {
                        return Err(format!("{seed:?} seed, n={n} j={j}: orbit {}", r.observed));
                    }
                }
            }
        }
        Ok(format!("j <= {j_orbit2}"))
    }));
    results.push(run_suite("parity-equivalence", || {
        for (n, j_max) in [(2, 4), (4, if full { 4 } else { 3 })] {
            let r = harness.check_parity_equivalence(n, j_max).map_err(err)?;
            if !(r.equivalence_confirmed() && r.both_sides_hold()) {
                return Err(format!("n={n}: {:?}", r.rows));
            }
        }
        Ok("n in {2, 4}".into())
    }));
    results.push(run_suite("residue-reduction", || {
        for (m, n0) in [(1, 0), (1, 2), (-1, 0), (-1, 2)] {
            let witnesses = [n0, n0 + 4, n0 + 8];
            let r = harness
                .verify_residue_reduction(m, 3, n0, &witnesses)
                .map_err(err)?;
            if let Some(mm) = r.first_mismatch {
                return Err(format!("m={m} n0={n0}: {mm:?}"));
            }
        }
        Ok("j = 3".into())
    }));
    results
}
