//! Exact length- and time-bounded two-part complexity by exhaustive enumeration.
//!
//! Every input `w = ī p` with `|w| <= L_max` is run on the reference machine.
//! For each output `x` the table keeps the Pareto frontier of
//! `(|i|, |p|)` pairs over its successful codes, from which `K2`, facticity,
//! `K`, sophistication and coarse sophistication all follow.
//!
//! The empty-machine code `(0, |x|)` exists for every `x` and is not stored;
//! it is added back on lookup. Codes it dominates (those with `|p| >= |x|`)
//! are dropped during enumeration, so the table only holds strings that have
//! some other frontier point.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::bitcodec::{sd_len, BitSource, BitString, Packed};
use crate::error::{domain, Error, Result};
use crate::microvm::{exec, run, Budget, PackedSink, RunStatus};
use crate::report::FacticityReport;
use crate::taxonomy::{block_size_for, taxonomy_label};

/// Hard cap on the enumerated code length (about 2^31 runs).
pub const MAX_CODE_LEN: usize = 30;
/// Outputs are packed into one machine word while enumerating.
pub const MAX_TABLE_OUTPUT: usize = 64;

const CHUNK: u64 = 1 << 14;

/// Index and program-part lengths of one successful code.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Witness {
    pub index_len: u32,
    pub data_len: u32,
}

impl Witness {
    pub fn new(index_len: u32, data_len: u32) -> Self {
        Self {
            index_len,
            data_len,
        }
    }

    /// `|ī| + |p|`.
    #[inline]
    pub fn total(self) -> u64 {
        (sd_len(self.index_len as usize) + self.data_len as usize) as u64
    }
}

/// Pareto-minimal witnesses, sorted by increasing `index_len` (and so strictly
/// decreasing `data_len`).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Frontier(SmallVec<[Witness; 4]>);

impl Frontier {
    pub fn insert(&mut self, w: Witness) {
        if self
            .0
            .iter()
            .any(|e| e.index_len <= w.index_len && e.data_len <= w.data_len)
        {
            return;
        }
        self.0
            .retain(|e| !(w.index_len <= e.index_len && w.data_len <= e.data_len));
        let at = self.0.partition_point(|e| e.index_len < w.index_len);
        self.0.insert(at, w);
    }

    pub fn merge(&mut self, other: &Frontier) {
        for &w in &other.0 {
            self.insert(w);
        }
    }

    pub fn points(&self) -> &[Witness] {
        &self.0
    }
}

/// Everything the table knows about one output string.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeEntry {
    pub k2: u64,
    pub phi: u64,
    /// Shortest `|ī|` over codes with empty program part.
    pub k1: Option<u64>,
    /// Frontier points achieving `k2`.
    pub witnesses: Vec<Witness>,
    /// The full frontier, empty-machine code included.
    pub frontier: Vec<Witness>,
    pub certified: bool,
}

impl CodeEntry {
    fn from_frontier(frontier: Frontier, certified: bool) -> Self {
        let points = frontier.points().to_vec();
        let k2 = points
            .iter()
            .map(|w| w.total())
            .min()
            .expect("frontier never empty");
        let witnesses: Vec<Witness> = points.iter().copied().filter(|w| w.total() == k2).collect();
        let phi = witnesses[0].index_len as u64;
        let k1 = points
            .iter()
            .find(|w| w.data_len == 0)
            .map(|w| sd_len(w.index_len as usize) as u64);
        Self {
            k2,
            phi,
            k1,
            witnesses,
            frontier: points,
            certified,
        }
    }
}

/// Result of one exhaustive enumeration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodeTable {
    max_code_len: usize,
    budget: Budget,
    entries: BTreeMap<Packed, Frontier>,
}

fn validate(max_code_len: usize, budget: Budget) -> Result<()> {
    if max_code_len == 0 {
        return Err(domain("max code length must be at least 1"));
    }
    if max_code_len > MAX_CODE_LEN {
        return Err(Error::Capacity(format!(
            "max code length {max_code_len} exceeds the cap of {MAX_CODE_LEN}"
        )));
    }
    if budget.max_output > MAX_TABLE_OUTPUT {
        return Err(Error::Capacity(format!(
            "max output {} exceeds the table limit of {MAX_TABLE_OUTPUT} bits",
            budget.max_output
        )));
    }
    if budget.max_steps < budget.max_output as u64 {
        return Err(domain(format!(
            "step budget {} must cover max output {} so the empty-machine code always fits",
            budget.max_steps, budget.max_output
        )));
    }
    Ok(())
}

/// One unit of enumeration work.
#[derive(Clone, Copy, Debug)]
enum Task {
    /// Swap index, program parts of `len` bits with values in `lo..hi`.
    Swap { len: u32, lo: u64, hi: u64 },
    /// Program indexes of `len` bits (leading 0) with body values in `lo..hi`.
    Program { len: u32, lo: u64, hi: u64 },
}

fn tasks(max_code_len: usize) -> Vec<Task> {
    let mut out = Vec::new();
    let swap_frame = sd_len(1);
    for len in 0..=max_code_len.saturating_sub(swap_frame) as u32 {
        let total = 1u64 << len;
        let mut lo = 0;
        while lo < total {
            let hi = (lo + CHUNK).min(total);
            out.push(Task::Swap { len, lo, hi });
            lo = hi;
        }
    }
    let mut len = 1u32;
    while sd_len(len as usize) <= max_code_len {
        let total = 1u64 << (len - 1);
        let mut lo = 0;
        while lo < total {
            let hi = (lo + CHUNK).min(total);
            out.push(Task::Program { len, lo, hi });
            lo = hi;
        }
        len += 2;
    }
    out
}

type Partial = HashMap<Packed, Frontier>;

#[inline]
fn record(acc: &mut Partial, x: Packed, w: Witness) {
    if (w.data_len as usize) < x.len as usize {
        acc.entry(x).or_default().insert(w);
    }
}

fn run_task(task: Task, max_code_len: usize, budget: Budget, acc: &mut Partial) {
    match task {
        Task::Swap { len, lo, hi } => {
            let index = Packed::new(1, 1);
            for v in lo..hi {
                let data = Packed::new(v, len);
                let mut sink = PackedSink::default();
                if exec(index, data, budget, &mut sink).status == RunStatus::Ok {
                    record(acc, sink.packed(), Witness::new(1, len));
                }
            }
        }
        Task::Program { len, lo, hi } => {
            let frame = sd_len(len as usize);
            for body in lo..hi {
                let index = Packed::new(body, len);
                // CPY opcodes are the "10" pairs of the body
                let copies = (0..(len as usize - 1) / 2)
                    .filter(|&j| index.bit(1 + 2 * j) && !index.bit(2 + 2 * j))
                    .count() as u32;
                if frame + copies as usize > max_code_len {
                    continue;
                }
                for v in 0..(1u64 << copies) {
                    let mut sink = PackedSink::default();
                    let data = Packed::new(v, copies);
                    if exec(index, data, budget, &mut sink).status == RunStatus::Ok {
                        record(acc, sink.packed(), Witness::new(len, copies));
                    }
                }
            }
        }
    }
}

fn merge_partials(a: Partial, b: Partial) -> Partial {
    let (mut big, small) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    for (x, f) in small {
        big.entry(x).or_default().merge(&f);
    }
    big
}

/// Exhaustive enumeration of all codes of length at most `max_code_len`,
/// parallel over disjoint input ranges.
pub fn enumerate(max_code_len: usize, budget: Budget) -> Result<CodeTable> {
    validate(max_code_len, budget)?;
    let merged = tasks(max_code_len)
        .into_par_iter()
        .fold(Partial::new, |mut acc, task| {
            run_task(task, max_code_len, budget, &mut acc);
            acc
        })
        .reduce(Partial::new, merge_partials);
    Ok(CodeTable {
        max_code_len,
        budget,
        entries: merged.into_iter().collect(),
    })
}

/// Single-threaded enumeration in canonical order.
pub fn enumerate_serial(max_code_len: usize, budget: Budget) -> Result<CodeTable> {
    validate(max_code_len, budget)?;
    let mut acc = Partial::new();
    for task in tasks(max_code_len) {
        run_task(task, max_code_len, budget, &mut acc);
    }
    Ok(CodeTable {
        max_code_len,
        budget,
        entries: acc.into_iter().collect(),
    })
}

impl CodeTable {
    pub fn max_code_len(&self) -> usize {
        self.max_code_len
    }

    pub fn budget(&self) -> Budget {
        self.budget
    }

    /// Exact iff the empty-machine code `|x| + 1` lies inside the enumerated range.
    pub fn is_certified(&self, x: &BitString) -> bool {
        x.len() < self.max_code_len && x.len() <= self.budget.max_output
    }

    /// Number of strings with a stored non-trivial frontier.
    pub fn stored_len(&self) -> usize {
        self.entries.len()
    }

    /// Strings with a frontier point besides the empty-machine code, in
    /// length-then-lexicographic order.
    pub fn compressible(&self) -> impl Iterator<Item = BitString> + '_ {
        self.entries.keys().map(|k| k.to_bitstring())
    }

    /// Every certified string, in length-then-lexicographic order.
    pub fn certified_strings(&self) -> impl Iterator<Item = BitString> {
        let top = (self.max_code_len - 1).min(self.budget.max_output);
        (0..=top).flat_map(BitString::all_of_len)
    }

    pub fn lookup(&self, x: &BitString) -> Result<CodeEntry> {
        if x.len() > self.budget.max_output {
            return Err(domain(format!(
                "string of {} bits exceeds the table's max output {}",
                x.len(),
                self.budget.max_output
            )));
        }
        let key = Packed::from_bitstring(x).expect("max output fits a word");
        let mut frontier = self.entries.get(&key).cloned().unwrap_or_default();
        frontier.insert(Witness::new(0, x.len() as u32));
        Ok(CodeEntry::from_frontier(frontier, self.is_certified(x)))
    }

    fn certified_entry(&self, x: &BitString) -> Result<CodeEntry> {
        let entry = self.lookup(x)?;
        if !entry.certified {
            return Err(Error::Uncertified(x.to_string()));
        }
        Ok(entry)
    }

    /// Canonical text dump; identical tables give identical bytes.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "# max_code_len={} max_steps={} max_output={}",
            self.max_code_len, self.budget.max_steps, self.budget.max_output
        );
        for (x, f) in &self.entries {
            let _ = write!(out, "{}", x.to_bitstring());
            for w in f.points() {
                let _ = write!(out, " {}:{}", w.index_len, w.data_len);
            }
            out.push('\n');
        }
        out
    }
}

/// Facticity `phi(x)` and whether it is exact.
pub fn facticity_of(table: &CodeTable, x: &BitString) -> Result<(u64, bool)> {
    let e = table.lookup(x)?;
    Ok((e.phi, e.certified))
}

/// Plain complexity: the shortest whole input producing `x`. On this machine
/// every input is a two-part code, so this equals `K2`.
pub fn plain_complexity(table: &CodeTable, x: &BitString) -> Result<u64> {
    let e = table.certified_entry(x)?;
    Ok(e.frontier
        .iter()
        .map(|w| w.total())
        .min()
        .expect("non-empty"))
}

/// Sophistication with slack `c`: the shortest index among codes at most `c`
/// bits longer than `K2(x)`.
pub fn soph(table: &CodeTable, x: &BitString, c: u64) -> Result<u64> {
    let e = table.certified_entry(x)?;
    Ok(e.frontier
        .iter()
        .filter(|w| w.total() <= e.k2 + c)
        .map(|w| w.index_len as u64)
        .min()
        .expect("optimal witness always qualifies"))
}

/// Coarse sophistication: `min (2|ī| + |p|) - C(x)`.
pub fn csoph(table: &CodeTable, x: &BitString) -> Result<i64> {
    let e = table.certified_entry(x)?;
    let c = plain_complexity(table, x)?;
    debug_assert_eq!(c, e.k2);
    let best = e
        .frontier
        .iter()
        .map(|w| 2 * sd_len(w.index_len as usize) as i64 + w.data_len as i64)
        .min()
        .expect("non-empty");
    Ok(best - c as i64)
}

/// Full report for `x`, labelled with block size derived from `|x|`.
pub fn report(table: &CodeTable, x: &BitString) -> Result<FacticityReport> {
    let e = table.lookup(x)?;
    let n = x.len() as u64;
    let label = taxonomy_label(e.phi, e.k2, n, block_size_for(n))?;
    Ok(FacticityReport {
        n,
        k2: e.k2,
        phi: e.phi,
        delta: n as i64 - e.k2 as i64,
        rho: e.k2 as i64 - sd_len(e.phi as usize) as i64,
        label,
        certified: e.certified,
        estimated: false,
        model: None,
    })
}

/// One draw from the length-uniform approximation of the universal distribution.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UniversalSample {
    pub x: BitString,
    pub k2: u64,
}

/// Enumerates a table with `L_max = max_len` and samples from it.
pub fn universal_sample(
    max_len: usize,
    n_samples: usize,
    budget: Budget,
    seed: u64,
) -> Result<Vec<UniversalSample>> {
    let table = enumerate(max_len, budget)?;
    universal_sample_with(&table, max_len, n_samples, seed)
}

/// Draws `n_samples` inputs (length uniform in `1..=max_len`, then uniform bits),
/// runs them, and annotates each successful output with its tabulated `K2`.
pub fn universal_sample_with(
    table: &CodeTable,
    max_len: usize,
    n_samples: usize,
    seed: u64,
) -> Result<Vec<UniversalSample>> {
    if max_len == 0 || max_len > MAX_CODE_LEN {
        return Err(Error::Capacity(format!(
            "sample length {max_len} outside 1..={MAX_CODE_LEN}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for _ in 0..n_samples {
        let len = rng.gen_range(1..=max_len);
        let w: BitString = (0..len).map(|_| rng.gen::<bool>()).collect();
        let outcome = run(&w, table.budget());
        if outcome.is_ok() {
            let k2 = table.lookup(&outcome.output)?.k2;
            out.push(UniversalSample {
                x: outcome.output,
                k2,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::microvm::{program_index, Opcode::*};

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    #[test]
    fn frontier_keeps_pareto_points() {
        let mut f = Frontier::default();
        f.insert(Witness::new(5, 3));
        f.insert(Witness::new(7, 1));
        f.insert(Witness::new(6, 4));
        f.insert(Witness::new(3, 9));
        f.insert(Witness::new(5, 2));
        assert_eq!(
            f.points(),
            &[Witness::new(3, 9), Witness::new(5, 2), Witness::new(7, 1)]
        );
    }

    #[test]
    fn caps_are_enforced() {
        assert!(matches!(
            enumerate(31, Budget::default()),
            Err(Error::Capacity(_))
        ));
        assert!(matches!(
            enumerate(10, Budget::new(10_000, 65).unwrap()),
            Err(Error::Capacity(_))
        ));
        assert!(enumerate(10, Budget::new(8, 16).unwrap()).is_err());
        assert!(enumerate(0, Budget::default()).is_err());
    }

    #[test]
    fn empty_string_and_identity_defaults() {
        let t = enumerate(12, Budget::for_output(16).unwrap()).unwrap();
        let e = t.lookup(&BitString::new()).unwrap();
        assert_eq!((e.k2, e.phi, e.k1), (1, 0, Some(1)));
        let x = bs("0110100");
        let e = t.lookup(&x).unwrap();
        assert_eq!((e.k2, e.phi), (8, 0));
        assert!(e.certified);
        let long = bs("011010011010");
        let e = t.lookup(&long).unwrap();
        assert!(!e.certified);
        assert_eq!(e.k2, 13);
        assert!(matches!(soph(&t, &long, 0), Err(Error::Uncertified(_))));
    }

    #[test]
    fn doubling_compresses_zeros() {
        let t = enumerate(17, Budget::for_output(32).unwrap()).unwrap();
        let x = BitString::repeat(false, 16);
        let e = t.lookup(&x).unwrap();
        assert!(e.certified);
        // OUT0 DBL DBL DBL DBL: |i| = 9, |ī| = 9 + 2*3 + 1 = 16
        assert!(e.k2 <= 16);
        assert!(e.phi > 0);
        assert_eq!(
            run(
                &crate::encode_sd(&program_index(&[Out0, Dbl, Dbl, Dbl, Dbl])),
                t.budget()
            )
            .output,
            x
        );
        // eight zeros are too short to beat the empty machine
        let e = t.lookup(&BitString::repeat(false, 8)).unwrap();
        assert_eq!((e.k2, e.phi), (9, 0));
    }

    #[test]
    fn sampling_is_deterministic() {
        let t = enumerate(12, Budget::for_output(16).unwrap()).unwrap();
        let a = universal_sample_with(&t, 12, 500, 7).unwrap();
        let b = universal_sample_with(&t, 12, 500, 7).unwrap();
        assert_eq!(a, b);
        assert!(!a.is_empty());
        let c = universal_sample_with(&t, 12, 500, 8).unwrap();
        assert_ne!(a, c);
    }
}
