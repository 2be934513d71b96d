//! Truth-table representation of Boolean functions and query-complexity
//! measures.
//!
//! A [`TruthTable`] packs the 2^n output bits of f: {0,1}^n -> {0,1} into
//! 64-bit words. Index `k` encodes the assignment where variable `v` equals
//! bit `v` of `k`, so variable 0 is the least-significant bit.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::dtree::DecisionTree;

/// Cap on the exact decision-tree-depth recursion.
pub const DTC_CAP: usize = 14;

/// Cap on the exhaustive block-sensitivity / certificate searches.
pub const BS_CERT_CAP: usize = 12;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BoolFnError {
    #[error("{what} supports at most {cap} variables, got {requested}")]
    CapExceeded { what: &'static str, requested: usize, cap: usize },
    #[error("truth table text must consist of '0'/'1' characters")]
    BadChar,
    #[error("truth table text length must be a power of two (got {0})")]
    BadLength(usize),
    #[error("selector function has {got} variables, expected {expected}")]
    SelectorArity { expected: usize, got: usize },
}

/// Packed truth table of a Boolean function on at most [`TruthTable::MAX_VARS`]
/// variables.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TruthTable {
    num_vars: usize,
    words: Vec<u64>,
}

fn words_for(num_vars: usize) -> usize {
    if num_vars < 6 {
        1
    } else {
        1 << (num_vars - 6)
    }
}

/// Mask of the valid lanes in the last word of an `num_vars`-variable table.
fn tail_mask(num_vars: usize) -> u64 {
    if num_vars < 6 {
        (1u64 << (1 << num_vars)) - 1
    } else {
        !0
    }
}

impl TruthTable {
    pub const MAX_VARS: usize = 20;

    fn check_vars(num_vars: usize, what: &'static str) -> Result<(), BoolFnError> {
        if num_vars > Self::MAX_VARS {
            return Err(BoolFnError::CapExceeded {
                what,
                requested: num_vars,
                cap: Self::MAX_VARS,
            });
        }
        Ok(())
    }

    pub fn constant(num_vars: usize, value: bool) -> Result<Self, BoolFnError> {
        Self::check_vars(num_vars, "truth table")?;
        let fill = if value { tail_mask(num_vars) } else { 0 };
        let mut words = vec![if value { !0 } else { 0 }; words_for(num_vars)];
        *words.last_mut().unwrap() = fill;
        Ok(TruthTable { num_vars, words })
    }

    /// Builds a table by evaluating `f` on every assignment index.
    pub fn from_fn(num_vars: usize, mut f: impl FnMut(usize) -> bool) -> Result<Self, BoolFnError> {
        Self::check_vars(num_vars, "truth table")?;
        let mut words = vec![0u64; words_for(num_vars)];
        for k in 0..1usize << num_vars {
            if f(k) {
                words[k >> 6] |= 1 << (k & 63);
            }
        }
        Ok(TruthTable { num_vars, words })
    }

    pub(crate) fn from_words(num_vars: usize, mut words: Vec<u64>) -> Self {
        assert!(num_vars <= Self::MAX_VARS);
        assert_eq!(words.len(), words_for(num_vars));
        let mask = tail_mask(num_vars);
        *words.last_mut().unwrap() &= mask;
        TruthTable { num_vars, words }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    /// Number of table entries, 2^n.
    pub fn size(&self) -> usize {
        1 << self.num_vars
    }

    pub fn get(&self, index: usize) -> bool {
        debug_assert!(index < self.size());
        (self.words[index >> 6] >> (index & 63)) & 1 == 1
    }

    /// `Some(value)` when the function is constant.
    pub fn is_constant(&self) -> Option<bool> {
        if self.words.iter().all(|&w| w == 0) {
            return Some(false);
        }
        let mask = tail_mask(self.num_vars);
        let full = self
            .words
            .iter()
            .enumerate()
            .all(|(i, &w)| w == if i + 1 == self.words.len() { mask } else { !0 });
        if full {
            Some(true)
        } else {
            None
        }
    }

    /// Fixes one variable, keeping the arity: entries where `var` differs
    /// from `value` are overwritten by their completed counterparts.
    pub fn restrict(&self, var: usize, value: bool) -> TruthTable {
        assert!(var < self.num_vars);
        let bit = 1usize << var;
        let forced = if value { bit } else { 0 };
        TruthTable::from_fn(self.num_vars, |k| self.get((k & !bit) | forced))
            .expect("arity unchanged")
    }

    /// Drops one variable after fixing it, producing an (n-1)-variable table.
    pub fn collapse(&self, var: usize, value: bool) -> TruthTable {
        assert!(var < self.num_vars);
        let low_mask = (1usize << var) - 1;
        let forced = if value { 1usize << var } else { 0 };
        TruthTable::from_fn(self.num_vars - 1, |j| {
            let k = (j & low_mask) | ((j & !low_mask) << 1) | forced;
            self.get(k)
        })
        .expect("arity shrank")
    }

    /// Variables the function actually depends on.
    pub fn dependent_vars(&self) -> BTreeSet<usize> {
        let mut vars = BTreeSet::new();
        for v in 0..self.num_vars {
            let bit = 1usize << v;
            for k in 0..self.size() {
                if k & bit == 0 && self.get(k) != self.get(k | bit) {
                    vars.insert(v);
                    break;
                }
            }
        }
        vars
    }

    pub fn is_nondegenerate(&self) -> bool {
        self.dependent_vars().len() == self.num_vars
    }
}

impl fmt::Display for TruthTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for k in 0..self.size() {
            f.write_str(if self.get(k) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for TruthTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TruthTable({} vars, {})", self.num_vars, self)
    }
}

impl FromStr for TruthTable {
    type Err = BoolFnError;

    fn from_str(s: &str) -> Result<Self, BoolFnError> {
        let len = s.len();
        if !len.is_power_of_two() || len > 1 << TruthTable::MAX_VARS {
            return Err(BoolFnError::BadLength(len));
        }
        let num_vars = len.trailing_zeros() as usize;
        let mut words = vec![0u64; words_for(num_vars)];
        for (k, ch) in s.chars().enumerate() {
            match ch {
                '1' => words[k >> 6] |= 1 << (k & 63),
                '0' => {}
                _ => return Err(BoolFnError::BadChar),
            }
        }
        Ok(TruthTable { num_vars, words })
    }
}

/// Index of the assignment whose variable `v` equals `bits[v]`.
pub fn index_from_bits(bits: &[bool]) -> usize {
    bits.iter()
        .enumerate()
        .fold(0, |acc, (v, &b)| acc | ((b as usize) << v))
}

/// All measures in one report.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeasureReport {
    pub d: usize,
    pub s: usize,
    pub psens: usize,
    pub bs: usize,
    pub c: usize,
    pub deg: usize,
    pub dependent_vars: BTreeSet<usize>,
}

/// Computes every measure; requires n within the tightest cap
/// ([`BS_CERT_CAP`]).
pub fn measure(f: &TruthTable) -> Result<MeasureReport, BoolFnError> {
    Ok(MeasureReport {
        d: decision_tree_complexity(f)?.0,
        s: sensitivity(f),
        psens: positive_sensitivity(f),
        bs: block_sensitivity(f)?,
        c: certificate_complexity(f)?,
        deg: degree(f),
        dependent_vars: f.dependent_vars(),
    })
}

fn sensitivity_profile(f: &TruthTable) -> (usize, usize) {
    let n = f.num_vars;
    let mut s = 0;
    let mut psens = 0;
    for k in 0..f.size() {
        let fk = f.get(k);
        let mut here = 0;
        let mut here_pos = 0;
        for v in 0..n {
            if f.get(k ^ (1 << v)) != fk {
                here += 1;
                if k >> v & 1 == 1 {
                    here_pos += 1;
                }
            }
        }
        s = s.max(here);
        psens = psens.max(here_pos);
    }
    (s, psens)
}

/// Maximum number of sensitive coordinates over all inputs.
pub fn sensitivity(f: &TruthTable) -> usize {
    sensitivity_profile(f).0
}

/// Like [`sensitivity`], but only coordinates set to 1 count.
pub fn positive_sensitivity(f: &TruthTable) -> usize {
    sensitivity_profile(f).1
}

/// Exact decision tree depth together with one optimal tree.
///
/// The recursion is `D(f) = 0` for constants, else
/// `min_v 1 + max(D(f|v=0), D(f|v=1))` over dependent variables, memoized on
/// the pair (free-variable mask, packed subfunction table). Ties break
/// toward the smallest variable index, so the returned tree is canonical.
pub fn decision_tree_complexity(
    f: &TruthTable,
) -> Result<(usize, DecisionTree), BoolFnError> {
    use std::collections::HashMap;

    if f.num_vars > DTC_CAP {
        return Err(BoolFnError::CapExceeded {
            what: "decision tree depth",
            requested: f.num_vars,
            cap: DTC_CAP,
        });
    }

    type Memo = HashMap<(u32, Vec<u64>), (usize, Option<usize>)>;

    fn mask_of(free_vars: &[usize]) -> u32 {
        free_vars.iter().fold(0u32, |m, &v| m | (1 << v))
    }

    fn search(sub: &TruthTable, free_vars: &[usize], memo: &mut Memo) -> usize {
        if sub.is_constant().is_some() {
            return 0;
        }
        let key = (mask_of(free_vars), sub.words.clone());
        if let Some(&(depth, _)) = memo.get(&key) {
            return depth;
        }
        let mut best: Option<(usize, usize)> = None;
        for pos in 0..free_vars.len() {
            let bit = 1usize << pos;
            let dependent = (0..sub.size())
                .any(|j| j & bit == 0 && sub.get(j) != sub.get(j | bit));
            if !dependent {
                continue;
            }
            let mut rest = free_vars.to_vec();
            rest.remove(pos);
            let d0 = search(&sub.collapse(pos, false), &rest, memo);
            let d1 = search(&sub.collapse(pos, true), &rest, memo);
            let d = 1 + d0.max(d1);
            if best.is_none_or(|(bd, _)| d < bd) {
                best = Some((d, free_vars[pos]));
            }
        }
        let (depth, var) = best.expect("non-constant function has a dependent variable");
        memo.insert(key, (depth, Some(var)));
        depth
    }

    fn build(sub: &TruthTable, free_vars: &[usize], memo: &Memo) -> DecisionTree {
        if let Some(v) = sub.is_constant() {
            return DecisionTree::Leaf(v);
        }
        let key = (mask_of(free_vars), sub.words.clone());
        let (_, var) = memo[&key];
        let var = var.expect("non-constant entry records a branch variable");
        let pos = free_vars.iter().position(|&v| v == var).unwrap();
        let mut rest = free_vars.to_vec();
        rest.remove(pos);
        let low = build(&sub.collapse(pos, false), &rest, memo);
        let high = build(&sub.collapse(pos, true), &rest, memo);
        DecisionTree::query(var, low, high)
    }

    let free: Vec<usize> = (0..f.num_vars).collect();
    let mut memo = Memo::new();
    let depth = search(f, &free, &mut memo);
    let tree = build(f, &free, &memo);
    Ok((depth, tree))
}

/// Maximum over inputs of the largest packing of disjoint sensitive blocks.
pub fn block_sensitivity(f: &TruthTable) -> Result<usize, BoolFnError> {
    let n = f.num_vars;
    if n > BS_CERT_CAP {
        return Err(BoolFnError::CapExceeded {
            what: "block sensitivity",
            requested: n,
            cap: BS_CERT_CAP,
        });
    }
    let total = f.size();
    let mut sens = vec![false; total];
    let mut dp = vec![0u8; total];
    let mut best = 0usize;
    for x in 0..total {
        let fx = f.get(x);
        for (b, flag) in sens.iter_mut().enumerate().skip(1) {
            *flag = f.get(x ^ b) != fx;
        }
        dp[0] = 0;
        for m in 1..total {
            let low = m & m.wrapping_neg();
            let rest = m ^ low;
            // Either the lowest variable stays unused, or it sits inside
            // some sensitive block contained in m.
            let mut here = dp[rest];
            let mut s = rest;
            loop {
                let block = s | low;
                if sens[block] {
                    here = here.max(1 + dp[m ^ block]);
                }
                if s == 0 {
                    break;
                }
                s = (s - 1) & rest;
            }
            dp[m] = here;
        }
        best = best.max(dp[total - 1] as usize);
    }
    Ok(best)
}

/// Maximum over inputs of the smallest certificate fixing the output.
pub fn certificate_complexity(f: &TruthTable) -> Result<usize, BoolFnError> {
    let n = f.num_vars;
    if n > BS_CERT_CAP {
        return Err(BoolFnError::CapExceeded {
            what: "certificate complexity",
            requested: n,
            cap: BS_CERT_CAP,
        });
    }
    let total = f.size();
    let full = total - 1;
    let mut by_popcount: Vec<usize> = (0..total).collect();
    by_popcount.sort_by_key(|m| m.count_ones());
    let mut best = 0usize;
    for x in 0..total {
        let fx = f.get(x);
        let cert = by_popcount
            .iter()
            .find(|&&s| {
                let free = full & !s;
                let base = x & s;
                let mut w = free;
                loop {
                    if f.get(base | w) != fx {
                        return false;
                    }
                    if w == 0 {
                        return true;
                    }
                    w = (w - 1) & free;
                }
            })
            .map(|s| s.count_ones() as usize)
            .expect("the full variable set always certifies");
        best = best.max(cert);
    }
    Ok(best)
}

/// Degree of the real multilinear polynomial representing `f`, computed via
/// the subset Moebius transform of the 0/1 value vector.
pub fn degree(f: &TruthTable) -> usize {
    let n = f.num_vars;
    let total = f.size();
    let mut coeff: Vec<i32> = (0..total).map(|k| f.get(k) as i32).collect();
    for v in 0..n {
        let step = 1usize << v;
        for k in 0..total {
            if k & step != 0 {
                coeff[k] -= coeff[k ^ step];
            }
        }
    }
    coeff
        .iter()
        .enumerate()
        .filter(|(_, &c)| c != 0)
        .map(|(k, _)| k.count_ones() as usize)
        .max()
        .unwrap_or(0)
}

pub fn or_n(n: usize) -> Result<TruthTable, BoolFnError> {
    TruthTable::from_fn(n, |k| k != 0)
}

pub fn and_n(n: usize) -> Result<TruthTable, BoolFnError> {
    let full = (1usize << n) - 1;
    TruthTable::from_fn(n, |k| k == full)
}

pub fn xor_n(n: usize) -> Result<TruthTable, BoolFnError> {
    TruthTable::from_fn(n, |k| k.count_ones() % 2 == 1)
}

/// Address of the cell selected by the first `n` variables. The address
/// reads them with variable 0 as its most significant bit, while table
/// indices keep variable 0 least significant, so this is a bit reversal.
pub(crate) fn address_of(k: usize, n: usize) -> usize {
    (0..n).fold(0, |a, v| a | (((k >> v) & 1) << (n - 1 - v)))
}

/// The selector function on `n + 2^n` variables: the first `n` variables
/// address one of the 2^n cell variables, whose value is the output.
pub fn addr(n: usize) -> Result<TruthTable, BoolFnError> {
    let vars = n + (1 << n);
    check_addr_vars(vars)?;
    TruthTable::from_fn(vars, |k| (k >> (n + address_of(k, n))) & 1 == 1)
}

fn check_addr_vars(vars: usize) -> Result<(), BoolFnError> {
    if vars > TruthTable::MAX_VARS {
        return Err(BoolFnError::CapExceeded {
            what: "address function",
            requested: vars,
            cap: TruthTable::MAX_VARS,
        });
    }
    Ok(())
}

/// Extended selector: like [`addr`], but the selected cell is negated
/// whenever `g` maps the address variables to 0.
pub fn eaddr(n: usize, g: &TruthTable) -> Result<TruthTable, BoolFnError> {
    let vars = n + (1 << n);
    check_addr_vars(vars)?;
    if g.num_vars() != n {
        return Err(BoolFnError::SelectorArity { expected: n, got: g.num_vars() });
    }
    let x_mask = (1usize << n) - 1;
    TruthTable::from_fn(vars, |k| {
        let cell = (k >> (n + address_of(k, n))) & 1 == 1;
        if g.get(k & x_mask) {
            cell
        } else {
            !cell
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_parse_round_trip() {
        let f: TruthTable = "0111".parse().unwrap();
        assert_eq!(f.num_vars(), 2);
        assert_eq!(f.to_string(), "0111");
        assert!(matches!("011".parse::<TruthTable>(), Err(BoolFnError::BadLength(3))));
        assert!(matches!("01x1".parse::<TruthTable>(), Err(BoolFnError::BadChar)));
    }

    #[test]
    fn dtc_constant_is_zero() {
        let f = TruthTable::constant(3, true).unwrap();
        let (d, tree) = decision_tree_complexity(&f).unwrap();
        assert_eq!(d, 0);
        assert_eq!(tree, DecisionTree::Leaf(true));
    }

    #[test]
    fn dtc_of_or_is_n() {
        for n in 1..=6 {
            let f = or_n(n).unwrap();
            let (d, tree) = decision_tree_complexity(&f).unwrap();
            assert_eq!(d, n);
            assert_eq!(tree.depth(), n);
            for k in 0..f.size() {
                let bits: Vec<bool> = (0..n).map(|v| k >> v & 1 == 1).collect();
                assert_eq!(tree.evaluate(&bits), f.get(k));
            }
        }
    }

    #[test]
    fn dtc_of_addr2_is_three() {
        let f = addr(2).unwrap();
        let (d, tree) = decision_tree_complexity(&f).unwrap();
        assert_eq!(d, 3);
        assert_eq!(tree.depth(), 3);
    }

    #[test]
    fn dtc_cap() {
        let f = TruthTable::constant(15, false).unwrap();
        assert!(decision_tree_complexity(&f).is_err());
    }

    #[test]
    fn sensitivity_examples() {
        for n in 1..=8 {
            assert_eq!(positive_sensitivity(&or_n(n).unwrap()), 1);
        }
        assert_eq!(positive_sensitivity(&and_n(2).unwrap()), 2);
        let c = TruthTable::constant(4, true).unwrap();
        assert_eq!(sensitivity(&c), 0);
        assert_eq!(positive_sensitivity(&c), 0);
    }

    #[test]
    fn bs_cert_deg_examples() {
        let or2 = or_n(2).unwrap();
        assert_eq!(block_sensitivity(&or2).unwrap(), 2);
        assert_eq!(certificate_complexity(&or2).unwrap(), 2);
        assert_eq!(degree(&or2), 2);
        assert_eq!(degree(&"0110".parse::<TruthTable>().unwrap()), 2);
        let c = TruthTable::constant(3, false).unwrap();
        assert_eq!(block_sensitivity(&c).unwrap(), 0);
        assert_eq!(certificate_complexity(&c).unwrap(), 0);
        assert_eq!(degree(&c), 0);
    }

    #[test]
    fn dependent_vars_examples() {
        assert_eq!(or_n(3).unwrap().dependent_vars().len(), 3);
        let dictator: TruthTable = "0101".parse().unwrap();
        assert_eq!(dictator.dependent_vars().into_iter().collect::<Vec<_>>(), vec![0]);
        assert!(TruthTable::constant(2, false).unwrap().dependent_vars().is_empty());
    }

    #[test]
    fn addr1_selects_cells() {
        // Variables: selector, cell0, cell1 (in index order).
        let f = addr(1).unwrap();
        assert_eq!(f.num_vars(), 3);
        for k in 0..8 {
            let sel = k & 1 == 1;
            let cell0 = k >> 1 & 1 == 1;
            let cell1 = k >> 2 & 1 == 1;
            assert_eq!(f.get(k), if sel { cell1 } else { cell0 });
        }
    }

    #[test]
    fn addr2_address_is_big_endian() {
        let f = addr(2).unwrap();
        // Selector bits (1, 0) address cell 2, i.e. variable 0 is the
        // most-significant address bit.
        let k = 0b01_0001; // var0 = 1, var1 = 0, cell 2 (var 4) = 1
        assert_eq!(address_of(k, 2), 2);
        assert!(f.get(k));
        assert!(!f.get(0b00_1001)); // same selector, cell 1 set instead
    }

    #[test]
    fn eaddr_matches_addr_for_constant_one_selector() {
        for n in 1..=2 {
            let ones = TruthTable::constant(n, true).unwrap();
            assert_eq!(eaddr(n, &ones).unwrap(), addr(n).unwrap());
        }
    }

    #[test]
    fn eaddr_negates_when_selector_is_zero() {
        let g: TruthTable = "10".parse().unwrap();
        let f = eaddr(1, &g).unwrap();
        for k in 0..8usize {
            let sel = k & 1 == 1;
            let cell0 = k >> 1 & 1 == 1;
            let cell1 = k >> 2 & 1 == 1;
            // g(0) = 1 passes cell0 through; g(1) = 0 negates cell1.
            assert_eq!(f.get(k), if sel { !cell1 } else { cell0 });
        }
        assert!(f.is_nondegenerate());
    }

    #[test]
    fn eaddr_is_nondegenerate_for_every_selector() {
        // Every cell is sensitive at its own address and every address
        // variable flips the selected cell for a suitable cell assignment.
        for bits in 0..16u32 {
            let g = TruthTable::from_fn(2, |k| bits >> k & 1 == 1).unwrap();
            assert!(eaddr(2, &g).unwrap().is_nondegenerate(), "selector {bits:04b}");
        }
    }

    #[test]
    fn eaddr_rejects_wrong_selector_arity() {
        let g = TruthTable::constant(2, true).unwrap();
        assert!(matches!(
            eaddr(1, &g),
            Err(BoolFnError::SelectorArity { expected: 1, got: 2 })
        ));
    }

    #[test]
    fn measure_report_on_or2() {
        let r = measure(&or_n(2).unwrap()).unwrap();
        assert_eq!((r.d, r.s, r.psens, r.bs, r.c, r.deg), (2, 2, 1, 2, 2, 2));
        assert_eq!(r.dependent_vars.len(), 2);
    }

    #[test]
    fn restrict_and_collapse_agree() {
        let f = xor_n(3).unwrap();
        let r = f.restrict(1, true);
        let c = f.collapse(1, true);
        assert_eq!(c.num_vars(), 2);
        for j in 0..4usize {
            let k = (j & 1) | 0b010 | ((j & 2) << 1);
            assert_eq!(c.get(j), r.get(k));
            assert_eq!(c.get(j), f.get(k));
        }
    }
}
