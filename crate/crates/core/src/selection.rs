//! Extensional selection functions over finite lens objects.
//!
//! A selection function on `(X, V)` is stored as a table with one subset of
//! `X` per utility function `k : X -> V`, in the lexicographic order of
//! [`FnSpace`]. Every quantifier over utility functions is then a finite scan,
//! including the `∃k'` in the approximation operator.

use std::fmt;

use crate::error::{Error, Result};
use crate::lens::{is_short_lens, LensMap, LensObject};
use crate::metric::{ball_union, ExtReal, FnSpace, FnTable, Subset};

/// `Ok(())`, or the first counterexample in enumeration order.
pub type Check<W> = std::result::Result<(), W>;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SelectionFunction {
    object: LensObject,
    space: FnSpace,
    table: Vec<Subset>,
}

impl SelectionFunction {
    pub fn new(object: LensObject, table: Vec<Subset>) -> Result<Self> {
        let space = object.utility_space()?;
        if table.len() != space.count() {
            return Err(Error::invalid(format!(
                "selection table has {} entries, expected {}",
                table.len(),
                space.count()
            )));
        }
        let full = Subset::full(object.fwd().len());
        if let Some(i) = table.iter().position(|s| !s.is_subset(full)) {
            return Err(Error::Membership(format!("selection at k={} names an action outside X", space.table(i))));
        }
        Ok(SelectionFunction { object, space, table })
    }

    pub fn from_fn(object: LensObject, mut f: impl FnMut(&FnTable) -> Subset) -> Result<Self> {
        let space = object.utility_space()?;
        let full = Subset::full(object.fwd().len());
        let table = space.tables().map(|k| f(&k) & full).collect();
        Ok(SelectionFunction { object, space, table })
    }

    pub(crate) fn from_parts(object: LensObject, space: FnSpace, table: Vec<Subset>) -> Self {
        debug_assert_eq!(table.len(), space.count());
        SelectionFunction { object, space, table }
    }

    pub fn object(&self) -> &LensObject {
        &self.object
    }

    pub fn space(&self) -> FnSpace {
        self.space
    }

    pub fn table(&self) -> &[Subset] {
        &self.table
    }

    pub fn select(&self, k: &FnTable) -> Subset {
        self.table[k.index()]
    }

    pub fn at(&self, k_index: usize) -> Subset {
        self.table[k_index]
    }

    pub fn actions(&self) -> usize {
        self.object.fwd().len()
    }
}

/// Number of selection functions over `obj`: `(2^|X|)^(|V|^|X|)`.
pub fn selection_count(obj: &LensObject) -> Result<usize> {
    let space = obj.utility_space()?;
    let per = 1usize.checked_shl(obj.fwd().len() as u32).filter(|&p| p > 0);
    per.and_then(|p| u32::try_from(space.count()).ok().and_then(|c| p.checked_pow(c)))
        .ok_or_else(|| Error::TooLarge(format!("selection functions over {obj}")))
}

/// The `i`-th selection function over `obj`; the table entry at the first
/// utility function is the most significant digit.
pub fn nth_selection(obj: &LensObject, i: usize) -> Result<SelectionFunction> {
    let count = selection_count(obj)?;
    if i >= count {
        return Err(Error::invalid(format!("selection index {i} out of range {count}")));
    }
    let space = obj.utility_space()?;
    let base = 1usize << obj.fwd().len();
    let mut table = vec![Subset::EMPTY; space.count()];
    let mut rest = i;
    for slot in table.iter_mut().rev() {
        *slot = Subset((rest % base) as u64);
        rest /= base;
    }
    Ok(SelectionFunction::from_parts(obj.clone(), space, table))
}

/// A utility function and an action where a law check failed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SelWitness {
    pub k: FnTable,
    pub x: usize,
}

impl SelWitness {
    fn at(space: FnSpace, k_index: usize, x: usize) -> Self {
        SelWitness { k: space.table(k_index), x }
    }
}

impl fmt::Display for SelWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "k={} x={}", self.k, self.x)
    }
}

fn same_object(s: &SelectionFunction, t: &SelectionFunction) -> Result<()> {
    if s.object != t.object {
        return Err(Error::ObjectMismatch);
    }
    Ok(())
}

fn levels(obj: &LensObject) -> Result<&[u64]> {
    obj.bwd().levels().ok_or(Error::MissingOrder)
}

/// The exact maximizers of every utility function.
pub fn argmax_sel(obj: &LensObject) -> Result<SelectionFunction> {
    eps_argmax_sel(obj, ExtReal::ZERO)
}

/// Actions `x` with `k x >= k x' - eps` for all `x'`, comparing levels.
pub fn eps_argmax_sel(obj: &LensObject, eps: ExtReal) -> Result<SelectionFunction> {
    let lv = levels(obj)?.to_vec();
    let nx = obj.fwd().len();
    SelectionFunction::from_fn(obj.clone(), |k| {
        let best = k.entries().iter().map(|&v| lv[v]).max().unwrap_or(0);
        match eps {
            ExtReal::Infinite => Subset::full(nx),
            ExtReal::Finite(e) => (0..nx).filter(|&x| lv[k.get(x)].saturating_add(e) >= best).collect(),
        }
    })
}

/// Pointwise containment `s ⊆ t`; the witness has `x ∈ s k` and `x ∉ t k`.
pub fn sel_leq(s: &SelectionFunction, t: &SelectionFunction) -> Result<Check<SelWitness>> {
    same_object(s, t)?;
    Ok(table_leq(s.space, &s.table, &t.table))
}

pub(crate) fn table_leq(space: FnSpace, s: &[Subset], t: &[Subset]) -> Check<SelWitness> {
    for (i, (a, b)) in s.iter().zip(t).enumerate() {
        if let Some(x) = a.first_outside(*b) {
            return Err(SelWitness::at(space, i, x));
        }
    }
    Ok(())
}

/// `x ∈ (T_eps s)(k)` iff `x ∈ s(k')` for some `k'` within sup-distance `eps`.
pub fn t_eps(eps: ExtReal, s: &SelectionFunction) -> SelectionFunction {
    if eps == ExtReal::ZERO {
        return s.clone();
    }
    let balls = s.object.bwd().balls(eps);
    SelectionFunction::from_parts(s.object.clone(), s.space, ball_union(&s.table, s.space, &balls))
}

/// Nash product over the tensor object: `(x, x') ∈ (s ⊗ t)(f)` iff
/// `x ∈ s(π0 f(-, x'))` and `x' ∈ t(π1 f(x, -))`.
pub fn nash_product(s: &SelectionFunction, t: &SelectionFunction) -> Result<SelectionFunction> {
    let object = s.object.tensor(&t.object);
    let space = object.utility_space()?;
    let (nx, nx2) = (s.actions(), t.actions());
    let nv2 = t.object.bwd().len();
    let mut table = Vec::with_capacity(space.count());
    let mut entries = vec![0usize; space.domain];
    let mut a = vec![0usize; nx2];
    let mut b = vec![0usize; nx];
    for ki in 0..space.count() {
        decode_into(space, ki, &mut entries);
        for (x2, slot) in a.iter_mut().enumerate() {
            *slot = (0..nx).fold(0, |acc, x| acc * s.space.codomain + entries[x * nx2 + x2] / nv2);
        }
        for (x, slot) in b.iter_mut().enumerate() {
            *slot = (0..nx2).fold(0, |acc, x2| acc * t.space.codomain + entries[x * nx2 + x2] % nv2);
        }
        let mut set = Subset::EMPTY;
        for (x, &bx) in b.iter().enumerate() {
            let tb = t.table[bx];
            for (x2, &ax2) in a.iter().enumerate() {
                if tb.contains(x2) && s.table[ax2].contains(x) {
                    set.insert(x * nx2 + x2);
                }
            }
        }
        table.push(set);
    }
    Ok(SelectionFunction::from_parts(object, space, table))
}

pub(crate) fn decode_into(space: FnSpace, index: usize, out: &mut [usize]) {
    let mut rest = index;
    for slot in out.iter_mut().rev() {
        *slot = rest % space.codomain;
        rest /= space.codomain;
    }
}

/// A short lens map between the objects of two selection functions.
#[derive(Clone, Debug)]
pub struct SelMorphism<'a> {
    lens: LensMap,
    source: &'a SelectionFunction,
    target: &'a SelectionFunction,
}

impl<'a> SelMorphism<'a> {
    pub fn new(lens: LensMap, source: &'a SelectionFunction, target: &'a SelectionFunction) -> Result<Self> {
        if lens.source() != &source.object {
            return Err(Error::BoundaryMismatch {
                expected: source.object.to_string(),
                found: lens.source().to_string(),
            });
        }
        if lens.target() != &target.object {
            return Err(Error::BoundaryMismatch {
                expected: target.object.to_string(),
                found: lens.target().to_string(),
            });
        }
        is_short_lens(&lens).map_err(Error::NotShort)?;
        Ok(SelMorphism { lens, source, target })
    }

    pub fn lens(&self) -> &LensMap {
        &self.lens
    }
}

/// Contravariant condition: `αx ∈ t k ⇒ x ∈ s(kα)`. `pullback[k] = kα`.
pub(crate) fn contravariant_scan(
    pullback: &[usize],
    forward: &[usize],
    s: &[Subset],
    t: &[Subset],
) -> Option<(usize, usize)> {
    for (k, &ka) in pullback.iter().enumerate() {
        let tk = t[k];
        let sel = s[ka];
        for (x, &ax) in forward.iter().enumerate() {
            if tk.contains(ax) && !sel.contains(x) {
                return Some((k, x));
            }
        }
    }
    None
}

/// Covariant condition: `x ∈ s(kα) ⇒ αx ∈ t k`.
pub(crate) fn covariant_scan(
    pullback: &[usize],
    forward: &[usize],
    s: &[Subset],
    t: &[Subset],
) -> Option<(usize, usize)> {
    for (k, &ka) in pullback.iter().enumerate() {
        let tk = t[k];
        for x in s[ka].iter() {
            if !tk.contains(forward[x]) {
                return Some((k, x));
            }
        }
    }
    None
}

/// Checks `(∀k)(∀x) αx ∈ t k ⇒ x ∈ s(kα)`; the witness `k` lives on the target.
pub fn is_sel_morphism(m: &SelMorphism<'_>) -> Result<Check<SelWitness>> {
    let pull = m.lens.pullback_indices()?;
    Ok(match contravariant_scan(&pull, m.lens.forward_table(), &m.source.table, &m.target.table) {
        None => Ok(()),
        Some((k, x)) => Err(SelWitness::at(m.target.space, k, x)),
    })
}

/// The covariant alternative `x ∈ s(kα) ⇒ αx ∈ t k`, for exploration.
pub fn is_sel_morphism_covariant(m: &SelMorphism<'_>) -> Result<Check<SelWitness>> {
    let pull = m.lens.pullback_indices()?;
    Ok(match covariant_scan(&pull, m.lens.forward_table(), &m.source.table, &m.target.table) {
        None => Ok(()),
        Some((k, x)) => Err(SelWitness::at(m.target.space, k, x)),
    })
}

/// Whether the lens of a morphism `s -> t` is also a morphism `T_eps s -> T_eps t`.
/// Fails with [`Error::Precondition`] when `m` is not a morphism to begin with.
pub fn check_functoriality(m: &SelMorphism<'_>, eps: ExtReal) -> Result<Check<SelWitness>> {
    if let Err(w) = is_sel_morphism(m)? {
        return Err(Error::Precondition(format!("not a morphism of selection functions: {w}")));
    }
    let (ts, tt) = (t_eps(eps, m.source), t_eps(eps, m.target));
    is_sel_morphism(&SelMorphism { lens: m.lens.clone(), source: &ts, target: &tt })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GradedViolation {
    /// `T_0 s` differs from `s`.
    Identity(SelWitness),
    /// `T_lo s ⊄ T_hi s` although `lo <= hi`.
    Monotone { lo: ExtReal, hi: ExtReal, witness: SelWitness },
    /// `T_eps (T_delta s) ⊄ T_(eps+delta) s`.
    Composition(SelWitness),
}

impl fmt::Display for GradedViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GradedViolation::Identity(w) => write!(f, "T_0 s != s at {w}"),
            GradedViolation::Monotone { lo, hi, witness } => write!(f, "T_{lo} s not within T_{hi} s at {witness}"),
            GradedViolation::Composition(w) => write!(f, "T_eps T_delta s not within T_(eps+delta) s at {w}"),
        }
    }
}

/// The three graded laws for one `(eps, delta)` pair.
pub fn check_graded(s: &SelectionFunction, eps: ExtReal, delta: ExtReal) -> Check<GradedViolation> {
    let t0 = t_eps(ExtReal::ZERO, s);
    if t0.table != s.table {
        let (i, (a, b)) = t0.table.iter().zip(&s.table).enumerate().find(|(_, (a, b))| a != b).unwrap();
        let x = a.first_outside(*b).or_else(|| b.first_outside(*a)).unwrap();
        return Err(GradedViolation::Identity(SelWitness::at(s.space, i, x)));
    }
    let sum = eps + delta;
    let t_e = t_eps(eps, s);
    let t_d = t_eps(delta, s);
    let t_sum = t_eps(sum, s);
    for (lo, hi, small, big) in [
        (eps.min(delta), eps.max(delta), if eps <= delta { &t_e } else { &t_d }, if eps <= delta { &t_d } else { &t_e }),
        (eps, sum, &t_e, &t_sum),
        (delta, sum, &t_d, &t_sum),
    ] {
        table_leq(s.space, &small.table, &big.table)
            .map_err(|witness| GradedViolation::Monotone { lo, hi, witness })?;
    }
    let nested = t_eps(eps, &t_d);
    table_leq(s.space, &nested.table, &t_sum.table).map_err(GradedViolation::Composition)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MonoidalDirection {
    /// `T_eps(G ⊗ H) ⊆ T_eps G ⊗ T_eps H`
    Lax,
    /// `T_eps G ⊗ T_eps H ⊆ T_eps(G ⊗ H)`
    Oplax,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonoidalViolation {
    pub direction: MonoidalDirection,
    pub witness: SelWitness,
}

impl fmt::Display for MonoidalViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let dir = match self.direction {
            MonoidalDirection::Lax => "T(G*H) within TG*TH",
            MonoidalDirection::Oplax => "TG*TH within T(G*H)",
        };
        write!(f, "{dir} fails at {}", self.witness)
    }
}

/// Both containments between `T_eps(G ⊗ H)` and `T_eps G ⊗ T_eps H`.
pub fn check_monoidal(g: &SelectionFunction, h: &SelectionFunction, eps: ExtReal) -> Result<Check<MonoidalViolation>> {
    let lhs = t_eps(eps, &nash_product(g, h)?);
    let rhs = nash_product(&t_eps(eps, g), &t_eps(eps, h))?;
    Ok(compare_monoidal(&lhs, &rhs))
}

pub(crate) fn compare_monoidal(lhs: &SelectionFunction, rhs: &SelectionFunction) -> Check<MonoidalViolation> {
    table_leq(lhs.space, &lhs.table, &rhs.table)
        .map_err(|witness| MonoidalViolation { direction: MonoidalDirection::Lax, witness })?;
    table_leq(lhs.space, &rhs.table, &lhs.table)
        .map_err(|witness| MonoidalViolation { direction: MonoidalDirection::Oplax, witness })
}

/// Outcome of comparing `T_eps(argmax)` with `eps`- and `2eps`-argmax.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SandwichReport {
    pub eps: ExtReal,
    pub functions: usize,
    /// `T_eps(argmax) ⊆ 2eps-argmax` over every utility function.
    pub upper: Check<SelWitness>,
    /// `eps-argmax ⊆ T_eps(argmax)` over utility functions with headroom.
    pub lower: Check<SelWitness>,
    /// Utility functions (by index) where raising a selected action by `eps`
    /// leaves the declared levels.
    pub skipped: Vec<usize>,
    /// Skipped functions where the containment still holds by ball search.
    pub skipped_held: usize,
}

impl SandwichReport {
    pub fn holds(&self) -> bool {
        self.upper.is_ok() && self.lower.is_ok()
    }
}

/// Checks both argmax containments. The lower one uses the explicit witness
/// that raises the chosen action by `eps`, where the levels allow it.
pub fn check_argmax_sandwich(obj: &LensObject, eps: ExtReal) -> Result<SandwichReport> {
    let lv = levels(obj)?;
    let argmax = argmax_sel(obj)?;
    let t_argmax = t_eps(eps, &argmax);
    let upper = table_leq(argmax.space, &t_argmax.table, &eps_argmax_sel(obj, eps.double())?.table);

    let relaxed = eps_argmax_sel(obj, eps)?;
    let space = argmax.space;
    let mut skipped = Vec::new();
    let mut skipped_held = 0;
    let mut lower = Ok(());
    for (ki, k) in space.tables().enumerate() {
        let chosen = relaxed.table[ki];
        let raised: Option<Vec<(usize, usize)>> = chosen
            .iter()
            .map(|x| {
                let target = eps.finite().and_then(|e| lv[k.get(x)].checked_add(e))?;
                lv.iter().position(|&l| l == target).map(|v| (x, v))
            })
            .collect();
        match raised {
            None => {
                skipped.push(ki);
                if chosen.is_subset(t_argmax.table[ki]) {
                    skipped_held += 1;
                }
            }
            Some(raised) => {
                for (x, v) in raised {
                    let mut entries = k.entries().to_vec();
                    entries[x] = v;
                    let witness = FnTable::new(entries, k.codomain_len())?;
                    let close = crate::metric::sup_metric(&k, &witness, obj.bwd())? <= eps;
                    let optimal = argmax.select(&witness).contains(x);
                    if !(close && optimal && t_argmax.table[ki].contains(x)) && lower.is_ok() {
                        lower = Err(SelWitness::at(space, ki, x));
                    }
                }
            }
        }
    }
    Ok(SandwichReport { eps, functions: space.count(), upper, lower, skipped, skipped_held })
}
